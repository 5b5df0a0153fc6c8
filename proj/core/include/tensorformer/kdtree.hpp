#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tensorformer/vec3.hpp"

namespace tensorformer {

enum class PointMetric { L1, L2 };

inline double point_distance(const Vec3& a, const Vec3& b, PointMetric metric) {
  return metric == PointMetric::L1 ? (a - b).l1_norm() : (a - b).norm();
}

// Static kd-tree over 3-D points supporting exact nearest-neighbor queries
// under L1 or L2. Ties resolve to the smaller point index, matching a brute
// force scan ordered by (distance, index).
class KdTree3 {
 public:
  explicit KdTree3(std::span<const Vec3> points);

  struct Hit {
    int64_t index = -1;
    double distance = 0.0;
  };
  Hit nearest(const Vec3& query, PointMetric metric) const;

  int64_t size() const { return static_cast<int64_t>(points_.size()); }

 private:
  struct NodeRange {
    int64_t begin, end;  // range into order_
    int axis;
  };
  void build(int64_t begin, int64_t end, int depth);
  void search(int64_t begin, int64_t end, int depth, const Vec3& q, PointMetric metric,
              Hit& best) const;

  std::vector<Vec3> points_;
  std::vector<int64_t> order_;  // median-partitioned index permutation
};

}  // namespace tensorformer
