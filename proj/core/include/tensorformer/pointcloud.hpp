#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tensorformer/vec3.hpp"

namespace tensorformer {

struct PointCloud {
  std::vector<Vec3> points;

  int64_t size() const { return static_cast<int64_t>(points.size()); }
  bool empty() const { return points.empty(); }
  Aabb bounding_box() const {
    Aabb b;
    for (const Vec3& p : points) b.extend(p);
    return b;
  }
};

// Text format: one "x y z" triple per line.
PointCloud read_xyz(const std::string& path);
void write_xyz(const std::string& path, const PointCloud& cloud);

// Greedy max-min subset selection starting from an explicit first index.
// Each subsequent pick maximizes the distance to the already chosen set,
// ties broken by smaller index.
std::vector<int64_t> farthest_point_sample_from(const PointCloud& cloud, int64_t m,
                                                int64_t first);
// First point derived from the seed (seed mod point count).
std::vector<int64_t> farthest_point_sample(const PointCloud& cloud, int64_t m,
                                           uint64_t seed);
// Permutation-invariant start: the point farthest from the centroid. Used by
// the network so that relabeling input points cannot change the chosen set.
int64_t farthest_from_centroid(const PointCloud& cloud);

// Maps an axis-aligned box to the unit cube centered at the origin
// (isotropic scale by the longest side).
struct UnitCubeTransform {
  Vec3 center{};
  double scale = 1.0;

  static UnitCubeTransform from(const Aabb& box);
  Vec3 apply(const Vec3& p) const { return (p - center) * scale; }
  Vec3 invert(const Vec3& p) const { return p / scale + center; }
  PointCloud apply(const PointCloud& cloud) const;
};

}  // namespace tensorformer
