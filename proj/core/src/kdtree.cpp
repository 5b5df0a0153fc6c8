#include "tensorformer/kdtree.hpp"

#include <algorithm>
#include <cmath>

#include "tensorformer/common.hpp"

namespace tensorformer {

KdTree3::KdTree3(std::span<const Vec3> points)
    : points_(points.begin(), points.end()), order_(points.size()) {
  if (points.empty()) throw NumericError("kdtree: empty point set");
  for (size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int64_t>(i);
  build(0, static_cast<int64_t>(order_.size()), 0);
}

void KdTree3::build(int64_t begin, int64_t end, int depth) {
  if (end - begin <= 1) return;
  const int axis = depth % 3;
  const int64_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int64_t a, int64_t b) {
                     const double va = points_[static_cast<size_t>(a)][axis];
                     const double vb = points_[static_cast<size_t>(b)][axis];
                     if (va != vb) return va < vb;
                     return a < b;
                   });
  build(begin, mid, depth + 1);
  build(mid + 1, end, depth + 1);
}

void KdTree3::search(int64_t begin, int64_t end, int depth, const Vec3& q,
                     PointMetric metric, Hit& best) const {
  if (begin >= end) return;
  const int axis = depth % 3;
  const int64_t mid = begin + (end - begin) / 2;
  const int64_t idx = order_[static_cast<size_t>(mid)];
  const Vec3& p = points_[static_cast<size_t>(idx)];
  const double d = point_distance(q, p, metric);
  if (d < best.distance || (d == best.distance && idx < best.index) || best.index < 0) {
    best.index = idx;
    best.distance = d;
  }
  const double planar = q[axis] - p[axis];
  const int64_t near_begin = planar <= 0 ? begin : mid + 1;
  const int64_t near_end = planar <= 0 ? mid : end;
  const int64_t far_begin = planar <= 0 ? mid + 1 : begin;
  const int64_t far_end = planar <= 0 ? end : mid;
  search(near_begin, near_end, depth + 1, q, metric, best);
  // the axis gap lower-bounds both L1 and L2 distances to the far side
  if (std::abs(planar) <= best.distance)
    search(far_begin, far_end, depth + 1, q, metric, best);
}

KdTree3::Hit KdTree3::nearest(const Vec3& query, PointMetric metric) const {
  Hit best;
  best.index = -1;
  best.distance = std::numeric_limits<double>::max();
  search(0, static_cast<int64_t>(order_.size()), 0, query, metric, best);
  return best;
}

}  // namespace tensorformer
