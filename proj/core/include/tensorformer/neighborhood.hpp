#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tensorformer/pointcloud.hpp"

namespace tensorformer {

// k-nearest-neighbor table binding anchors to their local patches. Rows are
// ordered by (squared distance, index) ascending; this is the canonical
// summation order used by every attention kernel, chosen so that the order
// does not change when points are relabeled.
struct Neighborhood {
  int64_t anchor_count = 0;
  int64_t k = 0;
  std::vector<int64_t> indices;  // anchor-major, anchor_count * k
  std::vector<Vec3> offsets;     // neighbor - anchor, same layout

  int64_t index(int64_t anchor, int64_t j) const {
    return indices[static_cast<size_t>(anchor * k + j)];
  }
  const Vec3& offset(int64_t anchor, int64_t j) const {
    return offsets[static_cast<size_t>(anchor * k + j)];
  }
};

// Exact kNN of the cloud against itself. With include_self the anchor is its
// own nearest neighbor; without, k can be at most N-1. Ties broken by
// smaller index.
Neighborhood knn(const PointCloud& cloud, int64_t k, bool include_self = true);

// Exact kNN of arbitrary anchors against a cloud.
Neighborhood knn(std::span<const Vec3> anchors, const PointCloud& cloud, int64_t k);

}  // namespace tensorformer
