#include "tensorformer/neighborhood.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "tensorformer/common.hpp"

namespace tensorformer {

namespace {

// Uniform bucket grid over the cloud's bounding box; ring expansion gives
// exact k nearest neighbors. Candidates are compared by (d^2, index) so the
// result matches a brute-force scan with the same tie rule.
class BucketGrid {
 public:
  explicit BucketGrid(const PointCloud& cloud) : cloud_(&cloud) {
    const int64_t n = cloud.size();
    box_ = cloud.bounding_box();
    const double side = box_.max_side();
    cells_ = std::max<int64_t>(1, static_cast<int64_t>(std::cbrt(static_cast<double>(n))));
    // a degenerate box (single point or coincident points) still needs a
    // positive cell size
    h_ = side > 0.0 ? side / static_cast<double>(cells_) * (1.0 + 1e-12) : 1.0;
    starts_.assign(static_cast<size_t>(cells_ * cells_ * cells_ + 1), 0);
    std::vector<int64_t> cell_of(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      cell_of[static_cast<size_t>(i)] = cell_index(cloud.points[static_cast<size_t>(i)]);
      ++starts_[static_cast<size_t>(cell_of[static_cast<size_t>(i)] + 1)];
    }
    for (size_t c = 1; c < starts_.size(); ++c) starts_[c] += starts_[c - 1];
    ids_.resize(static_cast<size_t>(n));
    std::vector<int64_t> cursor(starts_.begin(), starts_.end() - 1);
    for (int64_t i = 0; i < n; ++i)
      ids_[static_cast<size_t>(cursor[static_cast<size_t>(cell_of[static_cast<size_t>(i)])]++)] = i;
  }

  // best holds (d^2, index) pairs, worst on top.
  void collect(const Vec3& q, int64_t k, int64_t exclude,
               std::vector<std::pair<double, int64_t>>& out) const {
    using Entry = std::pair<double, int64_t>;
    std::priority_queue<Entry> heap;
    // clamp the query's virtual cell so far-away anchors cannot overflow;
    // `slack` (query distance to that cell's box) keeps the ring lower bound
    // valid after clamping
    const auto coord = [&](double v, double lo) {
      const double c = std::floor((v - lo) / h_);
      return static_cast<int64_t>(
          std::clamp(c, -static_cast<double>(cells_ + 2), static_cast<double>(2 * cells_ + 2)));
    };
    const int64_t qx = coord(q.x, box_.lo.x), qy = coord(q.y, box_.lo.y),
                  qz = coord(q.z, box_.lo.z);
    double slack = 0.0;
    const int64_t qc[3] = {qx, qy, qz};
    for (int a = 0; a < 3; ++a) {
      const double cell_lo = box_.lo[a] + static_cast<double>(qc[a]) * h_;
      slack = std::max({slack, cell_lo - q[a], q[a] - (cell_lo + h_)});
    }
    const int64_t max_ring = 3 * cells_ + 5;

    for (int64_t ring = 0; ring <= max_ring; ++ring) {
      // a cell at Chebyshev ring distance r holds no point closer than
      // (r-1)*h - slack
      if (static_cast<int64_t>(heap.size()) == k && ring > 0) {
        const double bound = std::max(0.0, static_cast<double>(ring - 1) * h_ - slack);
        if (heap.top().first <= bound * bound) break;
      }
      visit_ring(qx, qy, qz, ring, [&](int64_t cell) {
        for (int64_t s = starts_[static_cast<size_t>(cell)]; s < starts_[static_cast<size_t>(cell + 1)]; ++s) {
          const int64_t i = ids_[static_cast<size_t>(s)];
          if (i == exclude) continue;
          const Vec3& p = cloud_->points[static_cast<size_t>(i)];
          const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
          const Entry e{dx * dx + dy * dy + dz * dz, i};
          if (static_cast<int64_t>(heap.size()) < k) {
            heap.push(e);
          } else if (e < heap.top()) {
            heap.pop();
            heap.push(e);
          }
        }
      });
    }
    out.resize(heap.size());
    for (size_t i = out.size(); i-- > 0;) {
      out[i] = heap.top();
      heap.pop();
    }
  }

 private:
  int64_t cell_index(const Vec3& p) const {
    const auto clampc = [&](double v, double lo) {
      int64_t c = static_cast<int64_t>(std::floor((v - lo) / h_));
      return std::clamp<int64_t>(c, 0, cells_ - 1);
    };
    return (clampc(p.x, box_.lo.x) * cells_ + clampc(p.y, box_.lo.y)) * cells_ +
           clampc(p.z, box_.lo.z);
  }

  template <typename F>
  void visit_ring(int64_t qx, int64_t qy, int64_t qz, int64_t ring, F&& f) const {
    const auto in_grid = [&](int64_t x, int64_t y, int64_t z) {
      return x >= 0 && x < cells_ && y >= 0 && y < cells_ && z >= 0 && z < cells_;
    };
    const auto emit = [&](int64_t x, int64_t y, int64_t z) {
      if (in_grid(x, y, z)) f((x * cells_ + y) * cells_ + z);
    };
    if (ring == 0) {
      emit(qx, qy, qz);
      return;
    }
    for (int64_t dx = -ring; dx <= ring; ++dx)
      for (int64_t dy = -ring; dy <= ring; ++dy) {
        if (std::abs(dx) == ring || std::abs(dy) == ring) {
          for (int64_t dz = -ring; dz <= ring; ++dz) emit(qx + dx, qy + dy, qz + dz);
        } else {
          emit(qx + dx, qy + dy, qz - ring);
          emit(qx + dx, qy + dy, qz + ring);
        }
      }
  }

  const PointCloud* cloud_;
  Aabb box_;
  int64_t cells_ = 1;
  double h_ = 1.0;
  std::vector<int64_t> starts_;
  std::vector<int64_t> ids_;
};

Neighborhood knn_impl(std::span<const Vec3> anchors, const PointCloud& cloud, int64_t k,
                      bool self_anchors, bool include_self) {
  const int64_t available = self_anchors && !include_self ? cloud.size() - 1 : cloud.size();
  if (k < 1 || k > available)
    throw NumericError("knn: k=" + std::to_string(k) + " exceeds available neighbors (" +
                       std::to_string(available) + ")");

  Neighborhood nbr;
  nbr.anchor_count = static_cast<int64_t>(anchors.size());
  nbr.k = k;
  nbr.indices.resize(static_cast<size_t>(nbr.anchor_count * k));
  nbr.offsets.resize(static_cast<size_t>(nbr.anchor_count * k));

  BucketGrid grid(cloud);
  std::vector<std::pair<double, int64_t>> best;
  for (int64_t a = 0; a < nbr.anchor_count; ++a) {
    const Vec3& q = anchors[static_cast<size_t>(a)];
    grid.collect(q, k, self_anchors && !include_self ? a : -1, best);
    for (int64_t j = 0; j < k; ++j) {
      const int64_t idx = best[static_cast<size_t>(j)].second;
      nbr.indices[static_cast<size_t>(a * k + j)] = idx;
      nbr.offsets[static_cast<size_t>(a * k + j)] = cloud.points[static_cast<size_t>(idx)] - q;
    }
  }
  return nbr;
}

}  // namespace

Neighborhood knn(const PointCloud& cloud, int64_t k, bool include_self) {
  return knn_impl(cloud.points, cloud, k, /*self_anchors=*/true, include_self);
}

Neighborhood knn(std::span<const Vec3> anchors, const PointCloud& cloud, int64_t k) {
  if (cloud.empty()) throw NumericError("knn: empty cloud");
  return knn_impl(anchors, cloud, k, /*self_anchors=*/false, /*include_self=*/true);
}

}  // namespace tensorformer
