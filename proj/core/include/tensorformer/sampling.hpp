#pragma once

#include <array>
#include <vector>

#include "tensorformer/oracle.hpp"
#include "tensorformer/rng.hpp"
#include "tensorformer/voxelgrid.hpp"

namespace tensorformer {

struct QuerySet {
  std::vector<Vec3> queries;
  std::vector<double> labels;      // exact oracle occupancy, 0/1
  int64_t near_surface_count = 0;  // leading entries sit in the surface band
};

// Training-time query sampler. The occupancy grid of the oracle at fine_res
// is dilated and eroded once (6-connected); one point is drawn uniformly
// from each cell of the band between the two. A second, uniform set draws
// one point per coarse_res cell. Band cells depend only on the oracle, so
// they are precomputed once and reused every iteration.
class TrainQuerySampler {
 public:
  TrainQuerySampler(const ShapeOracle& oracle, int64_t fine_res, int64_t coarse_res,
                    const Aabb& domain = unit_cube());

  QuerySet sample(Rng& rng) const;

  int64_t band_cell_count() const { return static_cast<int64_t>(band_cells_.size()); }

 private:
  const ShapeOracle* oracle_;
  VoxelGrid fine_geometry_;    // values unused; geometry only
  VoxelGrid coarse_geometry_;
  std::vector<std::array<int64_t, 3>> band_cells_;
};

// One-shot form of the sampler above.
QuerySet query_sampling_train(const ShapeOracle& oracle, int64_t fine_res, int64_t coarse_res,
                              Rng& rng, const Aabb& domain = unit_cube());

}  // namespace tensorformer
