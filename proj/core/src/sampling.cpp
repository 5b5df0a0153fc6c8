#include "tensorformer/sampling.hpp"

#include "tensorformer/common.hpp"

namespace tensorformer {

TrainQuerySampler::TrainQuerySampler(const ShapeOracle& oracle, int64_t fine_res,
                                     int64_t coarse_res, const Aabb& domain)
    : oracle_(&oracle) {
  if (fine_res <= coarse_res)
    throw ConfigError("query sampling: fine_res must exceed coarse_res");
  const VoxelGrid occ = oracle_occupancy_grid(oracle, fine_res, domain);
  const VoxelGrid grown = morphology(occ, MorphOp::Dilate);
  const VoxelGrid shrunk = morphology(occ, MorphOp::Erode);
  fine_geometry_ = VoxelGrid::over_box(fine_res, domain);
  coarse_geometry_ = VoxelGrid::over_box(coarse_res, domain);
  for (int64_t x = 0; x < occ.nx; ++x)
    for (int64_t y = 0; y < occ.ny; ++y)
      for (int64_t z = 0; z < occ.nz; ++z)
        if (grown.at(x, y, z) == 1.0 && shrunk.at(x, y, z) == 0.0)
          band_cells_.push_back({x, y, z});
}

QuerySet TrainQuerySampler::sample(Rng& rng) const {
  QuerySet qs;
  qs.near_surface_count = static_cast<int64_t>(band_cells_.size());
  qs.queries.reserve(band_cells_.size() +
                     static_cast<size_t>(coarse_geometry_.cell_count()));

  const auto draw_in_cell = [&rng](const VoxelGrid& g, int64_t x, int64_t y, int64_t z) {
    return Vec3{g.origin.x + (static_cast<double>(x) + rng.uniform()) * g.h,
                g.origin.y + (static_cast<double>(y) + rng.uniform()) * g.h,
                g.origin.z + (static_cast<double>(z) + rng.uniform()) * g.h};
  };

  for (const auto& [x, y, z] : band_cells_)
    qs.queries.push_back(draw_in_cell(fine_geometry_, x, y, z));
  for (int64_t x = 0; x < coarse_geometry_.nx; ++x)
    for (int64_t y = 0; y < coarse_geometry_.ny; ++y)
      for (int64_t z = 0; z < coarse_geometry_.nz; ++z)
        qs.queries.push_back(draw_in_cell(coarse_geometry_, x, y, z));

  qs.labels = occupancy_labels(*oracle_, qs.queries);
  return qs;
}

QuerySet query_sampling_train(const ShapeOracle& oracle, int64_t fine_res, int64_t coarse_res,
                              Rng& rng, const Aabb& domain) {
  return TrainQuerySampler(oracle, fine_res, coarse_res, domain).sample(rng);
}

}  // namespace tensorformer
