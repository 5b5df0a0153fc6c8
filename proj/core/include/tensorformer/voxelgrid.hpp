#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tensorformer/oracle.hpp"
#include "tensorformer/vec3.hpp"

namespace tensorformer {

// Regular grid of scalar values sampled at cell centers. origin is the
// minimum corner of the domain; cells are cubes of side h. Storage is
// x-major: index(ix, iy, iz) = (ix * ny + iy) * nz + iz.
struct VoxelGrid {
  int64_t nx = 0, ny = 0, nz = 0;
  Vec3 origin{};
  double h = 0.0;
  std::vector<double> values;

  static VoxelGrid create(int64_t nx, int64_t ny, int64_t nz, Vec3 origin, double h);
  // res^3 grid spanning the given box (cubified around its center).
  static VoxelGrid over_box(int64_t res, const Aabb& box);

  int64_t cell_count() const { return nx * ny * nz; }
  size_t index(int64_t ix, int64_t iy, int64_t iz) const {
    return static_cast<size_t>((ix * ny + iy) * nz + iz);
  }
  double at(int64_t ix, int64_t iy, int64_t iz) const { return values[index(ix, iy, iz)]; }
  double& at(int64_t ix, int64_t iy, int64_t iz) { return values[index(ix, iy, iz)]; }
  Vec3 cell_center(int64_t ix, int64_t iy, int64_t iz) const {
    return {origin.x + (static_cast<double>(ix) + 0.5) * h,
            origin.y + (static_cast<double>(iy) + 0.5) * h,
            origin.z + (static_cast<double>(iz) + 0.5) * h};
  }
  bool is_binary() const;
  bool same_geometry(const VoxelGrid& o) const;
  int64_t count_equal(double v) const;
};

// The unit cube centered at the origin; the canonical query domain.
Aabb unit_cube();

// Exact oracle occupancy (0/1) at every cell center.
VoxelGrid oracle_occupancy_grid(const ShapeOracle& oracle, int64_t res,
                                const Aabb& domain = unit_cube());

enum class MorphOp { Erode, Dilate };

// 6-connected erosion/dilation of a binary grid; outside cells count as
// empty. Throws NumericError on non-binary input.
VoxelGrid morphology(const VoxelGrid& grid, MorphOp op);

// Threshold a scalar field into a binary grid (value > iso).
VoxelGrid threshold(const VoxelGrid& field, double iso);

// Text format: header "nx ny nz ox oy oz h", then values x-major.
void write_grid(const std::string& path, const VoxelGrid& grid);
VoxelGrid read_grid(const std::string& path);

}  // namespace tensorformer
