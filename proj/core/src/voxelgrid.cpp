#include "tensorformer/voxelgrid.hpp"

#include <cstdio>
#include <fstream>

#include "tensorformer/common.hpp"

namespace tensorformer {

VoxelGrid VoxelGrid::create(int64_t nx, int64_t ny, int64_t nz, Vec3 origin, double h) {
  if (nx < 2 || ny < 2 || nz < 2)
    throw NumericError("voxel grid needs resolution >= 2 per axis");
  if (h <= 0) throw NumericError("voxel grid needs positive cell size");
  VoxelGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.origin = origin;
  g.h = h;
  g.values.assign(static_cast<size_t>(nx * ny * nz), 0.0);
  return g;
}

VoxelGrid VoxelGrid::over_box(int64_t res, const Aabb& box) {
  const double side = box.max_side();
  const Vec3 c = box.center();
  const double half = side / 2.0;
  return create(res, res, res, c - Vec3{half, half, half}, side / static_cast<double>(res));
}

bool VoxelGrid::is_binary() const {
  for (double v : values)
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

bool VoxelGrid::same_geometry(const VoxelGrid& o) const {
  return nx == o.nx && ny == o.ny && nz == o.nz && std::abs(h - o.h) <= 1e-12 &&
         (origin - o.origin).norm() <= 1e-12;
}

int64_t VoxelGrid::count_equal(double v) const {
  int64_t n = 0;
  for (double x : values) n += x == v ? 1 : 0;
  return n;
}

Aabb unit_cube() {
  Aabb b;
  b.extend(Vec3{-0.5, -0.5, -0.5});
  b.extend(Vec3{0.5, 0.5, 0.5});
  return b;
}

VoxelGrid oracle_occupancy_grid(const ShapeOracle& oracle, int64_t res, const Aabb& domain) {
  VoxelGrid g = VoxelGrid::over_box(res, domain);
  for (int64_t ix = 0; ix < g.nx; ++ix)
    for (int64_t iy = 0; iy < g.ny; ++iy)
      for (int64_t iz = 0; iz < g.nz; ++iz)
        g.at(ix, iy, iz) = oracle.occupied(g.cell_center(ix, iy, iz)) ? 1.0 : 0.0;
  return g;
}

VoxelGrid morphology(const VoxelGrid& grid, MorphOp op) {
  if (!grid.is_binary()) throw NumericError("morphology: grid is not binary");
  VoxelGrid out = grid;
  // outside cells count as empty for dilation and occupied for erosion;
  // this keeps dilate(erode(G)) <= G <= erode(dilate(G)) on finite grids
  const double outside = op == MorphOp::Dilate ? 0.0 : 1.0;
  const auto occupied = [&](int64_t x, int64_t y, int64_t z) {
    if (x < 0 || x >= grid.nx || y < 0 || y >= grid.ny || z < 0 || z >= grid.nz)
      return outside;
    return grid.at(x, y, z);
  };
  for (int64_t x = 0; x < grid.nx; ++x)
    for (int64_t y = 0; y < grid.ny; ++y)
      for (int64_t z = 0; z < grid.nz; ++z) {
        const double self = grid.at(x, y, z);
        const double nb[6] = {occupied(x - 1, y, z), occupied(x + 1, y, z),
                              occupied(x, y - 1, z), occupied(x, y + 1, z),
                              occupied(x, y, z - 1), occupied(x, y, z + 1)};
        double v = self;
        for (double b : nb) v = op == MorphOp::Dilate ? std::max(v, b) : std::min(v, b);
        out.at(x, y, z) = v;
      }
  return out;
}

VoxelGrid threshold(const VoxelGrid& field, double iso) {
  VoxelGrid out = field;
  for (double& v : out.values) v = v > iso ? 1.0 : 0.0;
  return out;
}

void write_grid(const std::string& path, const VoxelGrid& grid) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write grid: " + path);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%lld %lld %lld %.17g %.17g %.17g %.17g\n",
                static_cast<long long>(grid.nx), static_cast<long long>(grid.ny),
                static_cast<long long>(grid.nz), grid.origin.x, grid.origin.y, grid.origin.z,
                grid.h);
  os << buf;
  for (size_t i = 0; i < grid.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", grid.values[i]);
    os << buf << (((i + 1) % 16 == 0) ? "\n" : " ");
  }
  os << "\n";
  if (!os) throw IoError("failed writing grid: " + path);
}

VoxelGrid read_grid(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read grid: " + path);
  long long nx, ny, nz;
  Vec3 origin;
  double h;
  if (!(is >> nx >> ny >> nz >> origin.x >> origin.y >> origin.z >> h))
    throw IoError("malformed grid header: " + path);
  VoxelGrid g = VoxelGrid::create(nx, ny, nz, origin, h);
  for (double& v : g.values)
    if (!(is >> v)) throw IoError("truncated grid values: " + path);
  return g;
}

}  // namespace tensorformer
