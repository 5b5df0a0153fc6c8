#include "tensorformer/marching_cubes.hpp"

#include <cmath>
#include <unordered_map>

#include "tensorformer/common.hpp"

namespace tensorformer {

namespace {

// Bourke corner layout relative to the cube's lattice origin.
constexpr int corner_offset[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

// Endpoint corners of the 12 cube edges.
constexpr int edge_corners[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
    {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

}  // namespace

TriangleMesh marching_cubes(const VoxelGrid& field, double iso) {
  if (field.nx < 2 || field.ny < 2 || field.nz < 2)
    throw NumericError("marching_cubes: resolution must be >= 2 per axis");
  for (double v : field.values)
    if (!std::isfinite(v)) throw NumericError("marching_cubes: field has non-finite values");

  TriangleMesh mesh;
  // lattice-edge key -> welded vertex id
  std::unordered_map<int64_t, int64_t> edge_vertex;
  edge_vertex.reserve(static_cast<size_t>(field.cell_count() / 4 + 16));

  const auto lattice_index = [&](int64_t x, int64_t y, int64_t z) {
    return (x * field.ny + y) * field.nz + z;
  };

  int64_t corner_lattice[8];
  double corner_value[8];
  Vec3 corner_pos[8];

  for (int64_t x = 0; x + 1 < field.nx; ++x)
    for (int64_t y = 0; y + 1 < field.ny; ++y)
      for (int64_t z = 0; z + 1 < field.nz; ++z) {
        int cube_index = 0;
        for (int c = 0; c < 8; ++c) {
          const int64_t cx = x + corner_offset[c][0];
          const int64_t cy = y + corner_offset[c][1];
          const int64_t cz = z + corner_offset[c][2];
          corner_lattice[c] = lattice_index(cx, cy, cz);
          corner_value[c] = field.at(cx, cy, cz);
          corner_pos[c] = field.cell_center(cx, cy, cz);
          if (corner_value[c] < iso) cube_index |= 1 << c;
        }
        const int edges = detail::mc_edge_table[cube_index];
        if (edges == 0) continue;

        int64_t edge_vert_id[12];
        for (int e = 0; e < 12; ++e) {
          if (!(edges & (1 << e))) continue;
          const int c1 = edge_corners[e][0], c2 = edge_corners[e][1];
          const int64_t l1 = corner_lattice[c1], l2 = corner_lattice[c2];
          const int axis = corner_offset[c1][0] != corner_offset[c2][0]   ? 0
                           : corner_offset[c1][1] != corner_offset[c2][1] ? 1
                                                                          : 2;
          const int64_t key = std::min(l1, l2) * 4 + axis;
          auto [it, inserted] = edge_vertex.try_emplace(key, mesh.vertex_count());
          if (inserted) {
            const double v1 = corner_value[c1], v2 = corner_value[c2];
            double t = (iso - v1) / (v2 - v1);
            t = std::clamp(t, 0.0, 1.0);
            mesh.vertices.push_back(corner_pos[c1] + (corner_pos[c2] - corner_pos[c1]) * t);
          }
          edge_vert_id[e] = it->second;
        }

        const int* tri = detail::mc_tri_table[cube_index];
        for (int t = 0; tri[t] != -1; t += 3) {
          mesh.triangles.push_back({edge_vert_id[tri[t]], edge_vert_id[tri[t + 1]],
                                    edge_vert_id[tri[t + 2]]});
        }
      }

  mesh.remove_degenerate_triangles();
  // orientation check: wind triangles so normals point out of the enclosed
  // region (positive signed volume)
  if (!mesh.empty() && mesh.signed_volume() < 0.0)
    for (auto& tri : mesh.triangles) std::swap(tri[1], tri[2]);
  return mesh;
}

}  // namespace tensorformer
