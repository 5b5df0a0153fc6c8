#pragma once

#include "tensorformer/mesh.hpp"
#include "tensorformer/voxelgrid.hpp"

namespace tensorformer {

namespace detail {
extern const int mc_edge_table[256];
extern const int mc_tri_table[256][16];
}  // namespace detail

// Standard 256-case marching cubes over the lattice of cell centers, with
// linear interpolation along crossed edges. Vertices are welded across
// cells, degenerate triangles are dropped, and triangles are wound so that
// face normals point toward lower field values (outward for occupancy
// fields with iso 0.5). An iso level outside the field's value range yields
// an empty mesh.
TriangleMesh marching_cubes(const VoxelGrid& field, double iso = 0.5);

}  // namespace tensorformer
