#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tensorformer/vec3.hpp"
#include "tensorformer/voxelgrid.hpp"

namespace tensorformer {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int64_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }
  int64_t vertex_count() const { return static_cast<int64_t>(vertices.size()); }
  int64_t triangle_count() const { return static_cast<int64_t>(triangles.size()); }

  double area() const;
  double triangle_area(int64_t t) const;
  Vec3 face_normal(int64_t t) const;  // unit; zero for degenerate faces
  double signed_volume() const;       // positive for outward-wound closed meshes
  std::vector<Vec3> vertex_normals() const;  // area weighted, unit
  Aabb bounding_box() const;

  int64_t unique_edge_count() const;
  bool is_closed() const;  // every edge shared by exactly two triangles
  int64_t euler_characteristic() const;

  // Drops triangles with repeated vertex indices or (near) zero area.
  void remove_degenerate_triangles(double area_eps = 0.0);
};

// OBJ subset: "v x y z" and triangular "f a b c" lines, 1-based indices.
TriangleMesh read_obj(const std::string& path);
void write_obj(const std::string& path, const TriangleMesh& mesh);

// Umbrella smoothing: v <- v + lambda (centroid(1-ring) - v), all vertices
// updated from the previous iterate. Connectivity is unchanged and the
// bounding box cannot grow.
TriangleMesh laplacian_smooth(const TriangleMesh& mesh, int iterations, double lambda);

// Binary occupancy of the mesh interior at cell centers, by x-ray parity.
// The mesh must be closed for the parity test to be meaningful.
VoxelGrid voxelize_mesh(const TriangleMesh& mesh, int64_t res, const Aabb& domain);

}  // namespace tensorformer
