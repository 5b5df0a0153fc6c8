#include "tensorformer/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tensorformer/common.hpp"

namespace tensorformer {

double TriangleMesh::triangle_area(int64_t t) const {
  const auto& tri = triangles[static_cast<size_t>(t)];
  const Vec3& a = vertices[static_cast<size_t>(tri[0])];
  const Vec3& b = vertices[static_cast<size_t>(tri[1])];
  const Vec3& c = vertices[static_cast<size_t>(tri[2])];
  return 0.5 * (b - a).cross(c - a).norm();
}

double TriangleMesh::area() const {
  double acc = 0.0;
  for (int64_t t = 0; t < triangle_count(); ++t) acc += triangle_area(t);
  return acc;
}

Vec3 TriangleMesh::face_normal(int64_t t) const {
  const auto& tri = triangles[static_cast<size_t>(t)];
  const Vec3& a = vertices[static_cast<size_t>(tri[0])];
  const Vec3& b = vertices[static_cast<size_t>(tri[1])];
  const Vec3& c = vertices[static_cast<size_t>(tri[2])];
  return (b - a).cross(c - a).normalized();
}

double TriangleMesh::signed_volume() const {
  double acc = 0.0;
  for (const auto& tri : triangles) {
    const Vec3& a = vertices[static_cast<size_t>(tri[0])];
    const Vec3& b = vertices[static_cast<size_t>(tri[1])];
    const Vec3& c = vertices[static_cast<size_t>(tri[2])];
    acc += a.dot(b.cross(c)) / 6.0;
  }
  return acc;
}

std::vector<Vec3> TriangleMesh::vertex_normals() const {
  std::vector<Vec3> normals(vertices.size());
  for (const auto& tri : triangles) {
    const Vec3& a = vertices[static_cast<size_t>(tri[0])];
    const Vec3& b = vertices[static_cast<size_t>(tri[1])];
    const Vec3& c = vertices[static_cast<size_t>(tri[2])];
    const Vec3 weighted = (b - a).cross(c - a) * 0.5;  // area-weighted
    for (int64_t v : tri) normals[static_cast<size_t>(v)] += weighted;
  }
  for (Vec3& n : normals) n = n.normalized();
  return normals;
}

Aabb TriangleMesh::bounding_box() const {
  Aabb box;
  for (const Vec3& v : vertices) box.extend(v);
  return box;
}

namespace {
std::map<std::pair<int64_t, int64_t>, int> edge_counts(const TriangleMesh& mesh) {
  std::map<std::pair<int64_t, int64_t>, int> counts;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int64_t a = tri[static_cast<size_t>(e)], b = tri[static_cast<size_t>((e + 1) % 3)];
      if (a > b) std::swap(a, b);
      ++counts[{a, b}];
    }
  return counts;
}
}  // namespace

int64_t TriangleMesh::unique_edge_count() const {
  return static_cast<int64_t>(edge_counts(*this).size());
}

bool TriangleMesh::is_closed() const {
  if (empty()) return false;
  for (const auto& [edge, count] : edge_counts(*this))
    if (count != 2) return false;
  return true;
}

int64_t TriangleMesh::euler_characteristic() const {
  return vertex_count() - unique_edge_count() + triangle_count();
}

void TriangleMesh::remove_degenerate_triangles(double area_eps) {
  std::vector<std::array<int64_t, 3>> kept;
  kept.reserve(triangles.size());
  for (int64_t t = 0; t < triangle_count(); ++t) {
    const auto& tri = triangles[static_cast<size_t>(t)];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
    if (triangle_area(t) <= area_eps) continue;
    kept.push_back(tri);
  }
  triangles = std::move(kept);
}

TriangleMesh read_obj(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read mesh: " + path);
  TriangleMesh mesh;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z))
        throw IoError("malformed vertex at " + path + ":" + std::to_string(line_no));
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::array<int64_t, 3> tri{};
      std::string tok;
      for (int i = 0; i < 3; ++i) {
        if (!(ls >> tok))
          throw IoError("malformed face at " + path + ":" + std::to_string(line_no));
        // accept "v", "v/vt", "v//vn" forms; only the vertex index is used
        tri[static_cast<size_t>(i)] = std::stoll(tok.substr(0, tok.find('/'))) - 1;
        if (tri[static_cast<size_t>(i)] < 0 ||
            tri[static_cast<size_t>(i)] >= mesh.vertex_count())
          throw IoError("face index out of range at " + path + ":" + std::to_string(line_no));
      }
      std::string extra;
      if (ls >> extra)
        throw IoError("non-triangular face at " + path + ":" + std::to_string(line_no));
      mesh.triangles.push_back(tri);
    }
  }
  return mesh;
}

void write_obj(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write mesh: " + path);
  char buf[160];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    os << buf;
  }
  for (const auto& tri : mesh.triangles) {
    std::snprintf(buf, sizeof buf, "f %lld %lld %lld\n", static_cast<long long>(tri[0] + 1),
                  static_cast<long long>(tri[1] + 1), static_cast<long long>(tri[2] + 1));
    os << buf;
  }
  if (!os) throw IoError("failed writing mesh: " + path);
}

TriangleMesh laplacian_smooth(const TriangleMesh& mesh, int iterations, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw NumericError("laplacian_smooth: lambda must lie in (0, 1]");
  std::vector<std::vector<int64_t>> ring(mesh.vertices.size());
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      const int64_t a = tri[static_cast<size_t>(e)], b = tri[static_cast<size_t>((e + 1) % 3)];
      ring[static_cast<size_t>(a)].push_back(b);
      ring[static_cast<size_t>(b)].push_back(a);
    }
  for (auto& nb : ring) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }

  TriangleMesh out = mesh;
  std::vector<Vec3> next(out.vertices.size());
  for (int it = 0; it < iterations; ++it) {
    for (size_t v = 0; v < out.vertices.size(); ++v) {
      if (ring[v].empty()) {
        next[v] = out.vertices[v];
        continue;
      }
      Vec3 centroid{};
      for (int64_t nb : ring[v]) centroid += out.vertices[static_cast<size_t>(nb)];
      centroid = centroid / static_cast<double>(ring[v].size());
      next[v] = out.vertices[v] + (centroid - out.vertices[v]) * lambda;
    }
    out.vertices.swap(next);
  }
  return out;
}

VoxelGrid voxelize_mesh(const TriangleMesh& mesh, int64_t res, const Aabb& domain) {
  VoxelGrid grid = VoxelGrid::over_box(res, domain);
  if (mesh.empty()) return grid;

  // Parity ray casting along +x per (iy, iz) row. Crossing x positions are
  // found per triangle via the plane equation; rows are jittered off exact
  // edges by a fixed sub-cell offset.
  const double jy = grid.h * 1e-4, jz = grid.h * 2e-4;
  std::vector<std::vector<double>> crossings(static_cast<size_t>(grid.ny * grid.nz));

  for (const auto& tri : mesh.triangles) {
    const Vec3& a = mesh.vertices[static_cast<size_t>(tri[0])];
    const Vec3& b = mesh.vertices[static_cast<size_t>(tri[1])];
    const Vec3& c = mesh.vertices[static_cast<size_t>(tri[2])];
    const double ylo = std::min({a.y, b.y, c.y}), yhi = std::max({a.y, b.y, c.y});
    const double zlo = std::min({a.z, b.z, c.z}), zhi = std::max({a.z, b.z, c.z});
    const auto row_range = [&](double lo, double hi, double base, double jitter,
                               int64_t count) {
      const int64_t first =
          std::max<int64_t>(0, static_cast<int64_t>(std::ceil((lo - base - jitter) / grid.h - 0.5)));
      const int64_t last = std::min<int64_t>(
          count - 1, static_cast<int64_t>(std::floor((hi - base - jitter) / grid.h - 0.5)));
      return std::pair<int64_t, int64_t>{first, last};
    };
    const auto [y0, y1] = row_range(ylo, yhi, grid.origin.y, jy, grid.ny);
    const auto [z0, z1] = row_range(zlo, zhi, grid.origin.z, jz, grid.nz);
    for (int64_t iy = y0; iy <= y1; ++iy)
      for (int64_t iz = z0; iz <= z1; ++iz) {
        const double ry = grid.origin.y + (static_cast<double>(iy) + 0.5) * grid.h + jy;
        const double rz = grid.origin.z + (static_cast<double>(iz) + 0.5) * grid.h + jz;
        // 2-D point-in-triangle in the yz projection
        const double d1 = (b.y - a.y) * (rz - a.z) - (b.z - a.z) * (ry - a.y);
        const double d2 = (c.y - b.y) * (rz - b.z) - (c.z - b.z) * (ry - b.y);
        const double d3 = (a.y - c.y) * (rz - c.z) - (a.z - c.z) * (ry - c.y);
        const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
        const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
        if (neg && pos) continue;
        const Vec3 n = (b - a).cross(c - a);
        if (std::abs(n.x) < 1e-300) continue;  // ray parallel to the face
        const double x = a.x - (n.y * (ry - a.y) + n.z * (rz - a.z)) / n.x;
        crossings[static_cast<size_t>(iy * grid.nz + iz)].push_back(x);
      }
  }

  for (int64_t iy = 0; iy < grid.ny; ++iy)
    for (int64_t iz = 0; iz < grid.nz; ++iz) {
      auto& xs = crossings[static_cast<size_t>(iy * grid.nz + iz)];
      if (xs.empty()) continue;
      std::sort(xs.begin(), xs.end());
      for (int64_t ix = 0; ix < grid.nx; ++ix) {
        const double cx = grid.origin.x + (static_cast<double>(ix) + 0.5) * grid.h;
        const size_t below =
            static_cast<size_t>(std::upper_bound(xs.begin(), xs.end(), cx) - xs.begin());
        if (below % 2 == 1) grid.at(ix, iy, iz) = 1.0;
      }
    }
  return grid;
}

}  // namespace tensorformer
