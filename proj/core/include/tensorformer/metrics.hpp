#pragma once

#include <cstdint>
#include <string>

#include "tensorformer/kdtree.hpp"
#include "tensorformer/mesh.hpp"
#include "tensorformer/rng.hpp"
#include "tensorformer/voxelgrid.hpp"

namespace tensorformer {

// Surface evaluation suite: Chamfer-L1, normal consistency, IoU.
//
//   CD1 = 1/(2 Nx) sum_i |x_i - S_y(x_i)|_1  +  1/(2 Ny) sum_i |y_i - S_x(y_i)|_1
//   NC  = symmetrized mean inner product of matched sample normals
//   IOU = |A and B| / |A or B|
//
// S_y(x) is the nearest point of the opposite sample set under the same
// metric used for the reported distance (Manhattan by default; L2 behind a
// flag for cross-convention comparisons).

struct SurfaceSamples {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // face normal of the sampled triangle
};

// Area-weighted triangle choice, uniform barycentric placement.
SurfaceSamples sample_mesh_surface(const TriangleMesh& mesh, int64_t n, Rng& rng);

// Point-set entry path (also used by the brute-force oracles in tests).
double chamfer_points(std::span<const Vec3> a, std::span<const Vec3> b,
                      PointMetric metric = PointMetric::L1);

double chamfer_l1(const TriangleMesh& a, const TriangleMesh& b, int64_t n, uint64_t seed,
                  PointMetric metric = PointMetric::L1);
double normal_consistency(const TriangleMesh& a, const TriangleMesh& b, int64_t n,
                          uint64_t seed);

// Binary grids with identical geometry; 1.0 when both are empty.
double iou(const VoxelGrid& a, const VoxelGrid& b);
// Detection-point path: occupancy decided per query point.
double iou_points(std::span<const double> predicted, std::span<const double> labels,
                  double iso = 0.5);

struct MetricsReport {
  double cd1 = 0.0;
  double nc = 0.0;
  double iou = 0.0;
  int64_t samples = 0;

  std::string csv_line() const;    // "cd1,nc,iou,n"
  std::string human_text() const;  // multi-line block
};

}  // namespace tensorformer
