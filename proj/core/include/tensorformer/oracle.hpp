#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "tensorformer/common.hpp"
#include "tensorformer/pointcloud.hpp"
#include "tensorformer/rng.hpp"
#include "tensorformer/vec3.hpp"

namespace tensorformer {

// Analytic solid with an exact in/out test, used as ground truth in place of
// mesh datasets. Coordinates are normalized units; shapes are expected to
// fit in the unit cube centered at the origin.
//
// Spec strings: sphere(r[,cx,cy,cz]), box(hx,hy,hz[,cx,cy,cz]),
// torus(R,r[,cx,cy,cz]), union(a,b), difference(a,b).
class ShapeOracle {
 public:
  enum class Kind { Sphere, Box, Torus, Union, Difference };

  static ShapeOracle sphere(double radius, Vec3 center = {});
  static ShapeOracle box(Vec3 half_extent, Vec3 center = {});
  static ShapeOracle torus(double major_radius, double minor_radius, Vec3 center = {});
  static ShapeOracle unite(ShapeOracle a, ShapeOracle b);
  static ShapeOracle subtract(ShapeOracle a, ShapeOracle b);

  static ShapeOracle parse(std::string_view spec);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  bool occupied(const Vec3& p) const;
  // Negative inside. Exact for primitives, a conservative bound for
  // composites (good enough for reference meshing and band checks).
  double signed_distance(const Vec3& p) const;
  Aabb bounding_box() const;
  double surface_area() const;

  // Uniform point on the visible boundary (rejection sampling for
  // composites). Throws if the composite exposes no surface.
  Vec3 sample_surface_point(Rng& rng) const;
  // n surface points with isotropic Gaussian noise of the given stddev.
  PointCloud sample_surface(int64_t n, double noise_std, Rng& rng) const;

 private:
  Kind kind_ = Kind::Sphere;
  Vec3 center_{};
  Vec3 half_{};                 // box
  double major_ = 0, minor_ = 0;  // sphere radius in major_; torus radii
  std::shared_ptr<const ShapeOracle> left_, right_;
};

// Exact occupancy labels (1 inside, 0 outside) for arbitrary query points.
std::vector<double> occupancy_labels(const ShapeOracle& oracle, std::span<const Vec3> queries);

}  // namespace tensorformer
