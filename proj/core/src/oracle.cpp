#include "tensorformer/oracle.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "tensorformer/common.hpp"

namespace tensorformer {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;
}

ShapeOracle ShapeOracle::sphere(double radius, Vec3 center) {
  if (radius <= 0) throw ConfigError("sphere: radius must be positive");
  ShapeOracle s;
  s.kind_ = Kind::Sphere;
  s.major_ = radius;
  s.center_ = center;
  return s;
}

ShapeOracle ShapeOracle::box(Vec3 half_extent, Vec3 center) {
  if (half_extent.x <= 0 || half_extent.y <= 0 || half_extent.z <= 0)
    throw ConfigError("box: half extents must be positive");
  ShapeOracle s;
  s.kind_ = Kind::Box;
  s.half_ = half_extent;
  s.center_ = center;
  return s;
}

ShapeOracle ShapeOracle::torus(double major_radius, double minor_radius, Vec3 center) {
  if (major_radius <= 0 || minor_radius <= 0 || minor_radius >= major_radius)
    throw ConfigError("torus: need 0 < minor < major");
  ShapeOracle s;
  s.kind_ = Kind::Torus;
  s.major_ = major_radius;
  s.minor_ = minor_radius;
  s.center_ = center;
  return s;
}

ShapeOracle ShapeOracle::unite(ShapeOracle a, ShapeOracle b) {
  ShapeOracle s;
  s.kind_ = Kind::Union;
  s.left_ = std::make_shared<ShapeOracle>(std::move(a));
  s.right_ = std::make_shared<ShapeOracle>(std::move(b));
  return s;
}

ShapeOracle ShapeOracle::subtract(ShapeOracle a, ShapeOracle b) {
  ShapeOracle s;
  s.kind_ = Kind::Difference;
  s.left_ = std::make_shared<ShapeOracle>(std::move(a));
  s.right_ = std::make_shared<ShapeOracle>(std::move(b));
  return s;
}

bool ShapeOracle::occupied(const Vec3& p) const {
  switch (kind_) {
    case Kind::Sphere:
      return (p - center_).squared_norm() < major_ * major_;
    case Kind::Box: {
      const Vec3 d = p - center_;
      return std::abs(d.x) < half_.x && std::abs(d.y) < half_.y && std::abs(d.z) < half_.z;
    }
    case Kind::Torus: {
      const Vec3 d = p - center_;
      const double ring = std::sqrt(d.x * d.x + d.y * d.y) - major_;
      return ring * ring + d.z * d.z < minor_ * minor_;
    }
    case Kind::Union:
      return left_->occupied(p) || right_->occupied(p);
    case Kind::Difference:
      return left_->occupied(p) && !right_->occupied(p);
  }
  return false;
}

double ShapeOracle::signed_distance(const Vec3& p) const {
  switch (kind_) {
    case Kind::Sphere:
      return (p - center_).norm() - major_;
    case Kind::Box: {
      const Vec3 d = p - center_;
      const Vec3 q{std::abs(d.x) - half_.x, std::abs(d.y) - half_.y, std::abs(d.z) - half_.z};
      const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
      return outside.norm() + std::min(std::max({q.x, q.y, q.z}), 0.0);
    }
    case Kind::Torus: {
      const Vec3 d = p - center_;
      const double ring = std::sqrt(d.x * d.x + d.y * d.y) - major_;
      return std::sqrt(ring * ring + d.z * d.z) - minor_;
    }
    case Kind::Union:
      return std::min(left_->signed_distance(p), right_->signed_distance(p));
    case Kind::Difference:
      return std::max(left_->signed_distance(p), -right_->signed_distance(p));
  }
  return 0.0;
}

Aabb ShapeOracle::bounding_box() const {
  Aabb b;
  switch (kind_) {
    case Kind::Sphere:
      b.extend(center_ - Vec3{major_, major_, major_});
      b.extend(center_ + Vec3{major_, major_, major_});
      break;
    case Kind::Box:
      b.extend(center_ - half_);
      b.extend(center_ + half_);
      break;
    case Kind::Torus: {
      const double r = major_ + minor_;
      b.extend(center_ - Vec3{r, r, minor_});
      b.extend(center_ + Vec3{r, r, minor_});
      break;
    }
    case Kind::Union:
      b = left_->bounding_box();
      b.extend(right_->bounding_box());
      break;
    case Kind::Difference:
      b = left_->bounding_box();
      break;
  }
  return b;
}

double ShapeOracle::surface_area() const {
  switch (kind_) {
    case Kind::Sphere:
      return 2.0 * two_pi * major_ * major_;
    case Kind::Box:
      return 8.0 * (half_.x * half_.y + half_.y * half_.z + half_.z * half_.x);
    case Kind::Torus:
      return two_pi * two_pi * major_ * minor_;
    case Kind::Union:
    case Kind::Difference:
      return left_->surface_area() + right_->surface_area();
  }
  return 0.0;
}

namespace {

Vec3 uniform_direction(Rng& rng) {
  Vec3 v;
  double n2;
  do {
    v = {rng.normal(), rng.normal(), rng.normal()};
    n2 = v.squared_norm();
  } while (n2 < 1e-24);
  return v / std::sqrt(n2);
}

Vec3 sample_primitive_surface(const ShapeOracle& s, Rng& rng);

// point on the composite boundary: propose on a child boundary weighted by
// child area, keep if it lies on the boundary of the composite
Vec3 sample_composite_surface(const ShapeOracle& s, const ShapeOracle& a, const ShapeOracle& b,
                              bool difference, Rng& rng) {
  const double area_a = a.surface_area();
  const double total = area_a + b.surface_area();
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const bool from_a = rng.uniform() * total < area_a;
    const ShapeOracle& src = from_a ? a : b;
    const Vec3 p = src.sample_surface_point(rng);
    if (!difference) {
      if (!(from_a ? b.occupied(p) : a.occupied(p))) return p;
    } else {
      if (from_a ? !b.occupied(p) : a.occupied(p)) return p;
    }
  }
  throw NumericError("composite shape exposes no surface to sample: " + s.to_string());
}

Vec3 sample_primitive_surface(const ShapeOracle& s, Rng& rng) {
  return s.sample_surface_point(rng);
}

}  // namespace

Vec3 ShapeOracle::sample_surface_point(Rng& rng) const {
  switch (kind_) {
    case Kind::Sphere:
      return center_ + uniform_direction(rng) * major_;
    case Kind::Box: {
      const double ax = half_.y * half_.z, ay = half_.x * half_.z, az = half_.x * half_.y;
      const double pick = rng.uniform() * (ax + ay + az);
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double u = rng.uniform(-1.0, 1.0), v = rng.uniform(-1.0, 1.0);
      Vec3 p;
      if (pick < ax) {
        p = {sign * half_.x, u * half_.y, v * half_.z};
      } else if (pick < ax + ay) {
        p = {u * half_.x, sign * half_.y, v * half_.z};
      } else {
        p = {u * half_.x, v * half_.y, sign * half_.z};
      }
      return center_ + p;
    }
    case Kind::Torus: {
      // acceptance on the tube angle keeps the measure uniform in area
      for (;;) {
        const double u = rng.uniform() * two_pi;
        const double v = rng.uniform() * two_pi;
        const double accept = (major_ + minor_ * std::cos(v)) / (major_ + minor_);
        if (rng.uniform() <= accept) {
          const double ring = major_ + minor_ * std::cos(v);
          return center_ +
                 Vec3{ring * std::cos(u), ring * std::sin(u), minor_ * std::sin(v)};
        }
      }
    }
    case Kind::Union:
      return sample_composite_surface(*this, *left_, *right_, false, rng);
    case Kind::Difference:
      return sample_composite_surface(*this, *left_, *right_, true, rng);
  }
  return {};
}

PointCloud ShapeOracle::sample_surface(int64_t n, double noise_std, Rng& rng) const {
  if (n < 1) throw NumericError("sample_surface: n must be >= 1");
  PointCloud cloud;
  cloud.points.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    Vec3 p = sample_surface_point(rng);
    if (noise_std > 0) {
      p.x += rng.normal(0.0, noise_std);
      p.y += rng.normal(0.0, noise_std);
      p.z += rng.normal(0.0, noise_std);
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

std::vector<double> occupancy_labels(const ShapeOracle& oracle, std::span<const Vec3> queries) {
  std::vector<double> labels(queries.size());
  for (size_t i = 0; i < queries.size(); ++i)
    labels[i] = oracle.occupied(queries[i]) ? 1.0 : 0.0;
  return labels;
}

// ---- spec parsing ----

namespace {

struct Parser {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c))
      throw ConfigError("shape spec: expected '" + std::string(1, c) + "' at position " +
                        std::to_string(pos) + " in '" + std::string(text) + "'");
  }
  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (start == pos) throw ConfigError("shape spec: expected a name in '" + std::string(text) + "'");
    return std::string(text.substr(start, pos - start));
  }
  double number() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '.' || text[pos] == '-' || text[pos] == '+' ||
                                 text[pos] == 'e' || text[pos] == 'E'))
      ++pos;
    try {
      return std::stod(std::string(text.substr(start, pos - start)));
    } catch (const std::exception&) {
      throw ConfigError("shape spec: bad number at position " + std::to_string(start) +
                        " in '" + std::string(text) + "'");
    }
  }

  ShapeOracle shape() {
    const std::string name = ident();
    expect('(');
    ShapeOracle result = [&]() {
      if (name == "sphere") {
        const double r = number();
        Vec3 c{};
        if (eat(',')) {
          c.x = number();
          expect(',');
          c.y = number();
          expect(',');
          c.z = number();
        }
        return ShapeOracle::sphere(r, c);
      }
      if (name == "box") {
        Vec3 h{number(), 0, 0};
        expect(',');
        h.y = number();
        expect(',');
        h.z = number();
        Vec3 c{};
        if (eat(',')) {
          c.x = number();
          expect(',');
          c.y = number();
          expect(',');
          c.z = number();
        }
        return ShapeOracle::box(h, c);
      }
      if (name == "torus") {
        const double hr = number();
        expect(',');
        const double mr = number();
        Vec3 c{};
        if (eat(',')) {
          c.x = number();
          expect(',');
          c.y = number();
          expect(',');
          c.z = number();
        }
        return ShapeOracle::torus(hr, mr, c);
      }
      if (name == "union" || name == "difference") {
        ShapeOracle a = shape();
        expect(',');
        ShapeOracle b = shape();
        return name == "union" ? ShapeOracle::unite(std::move(a), std::move(b))
                               : ShapeOracle::subtract(std::move(a), std::move(b));
      }
      throw ConfigError("shape spec: unknown shape '" + name + "'");
    }();
    expect(')');
    return result;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string center_suffix(const Vec3& c) {
  if (c.x == 0 && c.y == 0 && c.z == 0) return "";
  return "," + fmt(c.x) + "," + fmt(c.y) + "," + fmt(c.z);
}

}  // namespace

ShapeOracle ShapeOracle::parse(std::string_view spec) {
  Parser p{spec};
  ShapeOracle s = p.shape();
  p.skip_ws();
  if (p.pos != spec.size())
    throw ConfigError("shape spec: trailing characters in '" + std::string(spec) + "'");
  return s;
}

std::string ShapeOracle::to_string() const {
  switch (kind_) {
    case Kind::Sphere:
      return "sphere(" + fmt(major_) + center_suffix(center_) + ")";
    case Kind::Box:
      return "box(" + fmt(half_.x) + "," + fmt(half_.y) + "," + fmt(half_.z) +
             center_suffix(center_) + ")";
    case Kind::Torus:
      return "torus(" + fmt(major_) + "," + fmt(minor_) + center_suffix(center_) + ")";
    case Kind::Union:
      return "union(" + left_->to_string() + "," + right_->to_string() + ")";
    case Kind::Difference:
      return "difference(" + left_->to_string() + "," + right_->to_string() + ")";
  }
  return "?";
}

}  // namespace tensorformer
