#include "tensorformer/pointcloud.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tensorformer/common.hpp"

namespace tensorformer {

PointCloud read_xyz(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read point cloud: " + path);
  PointCloud cloud;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vec3 p;
    if (!(ls >> p.x >> p.y >> p.z))
      throw IoError("malformed point at " + path + ":" + std::to_string(line_no));
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_xyz(const std::string& path, const PointCloud& cloud) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write point cloud: " + path);
  char buf[128];
  for (const Vec3& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
    os << buf;
  }
  if (!os) throw IoError("failed writing point cloud: " + path);
}

std::vector<int64_t> farthest_point_sample_from(const PointCloud& cloud, int64_t m,
                                                int64_t first) {
  const int64_t n = cloud.size();
  if (m < 1 || m > n)
    throw NumericError("farthest_point_sample: m=" + std::to_string(m) +
                       " out of range for " + std::to_string(n) + " points");
  if (first < 0 || first >= n) throw NumericError("farthest_point_sample: bad first index");

  std::vector<int64_t> chosen;
  chosen.reserve(static_cast<size_t>(m));
  std::vector<double> dist2(static_cast<size_t>(n), std::numeric_limits<double>::max());
  int64_t current = first;
  chosen.push_back(current);
  for (int64_t round = 1; round < m; ++round) {
    const Vec3 c = cloud.points[static_cast<size_t>(current)];
    int64_t best = -1;
    double best_d2 = -1.0;
    for (int64_t i = 0; i < n; ++i) {
      double& d2 = dist2[static_cast<size_t>(i)];
      const double cand = (cloud.points[static_cast<size_t>(i)] - c).squared_norm();
      if (cand < d2) d2 = cand;
      if (d2 > best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    chosen.push_back(best);
    current = best;
  }
  return chosen;
}

std::vector<int64_t> farthest_point_sample(const PointCloud& cloud, int64_t m, uint64_t seed) {
  if (cloud.empty()) throw NumericError("farthest_point_sample: empty cloud");
  return farthest_point_sample_from(cloud, m,
                                    static_cast<int64_t>(seed % static_cast<uint64_t>(cloud.size())));
}

int64_t farthest_from_centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw NumericError("farthest_from_centroid: empty cloud");
  Vec3 c{};
  for (const Vec3& p : cloud.points) c += p;
  c = c / static_cast<double>(cloud.size());
  int64_t best = 0;
  double best_d2 = -1.0;
  for (int64_t i = 0; i < cloud.size(); ++i) {
    const double d2 = (cloud.points[static_cast<size_t>(i)] - c).squared_norm();
    if (d2 > best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

UnitCubeTransform UnitCubeTransform::from(const Aabb& box) {
  UnitCubeTransform t;
  t.center = box.center();
  const double side = box.max_side();
  t.scale = side > 0.0 ? 1.0 / side : 1.0;
  return t;
}

PointCloud UnitCubeTransform::apply(const PointCloud& cloud) const {
  PointCloud out;
  out.points.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) out.points.push_back(apply(p));
  return out;
}

}  // namespace tensorformer
