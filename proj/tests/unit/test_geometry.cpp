#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "tensorformer/marching_cubes.hpp"
#include "tensorformer/mesh.hpp"
#include "tensorformer/metrics.hpp"
#include "tensorformer/oracle.hpp"
#include "tensorformer/pointcloud.hpp"
#include "tensorformer/sampling.hpp"

using namespace tensorformer;

namespace {

// clamped signed-distance occupancy: smooth across the surface, 1 inside
VoxelGrid sdf_occupancy_field(const ShapeOracle& oracle, int64_t res) {
  VoxelGrid g = VoxelGrid::over_box(res, unit_cube());
  const double band = 2.0 * g.h;
  for (int64_t x = 0; x < res; ++x)
    for (int64_t y = 0; y < res; ++y)
      for (int64_t z = 0; z < res; ++z) {
        const double sd = oracle.signed_distance(g.cell_center(x, y, z));
        g.at(x, y, z) = 0.5 - 0.5 * std::clamp(sd / band, -1.0, 1.0);
      }
  return g;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("shape spec parsing round-trips") {
  const char* specs[] = {
      "sphere(0.4)",
      "box(0.3,0.25,0.2)",
      "torus(0.3,0.1)",
      "union(sphere(0.3),box(0.2,0.2,0.2,0.25,0,0))",
      "difference(sphere(0.4),sphere(0.25,0.2,0,0))",
  };
  for (const char* s : specs) {
    const ShapeOracle oracle = ShapeOracle::parse(s);
    const ShapeOracle again = ShapeOracle::parse(oracle.to_string());
    CHECK(again.to_string() == oracle.to_string());
  }
  CHECK_THROWS_AS(ShapeOracle::parse("pyramid(1)"), ConfigError);
  CHECK_THROWS_AS(ShapeOracle::parse("sphere(0.4) junk"), ConfigError);
  CHECK_THROWS_AS(ShapeOracle::parse("sphere(-1)"), ConfigError);
}

TEST_CASE("occupancy labels for primitives") {
  const ShapeOracle sphere = ShapeOracle::sphere(0.4);
  CHECK(sphere.occupied({0, 0, 0}));
  CHECK(!sphere.occupied({1, 1, 1}));

  const ShapeOracle box = ShapeOracle::box({0.3, 0.3, 0.3});
  CHECK(box.occupied({0.29, 0, 0}));
  CHECK(!box.occupied({0.31, 0, 0}));

  const ShapeOracle torus = ShapeOracle::torus(0.3, 0.1);
  CHECK(torus.occupied({0.3, 0, 0}));
  CHECK(!torus.occupied({0, 0, 0}));
}

TEST_CASE("union occupancy equals the set union on a 32^3 grid") {
  const ShapeOracle a = ShapeOracle::sphere(0.3, {-0.1, 0, 0});
  const ShapeOracle b = ShapeOracle::box({0.2, 0.15, 0.1}, {0.2, 0, 0});
  const ShapeOracle u = ShapeOracle::unite(a, b);
  const VoxelGrid ga = oracle_occupancy_grid(a, 32);
  const VoxelGrid gb = oracle_occupancy_grid(b, 32);
  const VoxelGrid gu = oracle_occupancy_grid(u, 32);
  for (size_t i = 0; i < gu.values.size(); ++i)
    CHECK(gu.values[i] == std::max(ga.values[i], gb.values[i]));
}

TEST_CASE("surface sampling examples") {
  SUBCASE("noiseless sphere points sit on the sphere") {
    Rng rng(1);
    const PointCloud cloud = ShapeOracle::sphere(0.4).sample_surface(500, 0.0, rng);
    for (const Vec3& p : cloud.points)
      CHECK(std::abs(p.norm() - 0.4) < 1e-12);
  }
  SUBCASE("noisy sphere radius mean stays within the statistical band") {
    Rng rng(2);
    const PointCloud cloud = ShapeOracle::sphere(0.4).sample_surface(3000, 0.01, rng);
    double mean = 0;
    for (const Vec3& p : cloud.points) mean += p.norm();
    mean /= static_cast<double>(cloud.size());
    CHECK(mean > 0.39);
    CHECK(mean < 0.41);
  }
  SUBCASE("noiseless box points lie on exactly one face") {
    Rng rng(3);
    const Vec3 half{0.3, 0.25, 0.2};
    const PointCloud cloud = ShapeOracle::box(half).sample_surface(500, 0.0, rng);
    for (const Vec3& p : cloud.points) {
      int on_faces = 0;
      for (int a = 0; a < 3; ++a) {
        CHECK(std::abs(p[a]) <= half[a] + 1e-12);
        if (std::abs(std::abs(p[a]) - half[a]) < 1e-12) ++on_faces;
      }
      CHECK(on_faces == 1);
    }
  }
  SUBCASE("noiseless torus points satisfy the surface equation") {
    Rng rng(4);
    const ShapeOracle torus = ShapeOracle::torus(0.3, 0.1);
    const PointCloud cloud = torus.sample_surface(500, 0.0, rng);
    for (const Vec3& p : cloud.points)
      CHECK(std::abs(torus.signed_distance(p)) < 1e-12);
  }
  SUBCASE("union sampling avoids swallowed surface") {
    Rng rng(5);
    const ShapeOracle u =
        ShapeOracle::unite(ShapeOracle::sphere(0.3), ShapeOracle::sphere(0.2, {0.15, 0, 0}));
    const PointCloud cloud = u.sample_surface(400, 0.0, rng);
    for (const Vec3& p : cloud.points) CHECK(std::abs(u.signed_distance(p)) < 1e-9);
  }
  SUBCASE("fully swallowed composite raises") {
    Rng rng(6);
    const ShapeOracle hollow =
        ShapeOracle::subtract(ShapeOracle::sphere(0.2), ShapeOracle::sphere(0.4));
    CHECK_THROWS_AS(hollow.sample_surface(10, 0.0, rng), NumericError);
  }
}

TEST_CASE("sampling determinism per seed") {
  const ShapeOracle sphere = ShapeOracle::sphere(0.4);
  Rng a(99), b(99);
  const PointCloud ca = sphere.sample_surface(100, 0.005, a);
  const PointCloud cb = sphere.sample_surface(100, 0.005, b);
  for (int64_t i = 0; i < 100; ++i) {
    CHECK(ca.points[static_cast<size_t>(i)].x == cb.points[static_cast<size_t>(i)].x);
    CHECK(ca.points[static_cast<size_t>(i)].y == cb.points[static_cast<size_t>(i)].y);
    CHECK(ca.points[static_cast<size_t>(i)].z == cb.points[static_cast<size_t>(i)].z);
  }
}

TEST_CASE("morphology basics") {
  VoxelGrid g = VoxelGrid::create(8, 8, 8, {0, 0, 0}, 1.0);
  g.at(4, 4, 4) = 1.0;

  const VoxelGrid eroded = morphology(g, MorphOp::Erode);
  CHECK(eroded.count_equal(1.0) == 0);

  const VoxelGrid dilated = morphology(g, MorphOp::Dilate);
  CHECK(dilated.count_equal(1.0) == 7);
  CHECK(dilated.at(4, 4, 4) == 1.0);
  CHECK(dilated.at(3, 4, 4) == 1.0);
  CHECK(dilated.at(5, 4, 4) == 1.0);
  CHECK(dilated.at(4, 3, 4) == 1.0);
  CHECK(dilated.at(4, 5, 4) == 1.0);
  CHECK(dilated.at(4, 4, 3) == 1.0);
  CHECK(dilated.at(4, 4, 5) == 1.0);

  VoxelGrid bad = g;
  bad.at(0, 0, 0) = 0.5;
  CHECK_THROWS_AS(morphology(bad, MorphOp::Dilate), NumericError);
}

TEST_CASE("morphology set inclusions and duality on random grids") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    VoxelGrid g = VoxelGrid::create(8, 8, 8, {0, 0, 0}, 1.0);
    for (double& v : g.values) v = rng.uniform() < 0.4 ? 1.0 : 0.0;

    const VoxelGrid opened = morphology(morphology(g, MorphOp::Erode), MorphOp::Dilate);
    const VoxelGrid closed = morphology(morphology(g, MorphOp::Dilate), MorphOp::Erode);
    for (size_t i = 0; i < g.values.size(); ++i) {
      CHECK(opened.values[i] <= g.values[i]);  // opening shrinks
      CHECK(closed.values[i] >= g.values[i]);  // closing grows
    }

    // erode(G) == complement(dilate(complement(G))) away from the boundary;
    // pad by one empty cell so the outside convention cannot leak in
    VoxelGrid padded = VoxelGrid::create(10, 10, 10, {-1, -1, -1}, 1.0);
    for (int64_t x = 0; x < 8; ++x)
      for (int64_t y = 0; y < 8; ++y)
        for (int64_t z = 0; z < 8; ++z) padded.at(x + 1, y + 1, z + 1) = g.at(x, y, z);
    VoxelGrid complement = padded;
    for (double& v : complement.values) v = 1.0 - v;
    const VoxelGrid lhs = morphology(padded, MorphOp::Erode);
    VoxelGrid rhs = morphology(complement, MorphOp::Dilate);
    for (double& v : rhs.values) v = 1.0 - v;
    for (int64_t x = 1; x < 9; ++x)
      for (int64_t y = 1; y < 9; ++y)
        for (int64_t z = 1; z < 9; ++z) CHECK(lhs.at(x, y, z) == rhs.at(x, y, z));

    // dilation commutes with whole-cell translation
    VoxelGrid shifted = VoxelGrid::create(8, 8, 8, {0, 0, 0}, 1.0);
    for (int64_t x = 0; x < 7; ++x)
      for (int64_t y = 0; y < 8; ++y)
        for (int64_t z = 0; z < 8; ++z) shifted.at(x + 1, y, z) = g.at(x, y, z);
    const VoxelGrid dilate_then_shift = morphology(g, MorphOp::Dilate);
    const VoxelGrid shift_then_dilate = morphology(shifted, MorphOp::Dilate);
    for (int64_t x = 0; x < 6; ++x)  // interior only; the shift clips one slab
      for (int64_t y = 1; y < 7; ++y)
        for (int64_t z = 1; z < 7; ++z)
          CHECK(shift_then_dilate.at(x + 1, y, z) == dilate_then_shift.at(x, y, z));
  }
}

TEST_CASE("training query sampling") {
  SUBCASE("empty oracle yields no band and all-outside labels") {
    // difference of a small sphere minus a bigger one is empty
    const ShapeOracle empty =
        ShapeOracle::subtract(ShapeOracle::sphere(0.2), ShapeOracle::sphere(0.4));
    Rng rng(8);
    const QuerySet qs = query_sampling_train(empty, 64, 16, rng);
    CHECK(qs.near_surface_count == 0);
    CHECK(static_cast<int64_t>(qs.queries.size()) == 16 * 16 * 16);
    for (double label : qs.labels) CHECK(label == 0.0);
  }
  SUBCASE("sphere band size and near-surface distances") {
    const ShapeOracle sphere = ShapeOracle::sphere(0.4);
    TrainQuerySampler sampler(sphere, 64, 16);
    CHECK(sampler.band_cell_count() >= 4000);
    CHECK(sampler.band_cell_count() <= 16000);

    Rng rng(9);
    const QuerySet qs = sampler.sample(rng);
    const double cell_diag = std::sqrt(3.0) / 64.0;
    for (int64_t i = 0; i < qs.near_surface_count; ++i)
      CHECK(std::abs(sphere.signed_distance(qs.queries[static_cast<size_t>(i)])) <=
            2.0 * cell_diag);
    // labels are the exact oracle
    for (size_t i = 0; i < qs.queries.size(); ++i)
      CHECK(qs.labels[i] == (sphere.occupied(qs.queries[i]) ? 1.0 : 0.0));
  }
}

TEST_CASE("farthest point sampling") {
  SUBCASE("m = N covers every index") {
    Rng rng(10);
    PointCloud cloud;
    for (int i = 0; i < 12; ++i)
      cloud.points.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    auto idx = farthest_point_sample(cloud, 12, 3);
    std::sort(idx.begin(), idx.end());
    for (int64_t i = 0; i < 12; ++i) CHECK(idx[static_cast<size_t>(i)] == i);
  }
  SUBCASE("square corners: second pick is the diagonal") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    const auto idx = farthest_point_sample_from(cloud, 2, 0);
    CHECK(idx[0] == 0);
    CHECK(idx[1] == 2);
  }
  SUBCASE("max-min spread beats random subsets") {
    Rng rng(11);
    PointCloud cloud;
    for (int i = 0; i < 100; ++i)
      cloud.points.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    const auto min_pairwise = [&](const std::vector<int64_t>& subset) {
      double best = 1e18;
      for (size_t i = 0; i < subset.size(); ++i)
        for (size_t j = i + 1; j < subset.size(); ++j)
          best = std::min(best, (cloud.points[static_cast<size_t>(subset[i])] -
                                 cloud.points[static_cast<size_t>(subset[j])])
                                    .norm());
      return best;
    };
    const double fps_spread = min_pairwise(farthest_point_sample(cloud, 10, 0));
    std::vector<double> random_spreads;
    for (uint64_t seed = 0; seed < 20; ++seed) {
      Rng pick(seed);
      std::vector<int64_t> subset;
      while (subset.size() < 10) {
        const int64_t c = static_cast<int64_t>(pick.below(100));
        if (std::find(subset.begin(), subset.end(), c) == subset.end()) subset.push_back(c);
      }
      random_spreads.push_back(min_pairwise(subset));
    }
    std::sort(random_spreads.begin(), random_spreads.end());
    CHECK(fps_spread >= random_spreads[10]);
    CHECK_THROWS_AS(farthest_point_sample(cloud, 101, 0), NumericError);
  }
}

TEST_CASE("marching cubes on trivial and analytic fields") {
  SUBCASE("uniform zero field gives an empty mesh") {
    VoxelGrid g = VoxelGrid::create(8, 8, 8, {0, 0, 0}, 0.1);
    CHECK(marching_cubes(g, 0.5).empty());
  }
  SUBCASE("sphere field: closed, near-surface, right area, euler 2") {
    const ShapeOracle sphere = ShapeOracle::sphere(0.4);
    const VoxelGrid field = sdf_occupancy_field(sphere, 64);
    TriangleMesh mesh = marching_cubes(field, 0.5);
    REQUIRE(!mesh.empty());
    CHECK(mesh.is_closed());
    CHECK(mesh.euler_characteristic() == 2);
    const double cell_diag = std::sqrt(3.0) / 64.0;
    for (const Vec3& v : mesh.vertices)
      CHECK(std::abs(v.norm() - 0.4) <= cell_diag);
    const double sphere_area = 4.0 * 3.14159265358979 * 0.4 * 0.4;
    CHECK(mesh.area() > 0.85 * sphere_area);
    CHECK(mesh.area() < 1.15 * sphere_area);
    // outward orientation: positive enclosed volume near 4/3 pi r^3
    CHECK(mesh.signed_volume() > 0.9 * 4.0 / 3.0 * 3.14159265358979 * 0.064);
  }
  SUBCASE("box field is closed with euler 2") {
    const VoxelGrid field = sdf_occupancy_field(ShapeOracle::box({0.3, 0.25, 0.2}), 48);
    TriangleMesh mesh = marching_cubes(field, 0.5);
    CHECK(mesh.is_closed());
    CHECK(mesh.euler_characteristic() == 2);
  }
  SUBCASE("torus field is closed with euler 0") {
    const VoxelGrid field = sdf_occupancy_field(ShapeOracle::torus(0.3, 0.12), 64);
    TriangleMesh mesh = marching_cubes(field, 0.5);
    CHECK(mesh.is_closed());
    CHECK(mesh.euler_characteristic() == 0);
  }
  SUBCASE("iso outside the value range is empty, not an error") {
    const VoxelGrid field = sdf_occupancy_field(ShapeOracle::sphere(0.4), 16);
    CHECK(marching_cubes(field, 2.0).empty());
  }
}

TEST_CASE("marching cubes round-trip iou against the oracle grid") {
  const ShapeOracle sphere = ShapeOracle::sphere(0.4);
  const TriangleMesh mesh = marching_cubes(sdf_occupancy_field(sphere, 64), 0.5);
  const VoxelGrid revoxelized = voxelize_mesh(mesh, 64, unit_cube());
  const VoxelGrid truth = oracle_occupancy_grid(sphere, 64);
  CHECK(iou(revoxelized, truth) > 0.95);

  const ShapeOracle box = ShapeOracle::box({0.3, 0.25, 0.2});
  const TriangleMesh box_mesh = marching_cubes(sdf_occupancy_field(box, 64), 0.5);
  CHECK(iou(voxelize_mesh(box_mesh, 64, unit_cube()), oracle_occupancy_grid(box, 64)) > 0.95);
}

TEST_CASE("laplacian smoothing") {
  SUBCASE("regular tetrahedron contracts toward the centroid") {
    TriangleMesh tet;
    tet.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    tet.triangles = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    const TriangleMesh smoothed = laplacian_smooth(tet, 1, 1.0);
    // each vertex moves to the centroid of the other three: -v/3
    for (size_t v = 0; v < 4; ++v)
      for (int a = 0; a < 3; ++a)
        CHECK(smoothed.vertices[v][a] ==
              doctest::Approx(-tet.vertices[v][a] / 3.0).epsilon(1e-12));
    Vec3 centroid{};
    for (const Vec3& v : smoothed.vertices) centroid += v;
    CHECK(centroid.norm() < 1e-12);
    CHECK(smoothed.bounding_box().max_side() < tet.bounding_box().max_side());
  }
  SUBCASE("zero iterations is the identity") {
    TriangleMesh tet;
    tet.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    tet.triangles = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    const TriangleMesh same = laplacian_smooth(tet, 0, 0.5);
    for (size_t v = 0; v < 4; ++v)
      for (int a = 0; a < 3; ++a) CHECK(same.vertices[v][a] == tet.vertices[v][a]);
    CHECK_THROWS_AS(laplacian_smooth(tet, 1, 0.0), NumericError);
    CHECK_THROWS_AS(laplacian_smooth(tet, 1, 1.5), NumericError);
  }
  SUBCASE("sphere mesh area decreases monotonically, bbox never grows") {
    const TriangleMesh sphere =
        marching_cubes(sdf_occupancy_field(ShapeOracle::sphere(0.4), 32), 0.5);
    TriangleMesh current = sphere;
    double prev_area = current.area();
    const double bbox0 = current.bounding_box().max_side();
    for (int i = 0; i < 10; ++i) {
      current = laplacian_smooth(current, 1, 0.5);
      const double area = current.area();
      CHECK(area < prev_area);
      CHECK(current.bounding_box().max_side() <= bbox0 + 1e-12);
      prev_area = area;
    }
    CHECK(current.triangle_count() == sphere.triangle_count());
  }
}

TEST_CASE("file io round-trips and failure modes") {
  const auto dir = std::filesystem::temp_directory_path();
  SUBCASE("obj") {
    TriangleMesh tet;
    tet.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    tet.triangles = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    const std::string path = (dir / "tf_test.obj").string();
    write_obj(path, tet);
    const TriangleMesh back = read_obj(path);
    REQUIRE(back.vertex_count() == 4);
    REQUIRE(back.triangle_count() == 4);
    for (size_t v = 0; v < 4; ++v)
      for (int a = 0; a < 3; ++a) CHECK(back.vertices[v][a] == tet.vertices[v][a]);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_obj((dir / "tf_missing.obj").string()), IoError);
  }
  SUBCASE("xyz") {
    PointCloud cloud;
    cloud.points = {{0.125, -2.5, 3.75}, {1, 2, 3}};
    const std::string path = (dir / "tf_test.xyz").string();
    write_xyz(path, cloud);
    const PointCloud back = read_xyz(path);
    REQUIRE(back.size() == 2);
    for (int64_t i = 0; i < 2; ++i)
      for (int a = 0; a < 3; ++a)
        CHECK(back.points[static_cast<size_t>(i)][a] == cloud.points[static_cast<size_t>(i)][a]);
    std::filesystem::remove(path);
  }
  SUBCASE("grid") {
    VoxelGrid g = VoxelGrid::create(2, 3, 4, {-0.5, 0.25, 0}, 0.125);
    for (size_t i = 0; i < g.values.size(); ++i) g.values[i] = static_cast<double>(i) * 0.5;
    const std::string path = (dir / "tf_test.grid").string();
    write_grid(path, g);
    const VoxelGrid back = read_grid(path);
    CHECK(back.same_geometry(g));
    for (size_t i = 0; i < g.values.size(); ++i) CHECK(back.values[i] == g.values[i]);
    std::filesystem::remove(path);
  }
}

TEST_CASE("unit cube transform normalizes and inverts") {
  PointCloud cloud;
  cloud.points = {{1, 2, 3}, {2, 4, 3.5}, {1.5, 3, 5}};
  const UnitCubeTransform tr = UnitCubeTransform::from(cloud.bounding_box());
  const PointCloud normalized = tr.apply(cloud);
  const Aabb box = normalized.bounding_box();
  CHECK(box.max_side() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(box.center().norm() < 1e-12);
  for (int64_t i = 0; i < cloud.size(); ++i) {
    const Vec3 round = tr.invert(normalized.points[static_cast<size_t>(i)]);
    CHECK((round - cloud.points[static_cast<size_t>(i)]).norm() < 1e-12);
  }
}

}  // TEST_SUITE
