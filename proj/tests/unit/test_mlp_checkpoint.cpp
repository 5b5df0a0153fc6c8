#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "tensorformer/checkpoint.hpp"
#include "tensorformer/grad_check.hpp"
#include "tensorformer/mlp.hpp"
#include "tensorformer/rng.hpp"

using namespace tensorformer;

TEST_SUITE("diffcore") {

TEST_CASE("mlp forward examples") {
  Rng rng(1);
  SUBCASE("identity single layer") {
    Graph g;
    Mlp net = Mlp::create(g, "net", {2, 2}, rng);
    net.set_layer(0, {1, 0, 0, 1}, {0, 0});
    Tensor y = net.forward(g.constant({1, 2}, {1, 2}));
    CHECK(y.value()[0] == 1);
    CHECK(y.value()[1] == 2);
  }
  SUBCASE("scale and bias") {
    Graph g;
    Mlp net = Mlp::create(g, "net", {2, 2}, rng);
    net.set_layer(0, {2, 0, 0, 2}, {1, 1});
    Tensor y = net.forward(g.constant({1, 2}, {1, 1}));
    CHECK(y.value()[0] == doctest::Approx(3.0));
    CHECK(y.value()[1] == doctest::Approx(3.0));
  }
  SUBCASE("relu between layers gates a dead unit") {
    Graph g;
    Mlp net = Mlp::create(g, "net", {1, 1, 1}, rng);
    net.set_layer(0, {1}, {-2});
    net.set_layer(1, {3}, {0});
    Tensor y = net.forward(g.constant({1, 1}, {1}));
    CHECK(y.value()[0] == doctest::Approx(0.0));
  }
  SUBCASE("dimension chain is validated") {
    Graph g;
    Mlp net = Mlp::create(g, "net", {3, 4}, rng);
    CHECK_THROWS_AS(net.forward(g.constant({2, 2}, {1, 2, 3, 4})), ShapeError);
    CHECK_THROWS_AS(Mlp::create(g, "bad", {3}, rng), ShapeError);
  }
}

TEST_CASE("mlp initialization is fan-in bounded and seeded") {
  Graph g1, g2;
  Rng r1(42), r2(42);
  Mlp a = Mlp::create(g1, "net", {16, 8}, r1);
  Mlp b = Mlp::create(g2, "net", {16, 8}, r2);
  const double bound = std::sqrt(1.0 / 16.0);
  for (int64_t i = 0; i < a.weight(0).numel(); ++i) {
    CHECK(a.weight(0).value()[static_cast<size_t>(i)] ==
          b.weight(0).value()[static_cast<size_t>(i)]);
    CHECK(std::abs(static_cast<double>(a.weight(0).value()[static_cast<size_t>(i)])) <= bound);
  }
}

TEST_CASE("mlp differentiates") {
  Rng rng(9);
  Graph g;
  Mlp net = Mlp::create(g, "net", {3, 5, 2}, rng);
  std::vector<real_t> input(6);
  for (real_t& v : input) v = static_cast<real_t>(rng.uniform(-1.0, 1.0));
  auto res = grad_check(g, [&] {
    return sum(net.forward(g.constant({2, 3}, input)));
  }, 1e-4);
  CHECK(res.max_rel_error < 1e-3);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  const std::string path = (std::filesystem::temp_directory_path() / "tf_ck_test.tfck").string();
  Rng rng(7);
  Graph g;
  Mlp net = Mlp::create(g, "net", {4, 3, 1}, rng);

  Checkpoint ck = Checkpoint::from_graph(g);
  ck.meta["purpose"] = "roundtrip test";
  ck.save(path);

  const Checkpoint back = Checkpoint::load(path);
  CHECK(back.meta.at("purpose") == "roundtrip test");
  for (Tensor p : g.parameters()) {
    const auto& [shape, values] = back.tensors.at(g.node(p.id()).name);
    REQUIRE(shape == p.shape());
    for (int64_t i = 0; i < p.numel(); ++i)
      CHECK(values[static_cast<size_t>(i)] == p.value()[static_cast<size_t>(i)]);
  }

  // fresh graph, different init; applying restores the exact values
  Graph g2;
  Rng rng2(1234);
  Mlp net2 = Mlp::create(g2, "net", {4, 3, 1}, rng2);
  back.apply_to_graph(g2);
  for (Tensor p : g.parameters()) {
    Tensor q = g2.find_parameter(g.node(p.id()).name);
    for (int64_t i = 0; i < p.numel(); ++i)
      CHECK(q.value()[static_cast<size_t>(i)] == p.value()[static_cast<size_t>(i)]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint rejects foreign files and shape drift") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string bad = (dir / "tf_ck_bad.tfck").string();
  {
    std::FILE* f = std::fopen(bad.c_str(), "w");
    std::fputs("not a checkpoint\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(Checkpoint::load(bad), IoError);
  std::filesystem::remove(bad);

  Rng rng(7);
  Graph g;
  (void)Mlp::create(g, "net", {4, 3, 1}, rng);
  Checkpoint ck = Checkpoint::from_graph(g);

  Graph other;
  Rng rng2(8);
  (void)Mlp::create(other, "net", {5, 3, 1}, rng2);
  CHECK_THROWS_AS(ck.apply_to_graph(other), IoError);
}

// The softmax normalization back-propagates a spiky gradient: most
// coordinates fall below a small fraction of the peak. Linear (L1)
// normalization spreads gradient over nearly all inputs.
TEST_CASE("gradient reaches more inputs through l1 normalization than softmax") {
  const int64_t length = 64;
  const double sigma = 5.0, threshold_frac = 1e-4;
  std::vector<double> frac_softmax, frac_linear;

  for (uint64_t seed = 0; seed < 31; ++seed) {
    Rng rng(seed);
    std::vector<real_t> input(length), upstream(length);
    for (real_t& v : input) v = static_cast<real_t>(rng.normal(0.0, sigma));
    for (real_t& v : upstream) v = static_cast<real_t>(rng.normal(0.0, 1.0));

    const auto fraction_above = [&](bool use_softmax) {
      Graph g;
      Tensor x = g.parameter("x", {length}, input);
      Tensor y = use_softmax ? softmax(x) : l1_normalize(x);
      g.backward(sum(hadamard(y, g.constant({length}, upstream))));
      double max_mag = 0;
      for (real_t v : x.grad()) max_mag = std::max(max_mag, std::abs(static_cast<double>(v)));
      int64_t above = 0;
      for (real_t v : x.grad())
        if (std::abs(static_cast<double>(v)) > threshold_frac * max_mag) ++above;
      return static_cast<double>(above) / static_cast<double>(length);
    };
    frac_softmax.push_back(fraction_above(true));
    frac_linear.push_back(fraction_above(false));
  }

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(frac_linear) > median(frac_softmax));
}

}  // TEST_SUITE
