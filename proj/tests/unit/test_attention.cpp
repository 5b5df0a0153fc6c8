#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tensorformer/attention.hpp"
#include "tensorformer/grad_check.hpp"
#include "tensorformer/rng.hpp"

using namespace tensorformer;

namespace {

PointCloud random_cloud(Rng& rng, int64_t n) {
  PointCloud c;
  c.points.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i)
    c.points.push_back({rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)});
  return c;
}

std::vector<real_t> random_values(Rng& rng, int64_t n) {
  std::vector<real_t> v(static_cast<size_t>(n));
  for (real_t& x : v) x = static_cast<real_t>(rng.uniform(-1.0, 1.0));
  return v;
}

// brute-force kNN with the same (distance, index) tie rule
std::vector<int64_t> brute_knn_row(const PointCloud& cloud, const Vec3& q, int64_t k,
                                   int64_t exclude) {
  std::vector<std::pair<double, int64_t>> all;
  for (int64_t i = 0; i < cloud.size(); ++i) {
    if (i == exclude) continue;
    all.push_back({(cloud.points[static_cast<size_t>(i)] - q).squared_norm(), i});
  }
  std::sort(all.begin(), all.end());
  std::vector<int64_t> out;
  for (int64_t j = 0; j < k; ++j) out.push_back(all[static_cast<size_t>(j)].second);
  return out;
}

}  // namespace

TEST_SUITE("attention") {

TEST_CASE("knn on collinear points, self excluded") {
  PointCloud cloud;
  cloud.points = {{0, 0, 0}, {1, 0, 0}, {3, 0, 0}};
  const Neighborhood nbr = knn(cloud, 1, /*include_self=*/false);
  CHECK(nbr.index(0, 0) == 1);
  CHECK(nbr.index(1, 0) == 0);
  CHECK(nbr.index(2, 0) == 1);
}

TEST_CASE("knn with self included puts the anchor first") {
  Rng rng(3);
  const PointCloud cloud = random_cloud(rng, 20);
  const Neighborhood nbr = knn(cloud, 4);
  for (int64_t a = 0; a < nbr.anchor_count; ++a) {
    CHECK(nbr.index(a, 0) == a);
    CHECK(nbr.offset(a, 0).norm() == 0.0);
  }
}

TEST_CASE("knn with k = N-1 (self excluded) covers all other points") {
  Rng rng(4);
  const PointCloud cloud = random_cloud(rng, 9);
  const Neighborhood nbr = knn(cloud, 8, /*include_self=*/false);
  for (int64_t a = 0; a < 9; ++a) {
    std::vector<int64_t> row;
    for (int64_t j = 0; j < 8; ++j) {
      CHECK(nbr.index(a, j) != a);
      row.push_back(nbr.index(a, j));
    }
    std::sort(row.begin(), row.end());
    CHECK(std::unique(row.begin(), row.end()) == row.end());
  }
  CHECK_THROWS_AS(knn(cloud, 9, false), NumericError);
}

TEST_CASE("knn matches brute force on 100 random points") {
  Rng rng(5);
  const PointCloud cloud = random_cloud(rng, 100);
  const Neighborhood nbr = knn(cloud, 5, /*include_self=*/true);
  for (int64_t a = 0; a < 100; ++a) {
    const auto expected = brute_knn_row(cloud, cloud.points[static_cast<size_t>(a)], 5, -1);
    for (int64_t j = 0; j < 5; ++j) CHECK(nbr.index(a, j) == expected[static_cast<size_t>(j)]);
  }
  // cross kNN against separate anchors
  const PointCloud anchors = random_cloud(rng, 40);
  const Neighborhood cross = knn(std::span<const Vec3>(anchors.points), cloud, 7);
  for (int64_t a = 0; a < 40; ++a) {
    const auto expected = brute_knn_row(cloud, anchors.points[static_cast<size_t>(a)], 7, -1);
    for (int64_t j = 0; j < 7; ++j) CHECK(cross.index(a, j) == expected[static_cast<size_t>(j)]);
  }
}

TEST_CASE("scaled dot attention examples") {
  SUBCASE("identical neighbor features collapse to that feature") {
    Rng rng(6);
    const PointCloud cloud = random_cloud(rng, 6);
    Graph g;
    std::vector<real_t> feat;
    for (int64_t i = 0; i < 6; ++i) {
      feat.push_back(0.3);
      feat.push_back(-1.25);
    }
    Tensor out = scaled_dot_attention(g.constant({6, 2}, feat), knn(cloud, 3));
    for (int64_t i = 0; i < 6; ++i) {
      CHECK(out.value()[static_cast<size_t>(2 * i)] == doctest::Approx(0.3).epsilon(1e-12));
      CHECK(out.value()[static_cast<size_t>(2 * i + 1)] == doctest::Approx(-1.25).epsilon(1e-12));
    }
  }
  SUBCASE("two-neighbor hand instance") {
    // anchor feature [1,0]; neighbors [1,0] and [0,1] -> logits (1,0)
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {0.1, 0, 0}};
    Graph g;
    Tensor features = g.constant({2, 2}, {1, 0, 0, 1});
    Tensor out = scaled_dot_attention(features, knn(cloud, 2));
    const double w0 = std::exp(1.0) / (std::exp(1.0) + 1.0);
    CHECK(out.value()[0] == doctest::Approx(w0).epsilon(1e-9));          // ~0.7311
    CHECK(out.value()[1] == doctest::Approx(1.0 - w0).epsilon(1e-9));    // ~0.2689
  }
}

TEST_CASE("kernels are invariant to neighbor-row permutation, bit for bit") {
  Rng rng(7);
  const PointCloud cloud = random_cloud(rng, 10);
  const int64_t d = 3, k = 4;
  Neighborhood nbr = knn(cloud, k);
  Neighborhood shuffled = nbr;
  // rotate each row's (index, offset) pairs
  for (int64_t a = 0; a < shuffled.anchor_count; ++a) {
    std::rotate(shuffled.indices.begin() + a * k, shuffled.indices.begin() + a * k + 1,
                shuffled.indices.begin() + (a + 1) * k);
    std::rotate(shuffled.offsets.begin() + a * k, shuffled.offsets.begin() + a * k + 1,
                shuffled.offsets.begin() + (a + 1) * k);
  }

  const std::vector<real_t> feat = random_values(rng, 10 * d);
  Graph g;
  Rng init(8);
  Mlp phi = Mlp::create(g, "phi", {d, 16, d}, init);
  Mlp psi = Mlp::create(g, "psi", {d, 16, d * d}, init);
  Mlp wnet = Mlp::create(g, "wnet", {3, 16, d * d}, init);

  const auto run = [&](AttentionKind kind, const Mlp* net, const Neighborhood& n) {
    g.reset();
    Tensor out = apply_attention(kind, g.constant({10, d}, feat), n, net);
    return std::vector<real_t>(out.value().begin(), out.value().end());
  };
  const std::pair<AttentionKind, const Mlp*> kernels[] = {
      {AttentionKind::ScalarDot, nullptr},
      {AttentionKind::Vector, &phi},
      {AttentionKind::NormalizedMatrix, &psi},
      {AttentionKind::MatrixSoftmax, &psi},
      {AttentionKind::MatrixUnnormalized, &psi},
      {AttentionKind::PointConv, &wnet},
  };
  for (const auto& [kind, net] : kernels) {
    const auto base = run(kind, net, nbr);
    const auto perm = run(kind, net, shuffled);
    REQUIRE(base.size() == perm.size());
    for (size_t i = 0; i < base.size(); ++i) CHECK(base[i] == perm[i]);
  }
}

TEST_CASE("vector attention examples") {
  Rng rng(9);
  SUBCASE("all neighbors equal to anchor give the anchor back") {
    const PointCloud cloud = random_cloud(rng, 5);
    Graph g;
    Rng init(1);
    Mlp phi = Mlp::create(g, "phi", {2, 8, 2}, init);
    std::vector<real_t> feat;
    for (int i = 0; i < 5; ++i) {
      feat.push_back(0.4);
      feat.push_back(0.7);
    }
    Tensor out = vector_attention(g.constant({5, 2}, feat), knn(cloud, 3), phi);
    for (int i = 0; i < 5; ++i) {
      CHECK(out.value()[static_cast<size_t>(2 * i)] == doctest::Approx(0.4).epsilon(1e-12));
      CHECK(out.value()[static_cast<size_t>(2 * i + 1)] == doctest::Approx(0.7).epsilon(1e-12));
    }
  }
  SUBCASE("d=1 reduces to scalar weighting with phi logits") {
    const PointCloud cloud = random_cloud(rng, 4);
    const Neighborhood nbr = knn(cloud, 2);
    Graph g;
    Rng init(2);
    Mlp phi = Mlp::create(g, "phi", {1, 8, 1}, init);
    const std::vector<real_t> feat = random_values(rng, 4);
    Tensor out = vector_attention(g.constant({4, 1}, feat), nbr, phi);

    // direct scalar computation over the same canonical pair order
    const PairIndex pi = pair_indices(nbr);
    std::vector<double> expect(4, 0.0);
    for (int64_t a = 0; a < 4; ++a) {
      std::vector<double> logits, values;
      for (int64_t j = 0; j < 2; ++j) {
        const int64_t p = a * 2 + j;
        const double diff = static_cast<double>(feat[static_cast<size_t>((*pi.anchors)[static_cast<size_t>(p)])]) -
                            static_cast<double>(feat[static_cast<size_t>((*pi.neighbors)[static_cast<size_t>(p)])]);
        Graph tmp;
        Mlp phi_tmp = Mlp::create(tmp, "phi", {1, 8, 1}, init);
        // reuse the trained weights by copying from the main graph
        phi_tmp.set_layer(0, std::vector<real_t>(phi.weight(0).value().begin(), phi.weight(0).value().end()),
                          std::vector<real_t>(phi.bias(0).value().begin(), phi.bias(0).value().end()));
        phi_tmp.set_layer(1, std::vector<real_t>(phi.weight(1).value().begin(), phi.weight(1).value().end()),
                          std::vector<real_t>(phi.bias(1).value().begin(), phi.bias(1).value().end()));
        logits.push_back(static_cast<double>(
            phi_tmp.forward(tmp.constant({1, 1}, {static_cast<real_t>(diff)})).value()[0]));
        values.push_back(static_cast<double>(feat[static_cast<size_t>((*pi.neighbors)[static_cast<size_t>(p)])]));
      }
      const double mx = std::max(logits[0], logits[1]);
      const double e0 = std::exp(logits[0] - mx), e1 = std::exp(logits[1] - mx);
      expect[static_cast<size_t>(a)] = (e0 * values[0] + e1 * values[1]) / (e0 + e1);
    }
    for (int64_t a = 0; a < 4; ++a)
      CHECK(out.value()[static_cast<size_t>(a)] ==
            doctest::Approx(expect[static_cast<size_t>(a)]).epsilon(1e-9));
  }
  SUBCASE("channels only mix through their own weights") {
    // with fixed weights, channel c of the output ignores other channels'
    // neighbor values: perturbing channel 1 leaves channel 0 intact
    const PointCloud cloud = random_cloud(rng, 5);
    const Neighborhood nbr = knn(cloud, 3);
    Graph g;
    Rng init(3);
    Mlp phi = Mlp::create(g, "phi", {2, 8, 2}, init);
    std::vector<real_t> feat = random_values(rng, 10);
    Tensor out1 = vector_attention(g.constant({5, 2}, feat), nbr, phi);
    const std::vector<real_t> base(out1.value().begin(), out1.value().end());

    // recompute attention weights from unchanged diffs, but change channel-1
    // values only; channel-0 outputs must stay bit-identical. Changing the
    // features changes the diffs too, so instead verify the Hadamard
    // structure directly: outputs decompose per channel given the weights.
    g.reset();
    Tensor features = g.constant({5, 2}, feat);
    const PairIndex pi = pair_indices(nbr);
    Tensor fa = gather_rows(features, pi.anchors);
    Tensor fn = gather_rows(features, pi.neighbors);
    Tensor w = neighbor_softmax(phi.forward(sub(fa, fn)), nbr.k);
    Tensor z = segment_sum(hadamard(w, fn), nbr.k);
    for (size_t i = 0; i < base.size(); ++i) CHECK(z.value()[i] == base[i]);

    // channel 0 of z depends only on channel 0 of fn given the weights
    std::vector<real_t> wv(w.value().begin(), w.value().end());
    std::vector<real_t> fnv(fn.value().begin(), fn.value().end());
    for (int64_t a = 0; a < 5; ++a) {
      double acc = 0;
      for (int64_t j = 0; j < 3; ++j)
        acc += static_cast<double>(wv[static_cast<size_t>((a * 3 + j) * 2)]) *
               static_cast<double>(fnv[static_cast<size_t>((a * 3 + j) * 2)]);
      CHECK(z.value()[static_cast<size_t>(a * 2)] == doctest::Approx(acc).epsilon(1e-12));
    }
  }
}

TEST_CASE("matrix attention with constant identity weights") {
  Rng rng(10);
  const PointCloud cloud = random_cloud(rng, 6);
  const int64_t d = 3, k = 3;
  const Neighborhood nbr = knn(cloud, k);
  Graph g;
  Rng init(1);
  Mlp psi = Mlp::create(g, "psi", {d, 4, d * d}, init);
  // zero weights, identity bias: psi(x) == I for every x
  psi.set_layer(0, std::vector<real_t>(static_cast<size_t>(d * 4), 0), std::vector<real_t>(4, 0));
  std::vector<real_t> identity(static_cast<size_t>(d * d), 0);
  for (int64_t c = 0; c < d; ++c) identity[static_cast<size_t>(c * d + c)] = 1;
  psi.set_layer(1, std::vector<real_t>(static_cast<size_t>(4 * d * d), 0), identity);

  const std::vector<real_t> feat = random_values(rng, 6 * d);
  Tensor features = g.constant({6, d}, feat);

  // expected neighbor sums in canonical order
  const PairIndex pi = pair_indices(nbr);
  std::vector<real_t> expected(static_cast<size_t>(6 * d), 0);
  for (int64_t p = 0; p < 6 * k; ++p)
    for (int64_t c = 0; c < d; ++c)
      expected[static_cast<size_t>((p / k) * d + c)] +=
          feat[static_cast<size_t>((*pi.neighbors)[static_cast<size_t>(p)] * d + c)];

  Tensor none = matrix_attention(features, nbr, psi, WeightNorm::None);
  for (size_t i = 0; i < expected.size(); ++i) CHECK(none.value()[i] == expected[i]);

  // identity rows already have unit L1 norm, so linear normalization is a no-op
  Tensor linear = matrix_attention(features, nbr, psi, WeightNorm::Linear);
  for (size_t i = 0; i < expected.size(); ++i) CHECK(linear.value()[i] == expected[i]);
}

TEST_CASE("reduction hierarchy: diagonal psi + softmax equals vector attention") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const PointCloud cloud = random_cloud(rng, 5);
    const Neighborhood nbr = knn(cloud, 3);
    Graph g;
    Rng init(seed + 100);
    Mlp phi = Mlp::create(g, "phi", {3, 8, 3}, init);
    const std::vector<real_t> feat = random_values(rng, 15);

    Tensor via_vector = vector_attention(g.constant({5, 3}, feat), nbr, phi);
    Tensor via_matrix = matrix_attention_diagonal(g.constant({5, 3}, feat), nbr, phi);
    for (int64_t i = 0; i < via_vector.numel(); ++i)
      CHECK(std::abs(static_cast<double>(via_vector.value()[static_cast<size_t>(i)]) -
                     static_cast<double>(via_matrix.value()[static_cast<size_t>(i)])) < 1e-9);
  }
}

TEST_CASE("reduction hierarchy: scaled-identity psi equals scaled dot-product") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 40);
    const PointCloud cloud = random_cloud(rng, 6);
    const Neighborhood nbr = knn(cloud, 4);
    Graph g;
    const std::vector<real_t> feat = random_values(rng, 6 * 3);
    Tensor a = scaled_dot_attention(g.constant({6, 3}, feat), nbr);
    Tensor b = matrix_attention_scaled_identity(g.constant({6, 3}, feat), nbr);
    for (int64_t i = 0; i < a.numel(); ++i)
      CHECK(std::abs(static_cast<double>(a.value()[static_cast<size_t>(i)]) -
                     static_cast<double>(b.value()[static_cast<size_t>(i)])) < 1e-9);
  }
}

TEST_CASE("linear norm leaves every weight-matrix row with unit L1 norm") {
  Rng rng(11);
  Graph g;
  const int64_t rows = 250, d = 4;  // 250 x 4 segments = 1000 normalized rows
  std::vector<real_t> raw = random_values(rng, rows * d * d);
  Tensor t = l1_normalize_segments(g.constant({rows, d * d}, raw), d);
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t seg = 0; seg < d; ++seg) {
      double acc = 0;
      for (int64_t c = 0; c < d; ++c)
        acc += std::abs(static_cast<double>(
            t.value()[static_cast<size_t>(r * d * d + seg * d + c)]));
      CHECK(std::abs(acc - 1.0) < 1e-9);
    }
}

TEST_CASE("scaled dot output stays in the per-channel neighbor range; matrix attention escapes it") {
  Rng rng(12);
  const PointCloud cloud = random_cloud(rng, 8);
  const Neighborhood nbr = knn(cloud, 4);
  const int64_t d = 3;
  const std::vector<real_t> feat = random_values(rng, 8 * d);
  Graph g;
  Tensor out = scaled_dot_attention(g.constant({8, d}, feat), nbr);
  const PairIndex pi = pair_indices(nbr);
  for (int64_t a = 0; a < 8; ++a)
    for (int64_t c = 0; c < d; ++c) {
      double lo = 1e9, hi = -1e9;
      for (int64_t j = 0; j < 4; ++j) {
        const double v = static_cast<double>(
            feat[static_cast<size_t>((*pi.neighbors)[static_cast<size_t>(a * 4 + j)] * d + c)]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double z = static_cast<double>(out.value()[static_cast<size_t>(a * d + c)]);
      CHECK(z >= lo - 1e-12);
      CHECK(z <= hi + 1e-12);
    }

  // regression witness: a normalized weight matrix mixes channels, so the
  // output can leave the per-channel range of the neighbor features
  PointCloud single;
  single.points = {{0, 0, 0}};
  const Neighborhood self_nbr = knn(single, 1);
  Graph g2;
  Rng init(1);
  Mlp psi = Mlp::create(g2, "psi", {2, 4, 4}, init);
  psi.set_layer(0, std::vector<real_t>(8, 0), std::vector<real_t>(4, 0));
  psi.set_layer(1, std::vector<real_t>(16, 0), {0, -1, 1, 0});  // rows [0,-1] and [1,0]
  Tensor witness =
      matrix_attention(g2.constant({1, 2}, {0.1, -5.0}), self_nbr, psi, WeightNorm::Linear);
  // channel-0 neighbor values are all 0.1, yet the output is 5.0
  CHECK(witness.value()[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(witness.value()[0] > 0.1 + 1.0);
}

TEST_CASE("point convolution examples") {
  Rng rng(13);
  const PointCloud cloud = random_cloud(rng, 7);
  const int64_t d = 2, k = 3;
  const Neighborhood nbr = knn(cloud, k);
  Graph g;
  Rng init(2);
  Mlp wnet = Mlp::create(g, "wnet", {3, 4, d * d}, init);

  SUBCASE("identity weights sum the neighbors") {
    wnet.set_layer(0, std::vector<real_t>(12, 0), std::vector<real_t>(4, 0));
    wnet.set_layer(1, std::vector<real_t>(16, 0), {1, 0, 0, 1});
    const std::vector<real_t> feat = random_values(rng, 7 * d);
    Tensor out = point_conv(g.constant({7, d}, feat), nbr, wnet);
    const PairIndex pi = pair_indices(nbr);
    std::vector<real_t> expected(static_cast<size_t>(7 * d), 0);
    for (int64_t p = 0; p < 7 * k; ++p)
      for (int64_t c = 0; c < d; ++c)
        expected[static_cast<size_t>((p / k) * d + c)] +=
            feat[static_cast<size_t>((*pi.neighbors)[static_cast<size_t>(p)] * d + c)];
    for (size_t i = 0; i < expected.size(); ++i) CHECK(out.value()[i] == expected[i]);
  }
  SUBCASE("translating the cloud leaves the output unchanged") {
    const std::vector<real_t> feat = random_values(rng, 7 * d);
    Tensor base = point_conv(g.constant({7, d}, feat), nbr, wnet);
    PointCloud moved = cloud;
    for (Vec3& p : moved.points) p += Vec3{12.25, -3.5, 0.75};
    Tensor shifted = point_conv(g.constant({7, d}, feat), knn(moved, k), wnet);
    for (int64_t i = 0; i < base.numel(); ++i)
      CHECK(base.value()[static_cast<size_t>(i)] ==
            doctest::Approx(shifted.value()[static_cast<size_t>(i)]).epsilon(1e-9));
  }
  SUBCASE("weights never depend on the features") {
    const std::vector<real_t> feat1 = random_values(rng, 7 * d);
    const std::vector<real_t> feat2 = random_values(rng, 7 * d);
    // extract the weight matrices once and verify both outputs against them
    const PairIndex pi = pair_indices(nbr);
    std::vector<real_t> off;
    for (const Vec3& o : pi.offsets) {
      off.push_back(static_cast<real_t>(o.x));
      off.push_back(static_cast<real_t>(o.y));
      off.push_back(static_cast<real_t>(o.z));
    }
    Tensor weights = wnet.forward(g.constant({7 * k, 3}, off));
    const std::vector<real_t> w(weights.value().begin(), weights.value().end());

    for (const auto* feat : {&feat1, &feat2}) {
      Tensor out = point_conv(g.constant({7, d}, *feat), nbr, wnet);
      std::vector<double> expected(static_cast<size_t>(7 * d), 0.0);
      for (int64_t p = 0; p < 7 * k; ++p) {
        const int64_t nb = (*pi.neighbors)[static_cast<size_t>(p)];
        for (int64_t r = 0; r < d; ++r)
          for (int64_t c = 0; c < d; ++c)
            expected[static_cast<size_t>((p / k) * d + r)] +=
                static_cast<double>(w[static_cast<size_t>(p * d * d + r * d + c)]) *
                static_cast<double>((*feat)[static_cast<size_t>(nb * d + c)]);
      }
      for (int64_t i = 0; i < out.numel(); ++i)
        CHECK(out.value()[static_cast<size_t>(i)] ==
              doctest::Approx(expected[static_cast<size_t>(i)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("all kernels differentiate end to end") {
  Rng rng(14);
  const PointCloud cloud = random_cloud(rng, 6);
  const int64_t d = 3;
  const Neighborhood nbr = knn(cloud, 3);
  const std::vector<real_t> upstream = random_values(rng, 6 * d);

  const auto check_kernel = [&](AttentionKind kind) {
    Graph g;
    Rng init(77);
    Mlp net;
    const bool needs_net = kind != AttentionKind::ScalarDot;
    if (needs_net)
      net = Mlp::create(g, "net",
                        {attention_net_in_dim(kind, d), 8, attention_net_out_dim(kind, d)},
                        init);
    Tensor features = g.parameter("features", {6, d}, random_values(rng, 6 * d));
    auto res = grad_check(g, [&] {
      Tensor z = apply_attention(kind, features, nbr, needs_net ? &net : nullptr);
      return sum(hadamard(z, g.constant({6, d}, upstream)));
    }, 1e-4);
    CHECK_MESSAGE(res.max_rel_error < 1e-3, to_string(kind));
  };
  for (AttentionKind kind :
       {AttentionKind::ScalarDot, AttentionKind::Vector, AttentionKind::NormalizedMatrix,
        AttentionKind::MatrixSoftmax, AttentionKind::MatrixUnnormalized,
        AttentionKind::PointConv})
    check_kernel(kind);
}

// With linear normalization, gradient reaches more of the per-neighbor raw
// attention weights (the normalization's inputs) than with softmax, which
// back-propagates mostly to the winning neighbors.
TEST_CASE("gradient flow contrast between linear and softmax norms") {
  const int64_t n = 8, d = 16, k = 8;
  std::vector<double> counts_linear, counts_softmax;
  for (uint64_t seed = 0; seed < 51; ++seed) {
    Rng rng(seed);
    const PointCloud cloud = random_cloud(rng, n);
    const Neighborhood nbr = knn(cloud, k);
    const std::vector<real_t> feat = random_values(rng, n * d);
    const std::vector<real_t> upstream = random_values(rng, n * d);

    const auto count_above = [&](WeightNorm norm) {
      Graph g;
      Rng init(seed + 500);
      Mlp psi = Mlp::create(g, "psi", {d, 16, d * d}, init);
      // widen the output layer so the raw per-neighbor weights spread with
      // a standard deviation near 5, where softmax saturates
      for (Tensor t : {psi.weight(1), psi.bias(1)})
        for (real_t& v : t.value_mut()) v *= real_t(20);
      const PairIndex pi = pair_indices(nbr);
      Tensor features = g.constant({n, d}, feat);
      Tensor fa = gather_rows(features, pi.anchors);
      Tensor fn = gather_rows(features, pi.neighbors);
      Tensor raw = psi.forward(sub(fa, fn));  // per-neighbor weights, pre-norm
      Tensor weights = norm == WeightNorm::Softmax ? neighbor_softmax(raw, nbr.k)
                                                   : l1_normalize_segments(raw, d);
      Tensor z = segment_sum(pair_matvec(weights, fn), nbr.k);
      g.backward(sum(hadamard(z, g.constant({n, d}, upstream))));

      double max_mag = 0;
      for (real_t v : raw.grad())
        max_mag = std::max(max_mag, std::abs(static_cast<double>(v)));
      int64_t above = 0;
      for (real_t v : raw.grad())
        if (std::abs(static_cast<double>(v)) > 1e-4 * max_mag) ++above;
      return static_cast<double>(above);
    };
    counts_linear.push_back(count_above(WeightNorm::Linear));
    counts_softmax.push_back(count_above(WeightNorm::Softmax));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(counts_linear) > median(counts_softmax));
}

TEST_CASE("complexity probe reports matrix attention as the memory heavyweight") {
  ProbeOptions opt;
  opt.n_points = 64;
  opt.reps = 1;
  const std::vector<AttentionKind> kinds = {
      AttentionKind::ScalarDot, AttentionKind::Vector, AttentionKind::NormalizedMatrix,
      AttentionKind::MatrixSoftmax, AttentionKind::MatrixUnnormalized, AttentionKind::PointConv};
  const auto rows = complexity_probe(kinds, {8}, {16}, opt);
  REQUIRE(rows.size() == kinds.size());
  size_t tensorformer_peak = 0;
  for (const auto& row : rows)
    if (row.kind == AttentionKind::NormalizedMatrix) tensorformer_peak = row.peak_bytes;
  for (const auto& row : rows) CHECK(tensorformer_peak >= row.peak_bytes);
}

TEST_CASE("log-log slope fit recovers exact power laws") {
  std::vector<double> xs = {8, 16, 32, 64}, ys;
  for (double x : xs) ys.push_back(3.0 * x * x);
  CHECK(fit_loglog_slope(xs, ys) == doctest::Approx(2.0).epsilon(1e-12));
  ys.clear();
  for (double x : xs) ys.push_back(0.5 * x);
  CHECK(fit_loglog_slope(xs, ys) == doctest::Approx(1.0).epsilon(1e-12));
}

}  // TEST_SUITE
