#include "tensorformer/attention.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "tensorformer/rng.hpp"

namespace tensorformer {

AttentionKind attention_kind_from_string(const std::string& s) {
  if (s == "scalar_dot") return AttentionKind::ScalarDot;
  if (s == "vector") return AttentionKind::Vector;
  if (s == "matrix") return AttentionKind::Matrix;
  if (s == "matrix_softmax") return AttentionKind::MatrixSoftmax;
  if (s == "matrix_unnormalized") return AttentionKind::MatrixUnnormalized;
  if (s == "normalized_matrix") return AttentionKind::NormalizedMatrix;
  if (s == "point_conv") return AttentionKind::PointConv;
  throw ConfigError("unknown attention kind: " + s);
}

std::string to_string(AttentionKind kind) {
  switch (kind) {
    case AttentionKind::ScalarDot: return "scalar_dot";
    case AttentionKind::Vector: return "vector";
    case AttentionKind::Matrix: return "matrix";
    case AttentionKind::MatrixSoftmax: return "matrix_softmax";
    case AttentionKind::MatrixUnnormalized: return "matrix_unnormalized";
    case AttentionKind::NormalizedMatrix: return "normalized_matrix";
    case AttentionKind::PointConv: return "point_conv";
  }
  return "?";
}

WeightNorm weight_norm_of(AttentionKind kind) {
  switch (kind) {
    case AttentionKind::ScalarDot:
    case AttentionKind::Vector:
    case AttentionKind::MatrixSoftmax: return WeightNorm::Softmax;
    case AttentionKind::MatrixUnnormalized:
    case AttentionKind::PointConv: return WeightNorm::None;
    case AttentionKind::Matrix:
    case AttentionKind::NormalizedMatrix: return WeightNorm::Linear;
  }
  return WeightNorm::None;
}

int64_t attention_net_out_dim(AttentionKind kind, int64_t d) {
  switch (kind) {
    case AttentionKind::ScalarDot: return 0;
    case AttentionKind::Vector: return d;
    default: return d * d;
  }
}

int64_t attention_net_in_dim(AttentionKind kind, int64_t d) {
  return kind == AttentionKind::PointConv ? 3 : d;
}

PairIndex pair_indices(const Neighborhood& nbr) {
  PairIndex pi;
  const int64_t n = nbr.anchor_count, k = nbr.k;
  pi.anchors = std::make_shared<std::vector<int64_t>>(static_cast<size_t>(n * k));
  pi.neighbors = std::make_shared<std::vector<int64_t>>(static_cast<size_t>(n * k));
  pi.offsets.resize(static_cast<size_t>(n * k));
  std::vector<int64_t> order(static_cast<size_t>(k));
  for (int64_t a = 0; a < n; ++a) {
    std::iota(order.begin(), order.end(), int64_t(0));
    std::sort(order.begin(), order.end(), [&](int64_t lhs, int64_t rhs) {
      const double dl = nbr.offset(a, lhs).squared_norm();
      const double dr = nbr.offset(a, rhs).squared_norm();
      if (dl != dr) return dl < dr;
      return nbr.index(a, lhs) < nbr.index(a, rhs);
    });
    for (int64_t j = 0; j < k; ++j) {
      (*pi.anchors)[static_cast<size_t>(a * k + j)] = a;
      (*pi.neighbors)[static_cast<size_t>(a * k + j)] = nbr.index(a, order[static_cast<size_t>(j)]);
      pi.offsets[static_cast<size_t>(a * k + j)] = nbr.offset(a, order[static_cast<size_t>(j)]);
    }
  }
  return pi;
}

namespace {

void check_features(const Tensor& features, const Neighborhood& nbr) {
  if (features.shape().size() != 2)
    throw ShapeError("attention: features must be [N x d], got " +
                     shape_to_string(features.shape()));
  if (features.shape()[0] != nbr.anchor_count)
    throw ShapeError("attention: features rows " + std::to_string(features.shape()[0]) +
                     " != neighborhood anchors " + std::to_string(nbr.anchor_count));
}

struct GatheredPairs {
  PairIndex pi;
  Tensor anchor_feat;    // f_i per pair
  Tensor neighbor_feat;  // f_nj per pair
};

GatheredPairs gather_pairs(Tensor features, const Neighborhood& nbr) {
  check_features(features, nbr);
  GatheredPairs gp{pair_indices(nbr), {}, {}};
  gp.anchor_feat = gather_rows(features, gp.pi.anchors);
  gp.neighbor_feat = gather_rows(features, gp.pi.neighbors);
  return gp;
}

}  // namespace

Tensor scaled_dot_attention(Tensor features, const Neighborhood& nbr) {
  GatheredPairs gp = gather_pairs(features, nbr);
  Tensor logits = row_dot(gp.anchor_feat, gp.neighbor_feat);
  Tensor weights = neighbor_softmax(logits, nbr.k);
  return segment_sum(scale_rows(gp.neighbor_feat, weights), nbr.k);
}

Tensor vector_attention(Tensor features, const Neighborhood& nbr, const Mlp& phi) {
  const int64_t d = features.shape()[1];
  if (phi.in_dim() != d || phi.out_dim() != d)
    throw ShapeError("vector_attention: phi must map d->d, got " +
                     std::to_string(phi.in_dim()) + "->" + std::to_string(phi.out_dim()));
  GatheredPairs gp = gather_pairs(features, nbr);
  Tensor logits = phi.forward(sub(gp.anchor_feat, gp.neighbor_feat));
  Tensor weights = neighbor_softmax(logits, nbr.k);
  return segment_sum(hadamard(weights, gp.neighbor_feat), nbr.k);
}

Tensor matrix_attention(Tensor features, const Neighborhood& nbr, const Mlp& psi,
                        WeightNorm norm, L1NormPolicy policy) {
  const int64_t d = features.shape().size() == 2 ? features.shape()[1] : -1;
  if (psi.in_dim() != d || psi.out_dim() != d * d)
    throw ShapeError("matrix_attention: psi must map d->d*d, got " +
                     std::to_string(psi.in_dim()) + "->" + std::to_string(psi.out_dim()));
  GatheredPairs gp = gather_pairs(features, nbr);
  Tensor raw = psi.forward(sub(gp.anchor_feat, gp.neighbor_feat));
  Tensor weights = raw;
  if (norm == WeightNorm::Softmax) {
    weights = neighbor_softmax(raw, nbr.k);
  } else if (norm == WeightNorm::Linear) {
    weights = l1_normalize_segments(raw, d, policy);
  }
  return segment_sum(pair_matvec(weights, gp.neighbor_feat), nbr.k);
}

Tensor point_conv(Tensor features, const Neighborhood& nbr, const Mlp& wnet) {
  const int64_t d = features.shape().size() == 2 ? features.shape()[1] : -1;
  if (wnet.in_dim() != 3 || wnet.out_dim() != d * d)
    throw ShapeError("point_conv: weight net must map 3->d*d, got " +
                     std::to_string(wnet.in_dim()) + "->" + std::to_string(wnet.out_dim()));
  GatheredPairs gp = gather_pairs(features, nbr);
  // weights see relative positions only, never features
  std::vector<real_t> off(gp.pi.offsets.size() * 3);
  for (size_t p = 0; p < gp.pi.offsets.size(); ++p) {
    off[p * 3 + 0] = static_cast<real_t>(gp.pi.offsets[p].x);
    off[p * 3 + 1] = static_cast<real_t>(gp.pi.offsets[p].y);
    off[p * 3 + 2] = static_cast<real_t>(gp.pi.offsets[p].z);
  }
  Tensor offsets = features.graph().constant(
      {static_cast<int64_t>(gp.pi.offsets.size()), 3}, std::move(off));
  Tensor weights = wnet.forward(offsets);
  return segment_sum(pair_matvec(weights, gp.neighbor_feat), nbr.k);
}

Tensor matrix_attention_diagonal(Tensor features, const Neighborhood& nbr, const Mlp& phi) {
  const int64_t d = features.shape()[1];
  if (phi.in_dim() != d || phi.out_dim() != d)
    throw ShapeError("matrix_attention_diagonal: phi must map d->d");
  GatheredPairs gp = gather_pairs(features, nbr);
  Tensor logits = phi.forward(sub(gp.anchor_feat, gp.neighbor_feat));
  Tensor weights = neighbor_softmax(logits, nbr.k);
  Tensor mats = embed_diagonal(weights);
  return segment_sum(pair_matvec(mats, gp.neighbor_feat), nbr.k);
}

Tensor matrix_attention_scaled_identity(Tensor features, const Neighborhood& nbr) {
  const int64_t d = features.shape()[1];
  GatheredPairs gp = gather_pairs(features, nbr);
  Tensor logits = row_dot(gp.anchor_feat, gp.neighbor_feat);
  Tensor weights = neighbor_softmax(logits, nbr.k);
  Tensor mats = embed_scaled_identity(weights, d);
  return segment_sum(pair_matvec(mats, gp.neighbor_feat), nbr.k);
}

Tensor apply_attention(AttentionKind kind, Tensor features, const Neighborhood& nbr,
                       const Mlp* net, L1NormPolicy policy) {
  switch (kind) {
    case AttentionKind::ScalarDot:
      return scaled_dot_attention(features, nbr);
    case AttentionKind::Vector:
      if (!net) throw ShapeError("vector attention needs phi");
      return vector_attention(features, nbr, *net);
    case AttentionKind::PointConv:
      if (!net) throw ShapeError("point_conv needs a weight net");
      return point_conv(features, nbr, *net);
    case AttentionKind::Matrix:
    case AttentionKind::NormalizedMatrix:
    case AttentionKind::MatrixSoftmax:
    case AttentionKind::MatrixUnnormalized:
      if (!net) throw ShapeError("matrix attention needs psi");
      return matrix_attention(features, nbr, *net, weight_norm_of(kind), policy);
  }
  throw ShapeError("apply_attention: bad kind");
}

std::vector<ProbeRow> complexity_probe(const std::vector<AttentionKind>& kinds,
                                       const std::vector<int64_t>& ks,
                                       const std::vector<int64_t>& ds,
                                       const ProbeOptions& opt) {
  if (kinds.empty() || ks.empty() || ds.empty())
    throw ConfigError("complexity_probe: empty kind/k/d range");

  std::vector<ProbeRow> rows;
  Rng rng(opt.seed);
  PointCloud cloud;
  cloud.points.resize(static_cast<size_t>(opt.n_points));
  for (Vec3& p : cloud.points)
    p = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};

  for (AttentionKind kind : kinds) {
    for (int64_t k : ks) {
      const Neighborhood nbr = knn(cloud, k);
      for (int64_t d : ds) {
        Graph g;
        Rng init = rng.fork(static_cast<uint64_t>(d * 1000 + k));
        std::optional<Mlp> net;
        if (kind != AttentionKind::ScalarDot) {
          net = Mlp::create(g, "probe",
                            {attention_net_in_dim(kind, d), 16, attention_net_out_dim(kind, d)},
                            init);
        }
        std::vector<real_t> feat(static_cast<size_t>(opt.n_points * d));
        for (real_t& v : feat) v = static_cast<real_t>(init.uniform(-1.0, 1.0));

        double best_ns = std::numeric_limits<double>::max();
        size_t peak = 0;
        for (int rep = 0; rep < std::max(1, opt.reps); ++rep) {
          g.reset();
          g.reset_peak_bytes();
          const auto t0 = std::chrono::steady_clock::now();
          Tensor features = g.constant({opt.n_points, d}, feat);
          Tensor out = apply_attention(kind, features, nbr, net ? &*net : nullptr);
          (void)out;
          const auto t1 = std::chrono::steady_clock::now();
          best_ns = std::min(best_ns,
                             std::chrono::duration<double, std::nano>(t1 - t0).count());
          peak = std::max(peak, g.peak_bytes());
        }
        rows.push_back({kind, k, d, best_ns, peak});
      }
    }
  }
  return rows;
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw NumericError("fit_loglog_slope: need at least two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tensorformer
