#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tensorformer/mlp.hpp"
#include "tensorformer/neighborhood.hpp"
#include "tensorformer/tensor.hpp"

namespace tensorformer {

// Local-patch attention kernels. All of them take per-point features
// [N x d] and a Neighborhood and produce [N x d]:
//
//   scaled dot-product  z_i = sum_j softmax_j(f_i . f_nj) f_nj
//   vector              z_i = sum_j softmax_j(phi(f_i - f_nj)) (.) f_nj
//   matrix              z_i = sum_j Norm(psi(f_i - f_nj)) f_nj
//   point convolution   z_i = sum_j wnet(p_nj - p_i) f_nj
//
// psi emits d*d values reshaped row-major to a d x d matrix whose row index
// is the output channel. Linear normalization divides each matrix row by its
// own L1 norm; softmax normalization acts across the k neighbors per entry.

enum class AttentionKind {
  ScalarDot,
  Vector,
  Matrix,  // matrix attention with the default (linear) normalization
  MatrixSoftmax,
  MatrixUnnormalized,
  NormalizedMatrix,
  PointConv,
};

enum class WeightNorm { None, Softmax, Linear };

AttentionKind attention_kind_from_string(const std::string& s);
std::string to_string(AttentionKind kind);
WeightNorm weight_norm_of(AttentionKind kind);
// Width of the weight-producing MLP's output for a d-channel kernel
// (0 for ScalarDot, d for Vector, d*d otherwise).
int64_t attention_net_out_dim(AttentionKind kind, int64_t d);
int64_t attention_net_in_dim(AttentionKind kind, int64_t d);  // 3 for PointConv, else d

// Pair tables in canonical order: for each anchor, neighbors sorted by
// (squared distance, index). Kernels re-derive this from the neighborhood so
// that permuting a row never changes the summation order.
struct PairIndex {
  std::shared_ptr<std::vector<int64_t>> anchors;    // P = N*k entries
  std::shared_ptr<std::vector<int64_t>> neighbors;  // P entries
  std::vector<Vec3> offsets;                        // neighbor - anchor, canonical order
};
PairIndex pair_indices(const Neighborhood& nbr);

Tensor scaled_dot_attention(Tensor features, const Neighborhood& nbr);
Tensor vector_attention(Tensor features, const Neighborhood& nbr, const Mlp& phi);
Tensor matrix_attention(Tensor features, const Neighborhood& nbr, const Mlp& psi,
                        WeightNorm norm, L1NormPolicy policy = L1NormPolicy::Floor);
Tensor point_conv(Tensor features, const Neighborhood& nbr, const Mlp& wnet);

// Matrix attention constrained to diagonal weight matrices diag(phi(.)),
// normalized across neighbors and aggregated through the matrix product
// path. Equals vector_attention; kept as an independent route for the
// reduction checks.
Tensor matrix_attention_diagonal(Tensor features, const Neighborhood& nbr, const Mlp& phi);
// Matrix attention constrained to w_j * I with scalar logits f_i . f_nj.
// Equals scaled_dot_attention.
Tensor matrix_attention_scaled_identity(Tensor features, const Neighborhood& nbr);

// Dispatch by kind; `net` is phi/psi/wnet depending on the kind and must be
// null for ScalarDot.
Tensor apply_attention(AttentionKind kind, Tensor features, const Neighborhood& nbr,
                       const Mlp* net, L1NormPolicy policy = L1NormPolicy::Floor);

// ---- complexity probe ----

struct ProbeRow {
  AttentionKind kind;
  int64_t k = 0;
  int64_t d = 0;
  double time_ns = 0.0;
  size_t peak_bytes = 0;
};

struct ProbeOptions {
  int64_t n_points = 256;
  int reps = 3;
  uint64_t seed = 0;
};

// Times one forward evaluation (best of reps) of each kernel per (k, d) and
// records the graph allocation high-water mark.
std::vector<ProbeRow> complexity_probe(const std::vector<AttentionKind>& kinds,
                                       const std::vector<int64_t>& ks,
                                       const std::vector<int64_t>& ds,
                                       const ProbeOptions& opt = {});

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace tensorformer
