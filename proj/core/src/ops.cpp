#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "tensorformer/tensor.hpp"

namespace tensorformer {

namespace {

using RowMat = Eigen::Matrix<real_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ShapeError(msg);
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " +
                                      shape_to_string(a.shape()) + " vs " +
                                      shape_to_string(b.shape()));
}

void require_same_graph(const Tensor& a, const Tensor& b) {
  require(&a.graph() == &b.graph(), "operands belong to different graphs");
}

Node make_node(Op op, Shape shape, const Tensor& a) {
  Node n;
  n.op = op;
  n.shape = std::move(shape);
  n.value.resize(static_cast<size_t>(shape_numel(n.shape)));
  n.a = a.id();
  n.requires_grad = a.requires_grad();
  return n;
}

Node make_node(Op op, Shape shape, const Tensor& a, const Tensor& b) {
  require_same_graph(a, b);
  Node n = make_node(op, std::move(shape), a);
  n.b = b.id();
  n.requires_grad = n.requires_grad || b.requires_grad();
  return n;
}

double sign_of(real_t v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// softmax over a strided slice x[i*stride], i in [0, count), writing to y
void softmax_slice(const real_t* x, real_t* y, int64_t count, int64_t stride) {
  real_t mx = x[0];
  for (int64_t i = 1; i < count; ++i) mx = std::max(mx, x[i * stride]);
  real_t denom = 0;
  for (int64_t i = 0; i < count; ++i) {
    const real_t e = std::exp(x[i * stride] - mx);
    y[i * stride] = e;
    denom += e;
  }
  for (int64_t i = 0; i < count; ++i) y[i * stride] /= denom;
}

// dx_j += y_j * (g_j - sum_l g_l y_l) over the same slice
void softmax_slice_backward(const real_t* y, const real_t* g, real_t* dx, int64_t count,
                            int64_t stride) {
  real_t dot = 0;
  for (int64_t i = 0; i < count; ++i) dot += g[i * stride] * y[i * stride];
  for (int64_t i = 0; i < count; ++i)
    dx[i * stride] += y[i * stride] * (g[i * stride] - dot);
}

}  // namespace

Tensor add(Tensor a, Tensor b) {
  require_same_graph(a, b);
  const bool row_broadcast =
      a.shape().size() == 2 && b.shape().size() == 1 && a.shape()[1] == b.shape()[0];
  if (!row_broadcast) {
    require_same_shape("add", a, b);
    Node n = make_node(Op::Add, a.shape(), a, b);
    const auto av = a.value(), bv = b.value();
    for (size_t i = 0; i < n.value.size(); ++i) n.value[i] = av[i] + bv[i];
    return a.graph().append(std::move(n));
  }
  Node n = make_node(Op::AddRow, a.shape(), a, b);
  const int64_t rows = a.shape()[0], cols = a.shape()[1];
  const auto av = a.value(), bv = b.value();
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < cols; ++c) n.value[static_cast<size_t>(r * cols + c)] = av[r * cols + c] + bv[c];
  return a.graph().append(std::move(n));
}

Tensor sub(Tensor a, Tensor b) {
  require_same_shape("sub", a, b);
  Node n = make_node(Op::Sub, a.shape(), a, b);
  const auto av = a.value(), bv = b.value();
  for (size_t i = 0; i < n.value.size(); ++i) n.value[i] = av[i] - bv[i];
  return a.graph().append(std::move(n));
}

Tensor hadamard(Tensor a, Tensor b) {
  require_same_shape("hadamard", a, b);
  Node n = make_node(Op::Hadamard, a.shape(), a, b);
  const auto av = a.value(), bv = b.value();
  for (size_t i = 0; i < n.value.size(); ++i) n.value[i] = av[i] * bv[i];
  return a.graph().append(std::move(n));
}

Tensor relu(Tensor x) {
  Node n = make_node(Op::Relu, x.shape(), x);
  const auto xv = x.value();
  for (size_t i = 0; i < n.value.size(); ++i) n.value[i] = xv[i] > 0 ? xv[i] : real_t(0);
  return x.graph().append(std::move(n));
}

Tensor sigmoid(Tensor x) {
  Node n = make_node(Op::Sigmoid, x.shape(), x);
  const auto xv = x.value();
  for (size_t i = 0; i < n.value.size(); ++i) {
    const real_t v = xv[i];
    if (v >= 0) {
      n.value[i] = real_t(1) / (real_t(1) + std::exp(-v));
    } else {
      const real_t e = std::exp(v);
      n.value[i] = e / (real_t(1) + e);
    }
  }
  return x.graph().append(std::move(n));
}

Tensor scale(Tensor x, double factor) {
  Node n = make_node(Op::Scale, x.shape(), x);
  n.scalar = factor;
  const auto xv = x.value();
  for (size_t i = 0; i < n.value.size(); ++i) n.value[i] = static_cast<real_t>(factor) * xv[i];
  return x.graph().append(std::move(n));
}

Tensor sum(Tensor x) {
  Node n = make_node(Op::Sum, {1}, x);
  real_t acc = 0;
  for (real_t v : x.value()) acc += v;
  n.value[0] = acc;
  return x.graph().append(std::move(n));
}

Tensor reshape(Tensor x, Shape shape) {
  require(shape_numel(shape) == x.numel(),
          "reshape: cannot view " + shape_to_string(x.shape()) + " as " +
              shape_to_string(shape));
  Node n = make_node(Op::Reshape, std::move(shape), x);
  const auto xv = x.value();
  std::copy(xv.begin(), xv.end(), n.value.begin());
  return x.graph().append(std::move(n));
}

Tensor matmul(Tensor a, Tensor b) {
  require(a.shape().size() == 2 && b.shape().size() == 2 && a.shape()[1] == b.shape()[0],
          "matmul: incompatible shapes " + shape_to_string(a.shape()) + " x " +
              shape_to_string(b.shape()));
  const int64_t m = a.shape()[0], k = a.shape()[1], p = b.shape()[1];
  Node n = make_node(Op::Matmul, {m, p}, a, b);
  ConstMap A(a.value().data(), m, k), B(b.value().data(), k, p);
  MutMap C(n.value.data(), m, p);
  C.noalias() = A * B;
  return a.graph().append(std::move(n));
}

Tensor softmax(Tensor x) {
  require(x.shape().size() == 1, "softmax: expects rank-1, got " + shape_to_string(x.shape()));
  Node n = make_node(Op::Softmax, x.shape(), x);
  softmax_slice(x.value().data(), n.value.data(), x.numel(), 1);
  return x.graph().append(std::move(n));
}

Tensor neighbor_softmax(Tensor x, int64_t k) {
  require(x.shape().size() == 2, "neighbor_softmax: expects rank-2");
  const int64_t rows = x.shape()[0], cols = x.shape()[1];
  require(k >= 1 && rows % k == 0,
          "neighbor_softmax: row count " + std::to_string(rows) +
              " is not a multiple of k=" + std::to_string(k));
  Node n = make_node(Op::NeighborSoftmax, x.shape(), x);
  n.extent = k;
  const real_t* xv = x.value().data();
  for (int64_t g = 0; g < rows / k; ++g)
    for (int64_t c = 0; c < cols; ++c)
      softmax_slice(xv + g * k * cols + c, n.value.data() + g * k * cols + c, k, cols);
  return x.graph().append(std::move(n));
}

namespace {

// shared kernel for L1Normalize / L1NormalizeSegments: normalizes consecutive
// segments of seg_len entries, saving each denominator
void l1_segments_forward(Node& n, std::span<const real_t> xv, int64_t seg_len,
                         L1NormPolicy policy) {
  const int64_t segments = static_cast<int64_t>(xv.size()) / seg_len;
  n.saved.resize(static_cast<size_t>(segments));
  for (int64_t s = 0; s < segments; ++s) {
    real_t acc = 0;
    for (int64_t i = 0; i < seg_len; ++i) acc += std::abs(xv[s * seg_len + i]);
    if (policy == L1NormPolicy::Strict) {
      if (acc <= static_cast<real_t>(l1_denominator_floor))
        throw NumericError("l1_normalize: degenerate denominator " + std::to_string(acc));
    } else if (acc < static_cast<real_t>(l1_denominator_floor)) {
      acc += static_cast<real_t>(l1_denominator_floor);
    }
    n.saved[static_cast<size_t>(s)] = acc;
    for (int64_t i = 0; i < seg_len; ++i)
      n.value[static_cast<size_t>(s * seg_len + i)] = xv[s * seg_len + i] / acc;
  }
}

}  // namespace

Tensor l1_normalize(Tensor x, L1NormPolicy policy) {
  require(x.shape().size() == 1,
          "l1_normalize: expects rank-1, got " + shape_to_string(x.shape()));
  Node n = make_node(Op::L1Normalize, x.shape(), x);
  n.extent = x.numel();
  n.scalar = policy == L1NormPolicy::Strict ? 1.0 : 0.0;
  l1_segments_forward(n, x.value(), x.numel(), policy);
  return x.graph().append(std::move(n));
}

Tensor l1_normalize_segments(Tensor x, int64_t seg_len, L1NormPolicy policy) {
  require(x.shape().size() == 2, "l1_normalize_segments: expects rank-2");
  require(seg_len >= 1 && x.shape()[1] % seg_len == 0,
          "l1_normalize_segments: column count " + std::to_string(x.shape()[1]) +
              " is not a multiple of segment length " + std::to_string(seg_len));
  Node n = make_node(Op::L1NormalizeSegments, x.shape(), x);
  n.extent = seg_len;
  n.scalar = policy == L1NormPolicy::Strict ? 1.0 : 0.0;
  l1_segments_forward(n, x.value(), seg_len, policy);
  return x.graph().append(std::move(n));
}

Tensor gather_rows(Tensor x, std::shared_ptr<const std::vector<int64_t>> idx) {
  require(x.shape().size() == 2, "gather_rows: expects rank-2");
  const int64_t rows = x.shape()[0], cols = x.shape()[1];
  for (int64_t i : *idx)
    require(i >= 0 && i < rows, "gather_rows: index " + std::to_string(i) +
                                    " out of range for " + shape_to_string(x.shape()));
  Node n = make_node(Op::GatherRows, {static_cast<int64_t>(idx->size()), cols}, x);
  n.indices = std::move(idx);
  const real_t* xv = x.value().data();
  for (size_t m = 0; m < n.indices->size(); ++m)
    std::copy_n(xv + (*n.indices)[m] * cols, cols, n.value.data() + static_cast<int64_t>(m) * cols);
  return x.graph().append(std::move(n));
}

Tensor segment_sum(Tensor x, int64_t k) {
  require(x.shape().size() == 2, "segment_sum: expects rank-2");
  const int64_t rows = x.shape()[0], cols = x.shape()[1];
  require(k >= 1 && rows % k == 0, "segment_sum: row count " + std::to_string(rows) +
                                       " is not a multiple of k=" + std::to_string(k));
  Node n = make_node(Op::SegmentSum, {rows / k, cols}, x);
  n.extent = k;
  const real_t* xv = x.value().data();
  for (int64_t g = 0; g < rows / k; ++g) {
    real_t* out = n.value.data() + g * cols;
    std::fill_n(out, cols, real_t(0));
    for (int64_t j = 0; j < k; ++j) {
      const real_t* row = xv + (g * k + j) * cols;
      for (int64_t c = 0; c < cols; ++c) out[c] += row[c];
    }
  }
  return x.graph().append(std::move(n));
}

Tensor pair_matvec(Tensor m, Tensor v) {
  require(m.shape().size() == 2 && v.shape().size() == 2, "pair_matvec: expects rank-2");
  const int64_t pairs = m.shape()[0], d = v.shape()[1];
  require(v.shape()[0] == pairs && m.shape()[1] == d * d,
          "pair_matvec: incompatible shapes " + shape_to_string(m.shape()) + " and " +
              shape_to_string(v.shape()));
  Node n = make_node(Op::PairMatvec, {pairs, d}, m, v);
  const real_t* mv = m.value().data();
  const real_t* vv = v.value().data();
  for (int64_t p = 0; p < pairs; ++p) {
    const real_t* M = mv + p * d * d;
    const real_t* x = vv + p * d;
    real_t* y = n.value.data() + p * d;
    for (int64_t r = 0; r < d; ++r) {
      real_t acc = 0;
      for (int64_t c = 0; c < d; ++c) acc += M[r * d + c] * x[c];
      y[r] = acc;
    }
  }
  return m.graph().append(std::move(n));
}

Tensor row_dot(Tensor a, Tensor b) {
  require_same_shape("row_dot", a, b);
  require(a.shape().size() == 2, "row_dot: expects rank-2");
  const int64_t rows = a.shape()[0], cols = a.shape()[1];
  Node n = make_node(Op::RowDot, {rows, 1}, a, b);
  const real_t* av = a.value().data();
  const real_t* bv = b.value().data();
  for (int64_t r = 0; r < rows; ++r) {
    real_t acc = 0;
    for (int64_t c = 0; c < cols; ++c) acc += av[r * cols + c] * bv[r * cols + c];
    n.value[static_cast<size_t>(r)] = acc;
  }
  return a.graph().append(std::move(n));
}

Tensor scale_rows(Tensor x, Tensor s) {
  require(x.shape().size() == 2 && s.shape().size() == 2 && s.shape()[1] == 1 &&
              s.shape()[0] == x.shape()[0],
          "scale_rows: incompatible shapes " + shape_to_string(x.shape()) + " and " +
              shape_to_string(s.shape()));
  Node n = make_node(Op::ScaleRows, x.shape(), x, s);
  const int64_t rows = x.shape()[0], cols = x.shape()[1];
  const real_t* xv = x.value().data();
  const real_t* sv = s.value().data();
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < cols; ++c)
      n.value[static_cast<size_t>(r * cols + c)] = sv[r] * xv[r * cols + c];
  return x.graph().append(std::move(n));
}

Tensor embed_diagonal(Tensor x) {
  require(x.shape().size() == 2, "embed_diagonal: expects rank-2");
  const int64_t rows = x.shape()[0], d = x.shape()[1];
  Node n = make_node(Op::EmbedDiagonal, {rows, d * d}, x);
  n.extent = d;
  std::fill(n.value.begin(), n.value.end(), real_t(0));
  const real_t* xv = x.value().data();
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < d; ++c) n.value[static_cast<size_t>(r * d * d + c * d + c)] = xv[r * d + c];
  return x.graph().append(std::move(n));
}

Tensor embed_scaled_identity(Tensor s, int64_t d) {
  require(s.shape().size() == 2 && s.shape()[1] == 1,
          "embed_scaled_identity: expects [P x 1], got " + shape_to_string(s.shape()));
  const int64_t rows = s.shape()[0];
  Node n = make_node(Op::EmbedScaledIdentity, {rows, d * d}, s);
  n.extent = d;
  std::fill(n.value.begin(), n.value.end(), real_t(0));
  const real_t* sv = s.value().data();
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < d; ++c) n.value[static_cast<size_t>(r * d * d + c * d + c)] = sv[r];
  return s.graph().append(std::move(n));
}

Tensor bce_loss(Tensor pred, Tensor labels) {
  require_same_graph(pred, labels);
  require(pred.numel() == labels.numel(),
          "bce_loss: prediction count " + std::to_string(pred.numel()) +
              " != label count " + std::to_string(labels.numel()));
  const auto lv = labels.value();
  for (real_t y : lv)
    if (y != real_t(0) && y != real_t(1))
      throw NumericError("bce_loss: label not in {0,1}: " + std::to_string(y));
  Node n = make_node(Op::BceLoss, {1}, pred, labels);
  const auto pv = pred.value();
  const real_t eps = real_t(1e-7);
  double acc = 0;
  for (size_t i = 0; i < pv.size(); ++i) {
    const real_t o = std::clamp(pv[i], eps, real_t(1) - eps);
    acc += lv[i] * std::log(o) + (real_t(1) - lv[i]) * std::log(real_t(1) - o);
  }
  n.value[0] = static_cast<real_t>(-acc / static_cast<double>(pv.size()));
  return pred.graph().append(std::move(n));
}

Tensor affine(Tensor x, Tensor w, Tensor b) { return add(matmul(x, w), b); }

// ---- backward kernels ----

namespace detail {

void backprop(Graph& g, Node& n) {
  Node* na = n.a >= 0 ? &g.node(n.a) : nullptr;
  Node* nb = n.b >= 0 ? &g.node(n.b) : nullptr;
  const bool wa = na && !na->grad.empty();
  const bool wb = nb && !nb->grad.empty();
  const real_t* gr = n.grad.data();
  const size_t count = n.value.size();

  switch (n.op) {
    case Op::Add:
      if (wa)
        for (size_t i = 0; i < count; ++i) na->grad[i] += gr[i];
      if (wb)
        for (size_t i = 0; i < count; ++i) nb->grad[i] += gr[i];
      break;
    case Op::AddRow: {
      if (wa)
        for (size_t i = 0; i < count; ++i) na->grad[i] += gr[i];
      if (wb) {
        const int64_t cols = n.shape[1];
        for (size_t i = 0; i < count; ++i) nb->grad[static_cast<size_t>(i % static_cast<size_t>(cols))] += gr[i];
      }
      break;
    }
    case Op::Sub:
      if (wa)
        for (size_t i = 0; i < count; ++i) na->grad[i] += gr[i];
      if (wb)
        for (size_t i = 0; i < count; ++i) nb->grad[i] -= gr[i];
      break;
    case Op::Hadamard:
      if (wa)
        for (size_t i = 0; i < count; ++i) na->grad[i] += gr[i] * nb->value[i];
      if (wb)
        for (size_t i = 0; i < count; ++i) nb->grad[i] += gr[i] * na->value[i];
      break;
    case Op::Relu:
      if (wa)
        for (size_t i = 0; i < count; ++i)
          if (na->value[i] > 0) na->grad[i] += gr[i];
      break;
    case Op::Sigmoid:
      if (wa)
        for (size_t i = 0; i < count; ++i)
          na->grad[i] += gr[i] * n.value[i] * (real_t(1) - n.value[i]);
      break;
    case Op::Scale:
      if (wa)
        for (size_t i = 0; i < count; ++i) na->grad[i] += static_cast<real_t>(n.scalar) * gr[i];
      break;
    case Op::Sum:
      if (wa)
        for (size_t i = 0; i < na->grad.size(); ++i) na->grad[i] += gr[0];
      break;
    case Op::Reshape:
      if (wa)
        for (size_t i = 0; i < count; ++i) na->grad[i] += gr[i];
      break;
    case Op::Matmul: {
      const int64_t m = na->shape[0], k = na->shape[1], p = nb->shape[1];
      ConstMap A(na->value.data(), m, k), B(nb->value.data(), k, p), G(gr, m, p);
      if (wa) MutMap(na->grad.data(), m, k).noalias() += G * B.transpose();
      if (wb) MutMap(nb->grad.data(), k, p).noalias() += A.transpose() * G;
      break;
    }
    case Op::Softmax:
      if (wa) softmax_slice_backward(n.value.data(), gr, na->grad.data(), n.shape[0], 1);
      break;
    case Op::NeighborSoftmax: {
      if (!wa) break;
      const int64_t k = n.extent, cols = n.shape[1];
      for (int64_t grp = 0; grp < n.shape[0] / k; ++grp)
        for (int64_t c = 0; c < cols; ++c) {
          const int64_t off = grp * k * cols + c;
          softmax_slice_backward(n.value.data() + off, gr + off, na->grad.data() + off, k,
                                 cols);
        }
      break;
    }
    case Op::L1Normalize:
    case Op::L1NormalizeSegments: {
      if (!wa) break;
      const int64_t seg = n.extent;
      const int64_t segments = static_cast<int64_t>(count) / seg;
      for (int64_t s = 0; s < segments; ++s) {
        const real_t denom = n.saved[static_cast<size_t>(s)];
        real_t dot = 0;
        for (int64_t i = 0; i < seg; ++i)
          dot += gr[s * seg + i] * n.value[static_cast<size_t>(s * seg + i)];
        for (int64_t i = 0; i < seg; ++i) {
          const real_t x = na->value[static_cast<size_t>(s * seg + i)];
          na->grad[static_cast<size_t>(s * seg + i)] +=
              (gr[s * seg + i] - static_cast<real_t>(sign_of(x)) * dot) / denom;
        }
      }
      break;
    }
    case Op::GatherRows: {
      if (!wa) break;
      const int64_t cols = n.shape[1];
      for (size_t m = 0; m < n.indices->size(); ++m) {
        real_t* dst = na->grad.data() + (*n.indices)[m] * cols;
        const real_t* src = gr + static_cast<int64_t>(m) * cols;
        for (int64_t c = 0; c < cols; ++c) dst[c] += src[c];
      }
      break;
    }
    case Op::SegmentSum: {
      if (!wa) break;
      const int64_t k = n.extent, cols = n.shape[1];
      for (int64_t grp = 0; grp < n.shape[0]; ++grp)
        for (int64_t j = 0; j < k; ++j) {
          real_t* dst = na->grad.data() + (grp * k + j) * cols;
          const real_t* src = gr + grp * cols;
          for (int64_t c = 0; c < cols; ++c) dst[c] += src[c];
        }
      break;
    }
    case Op::PairMatvec: {
      const int64_t pairs = n.shape[0], d = n.shape[1];
      for (int64_t p = 0; p < pairs; ++p) {
        const real_t* gy = gr + p * d;
        const real_t* M = na->value.data() + p * d * d;
        const real_t* x = nb->value.data() + p * d;
        if (wa) {
          real_t* dM = na->grad.data() + p * d * d;
          for (int64_t r = 0; r < d; ++r)
            for (int64_t c = 0; c < d; ++c) dM[r * d + c] += gy[r] * x[c];
        }
        if (wb) {
          real_t* dx = nb->grad.data() + p * d;
          for (int64_t r = 0; r < d; ++r)
            for (int64_t c = 0; c < d; ++c) dx[c] += M[r * d + c] * gy[r];
        }
      }
      break;
    }
    case Op::RowDot: {
      const int64_t rows = n.shape[0], cols = na->shape[1];
      for (int64_t r = 0; r < rows; ++r) {
        const real_t gy = gr[r];
        for (int64_t c = 0; c < cols; ++c) {
          if (wa) na->grad[static_cast<size_t>(r * cols + c)] += gy * nb->value[static_cast<size_t>(r * cols + c)];
          if (wb) nb->grad[static_cast<size_t>(r * cols + c)] += gy * na->value[static_cast<size_t>(r * cols + c)];
        }
      }
      break;
    }
    case Op::ScaleRows: {
      const int64_t rows = n.shape[0], cols = n.shape[1];
      for (int64_t r = 0; r < rows; ++r)
        for (int64_t c = 0; c < cols; ++c) {
          const size_t i = static_cast<size_t>(r * cols + c);
          if (wa) na->grad[i] += nb->value[static_cast<size_t>(r)] * gr[i];
          if (wb) nb->grad[static_cast<size_t>(r)] += na->value[i] * gr[i];
        }
      break;
    }
    case Op::EmbedDiagonal: {
      if (!wa) break;
      const int64_t rows = na->shape[0], d = n.extent;
      for (int64_t r = 0; r < rows; ++r)
        for (int64_t c = 0; c < d; ++c)
          na->grad[static_cast<size_t>(r * d + c)] += gr[r * d * d + c * d + c];
      break;
    }
    case Op::EmbedScaledIdentity: {
      if (!wa) break;
      const int64_t rows = na->shape[0], d = n.extent;
      for (int64_t r = 0; r < rows; ++r)
        for (int64_t c = 0; c < d; ++c) na->grad[static_cast<size_t>(r)] += gr[r * d * d + c * d + c];
      break;
    }
    case Op::BceLoss: {
      if (!wa) break;
      const real_t eps = real_t(1e-7);
      const real_t inv_n = real_t(1) / static_cast<real_t>(na->value.size());
      for (size_t i = 0; i < na->value.size(); ++i) {
        const real_t o = na->value[i];
        if (o <= eps || o >= real_t(1) - eps) continue;  // clamp region: zero slope
        const real_t y = nb->value[i];
        na->grad[i] += gr[0] * inv_n * (-y / o + (real_t(1) - y) / (real_t(1) - o));
      }
      break;
    }
    case Op::Constant:
    case Op::Parameter:
      break;
  }
}

}  // namespace detail

}  // namespace tensorformer
