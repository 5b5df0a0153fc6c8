#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tensorformer/common.hpp"

namespace tensorformer {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& s);
std::string shape_to_string(const Shape& s);

enum class Op : uint8_t {
  Constant,
  Parameter,
  Add,
  AddRow,
  Sub,
  Hadamard,
  Relu,
  Sigmoid,
  Scale,
  Sum,
  Reshape,
  Matmul,
  Softmax,
  NeighborSoftmax,
  L1Normalize,
  L1NormalizeSegments,
  GatherRows,
  SegmentSum,
  PairMatvec,
  RowDot,
  ScaleRows,
  EmbedDiagonal,
  EmbedScaledIdentity,
  BceLoss,
};

// Behaviour of L1 normalization when the denominator is near zero.
// Floor adds `l1_denominator_floor` to every denominator; Strict throws.
enum class L1NormPolicy : uint8_t { Floor, Strict };

inline constexpr double l1_denominator_floor = 1e-12;

using NodeId = int32_t;

class Graph;

// Cheap handle to a node of a Graph. The node owns the row-major value
// buffer and, after backward(), a gradient buffer of identical shape.
class Tensor {
 public:
  Tensor() = default;

  bool valid() const { return graph_ != nullptr; }
  NodeId id() const { return id_; }
  Graph& graph() const { return *graph_; }

  const Shape& shape() const;
  int64_t numel() const;
  int64_t rows() const;  // rank-2 only
  int64_t cols() const;  // rank-2 only

  std::span<const real_t> value() const;
  std::span<real_t> value_mut();  // in-place edits (optimizer, grad_check)
  std::span<const real_t> grad() const;
  bool requires_grad() const;

  double item() const;  // scalar tensors

 private:
  friend class Graph;
  Tensor(Graph* g, NodeId id) : graph_(g), id_(id) {}

  Graph* graph_ = nullptr;
  NodeId id_ = -1;
};

struct Node {
  Op op = Op::Constant;
  Shape shape;
  std::vector<real_t> value;
  std::vector<real_t> grad;   // allocated lazily by backward()
  std::vector<real_t> saved;  // op-specific activations (denominators, ...)
  NodeId a = -1, b = -1;
  double scalar = 0.0;  // Scale factor; EmbedDiagonal dim; etc.
  int64_t extent = 0;   // group size k / segment length, op dependent
  std::shared_ptr<const std::vector<int64_t>> indices;  // GatherRows
  bool requires_grad = false;
  std::string name;  // parameters only
};

// A reverse-mode tape. Nodes are appended in topological order (every
// input id precedes its consumer), so backward() is a single reverse
// sweep that touches each node exactly once. Parameters must be created
// before any op node; reset() truncates the tape back to the parameters
// so one graph can be reused across training iterations.
//
// A graph instance is single-threaded; distinct graphs are independent.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Tensor constant(Shape shape, std::vector<real_t> values);
  Tensor constant_scalar(double v) { return constant({1}, {static_cast<real_t>(v)}); }
  Tensor zeros(Shape shape);
  Tensor parameter(const std::string& name, Shape shape, std::vector<real_t> values);

  // Truncates all op nodes, keeping parameters (values intact, grads dropped).
  void reset();

  // Reverse sweep from a scalar loss. Accumulates into .grad of every node
  // that requires grad. Call zero_grad() between repeated invocations.
  void backward(Tensor loss);
  void zero_grad();

  Node& node(NodeId id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(NodeId id) const { return nodes_[static_cast<size_t>(id)]; }
  int64_t size() const { return static_cast<int64_t>(nodes_.size()); }

  std::vector<Tensor> parameters();
  Tensor find_parameter(const std::string& name);

  // Allocation high-water mark in bytes across value/grad/saved buffers,
  // since the last reset_peak_bytes(). Used by the complexity probe.
  size_t peak_bytes() const { return peak_bytes_; }
  void reset_peak_bytes() { peak_bytes_ = live_bytes_; }

  // Internal: appends a node whose value has been computed. Op builders in
  // ops.cpp are the only intended callers.
  Tensor append(Node&& n);

 private:
  void track_bytes(const Node& n);

  std::vector<Node> nodes_;
  NodeId parameter_count_ = 0;
  size_t live_bytes_ = 0;
  size_t peak_bytes_ = 0;
};

// ---- op builders (diffcore surface) ----

Tensor add(Tensor a, Tensor b);       // same shape, or [R x C] + [C] row broadcast
Tensor sub(Tensor a, Tensor b);       // same shape
Tensor hadamard(Tensor a, Tensor b);  // same shape
Tensor relu(Tensor x);
Tensor sigmoid(Tensor x);
Tensor scale(Tensor x, double factor);
Tensor sum(Tensor x);  // scalar
Tensor reshape(Tensor x, Shape shape);
Tensor matmul(Tensor a, Tensor b);
Tensor softmax(Tensor x);  // rank-1
Tensor l1_normalize(Tensor x, L1NormPolicy policy = L1NormPolicy::Floor);  // rank-1

// Column-wise softmax over each consecutive group of k rows. Input [N*k x C].
Tensor neighbor_softmax(Tensor x, int64_t k);
// Each row of x is split into consecutive segments of length seg_len; every
// segment is divided by its own L1 norm.
Tensor l1_normalize_segments(Tensor x, int64_t seg_len,
                             L1NormPolicy policy = L1NormPolicy::Floor);

Tensor gather_rows(Tensor x, std::shared_ptr<const std::vector<int64_t>> idx);
Tensor segment_sum(Tensor x, int64_t k);   // [N*k x C] -> [N x C]
Tensor pair_matvec(Tensor m, Tensor v);    // [P x d*d] , [P x d] -> [P x d]
Tensor row_dot(Tensor a, Tensor b);        // [P x d] x2 -> [P x 1]
Tensor scale_rows(Tensor x, Tensor s);     // [P x C] * [P x 1]
Tensor embed_diagonal(Tensor x);           // [P x d] -> [P x d*d]
Tensor embed_scaled_identity(Tensor s, int64_t d);  // [P x 1] -> [P x d*d]

// Mean binary cross entropy; labels must be exactly 0 or 1 and do not
// receive gradients. Predictions are clamped to [1e-7, 1 - 1e-7].
Tensor bce_loss(Tensor pred, Tensor labels);

// affine(x, w, b) = x * w + b with b broadcast across rows
Tensor affine(Tensor x, Tensor w, Tensor b);

}  // namespace tensorformer
