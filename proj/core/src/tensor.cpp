#include "tensorformer/tensor.hpp"

#include <cmath>
#include <sstream>

namespace tensorformer {

namespace detail {
void backprop(Graph& g, Node& n);  // ops.cpp
}

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return n;
}

std::string shape_to_string(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

const Shape& Tensor::shape() const { return graph_->node(id_).shape; }
int64_t Tensor::numel() const { return shape_numel(shape()); }

int64_t Tensor::rows() const {
  const Shape& s = shape();
  if (s.size() != 2) throw ShapeError("rows(): tensor is not rank-2: " + shape_to_string(s));
  return s[0];
}

int64_t Tensor::cols() const {
  const Shape& s = shape();
  if (s.size() != 2) throw ShapeError("cols(): tensor is not rank-2: " + shape_to_string(s));
  return s[1];
}

std::span<const real_t> Tensor::value() const { return graph_->node(id_).value; }
std::span<real_t> Tensor::value_mut() { return graph_->node(id_).value; }
std::span<const real_t> Tensor::grad() const { return graph_->node(id_).grad; }
bool Tensor::requires_grad() const { return graph_->node(id_).requires_grad; }

double Tensor::item() const {
  if (numel() != 1)
    throw ShapeError("item(): tensor has " + std::to_string(numel()) + " elements");
  return static_cast<double>(value()[0]);
}

void Graph::track_bytes(const Node& n) {
  live_bytes_ += (n.value.capacity() + n.grad.capacity() + n.saved.capacity()) * sizeof(real_t);
  if (live_bytes_ > peak_bytes_) peak_bytes_ = live_bytes_;
}

Tensor Graph::append(Node&& n) {
  if (shape_numel(n.shape) != static_cast<int64_t>(n.value.size()))
    throw ShapeError("node value size does not match shape " + shape_to_string(n.shape));
  nodes_.emplace_back(std::move(n));
  track_bytes(nodes_.back());
  return Tensor(this, static_cast<NodeId>(nodes_.size() - 1));
}

Tensor Graph::constant(Shape shape, std::vector<real_t> values) {
  Node n;
  n.op = Op::Constant;
  n.shape = std::move(shape);
  n.value = std::move(values);
  return append(std::move(n));
}

Tensor Graph::zeros(Shape shape) {
  std::vector<real_t> v(static_cast<size_t>(shape_numel(shape)), real_t(0));
  return constant(std::move(shape), std::move(v));
}

Tensor Graph::parameter(const std::string& name, Shape shape, std::vector<real_t> values) {
  if (static_cast<NodeId>(nodes_.size()) != parameter_count_)
    throw ShapeError("parameters must be created before any op node (graph already has ops)");
  Node n;
  n.op = Op::Parameter;
  n.shape = std::move(shape);
  n.value = std::move(values);
  n.requires_grad = true;
  n.name = name;
  Tensor t = append(std::move(n));
  ++parameter_count_;
  return t;
}

void Graph::reset() {
  for (size_t i = static_cast<size_t>(parameter_count_); i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    live_bytes_ -= (n.value.capacity() + n.grad.capacity() + n.saved.capacity()) * sizeof(real_t);
  }
  nodes_.resize(static_cast<size_t>(parameter_count_));
}

void Graph::zero_grad() {
  for (Node& n : nodes_) std::fill(n.grad.begin(), n.grad.end(), real_t(0));
}

void Graph::backward(Tensor loss) {
  if (!loss.valid() || &loss.graph() != this)
    throw ShapeError("backward(): loss does not belong to this graph");
  if (loss.numel() != 1)
    throw ShapeError("backward(): loss must be scalar, got " +
                     shape_to_string(loss.shape()));

  auto ensure_grad = [this](Node& n) {
    if (n.grad.empty()) {
      n.grad.assign(n.value.size(), real_t(0));
      live_bytes_ += n.grad.capacity() * sizeof(real_t);
      if (live_bytes_ > peak_bytes_) peak_bytes_ = live_bytes_;
    }
  };

  Node& ln = node(loss.id());
  ensure_grad(ln);
  ln.grad[0] += real_t(1);

  for (NodeId id = loss.id(); id >= 0; --id) {
    Node& n = node(id);
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.op == Op::Constant || n.op == Op::Parameter) continue;
    if (n.a >= 0 && node(n.a).requires_grad) ensure_grad(node(n.a));
    if (n.b >= 0 && node(n.b).requires_grad) ensure_grad(node(n.b));
    detail::backprop(*this, n);
  }
}

std::vector<Tensor> Graph::parameters() {
  std::vector<Tensor> out;
  out.reserve(static_cast<size_t>(parameter_count_));
  for (NodeId i = 0; i < parameter_count_; ++i) out.emplace_back(Tensor(this, i));
  return out;
}

Tensor Graph::find_parameter(const std::string& name) {
  for (NodeId i = 0; i < parameter_count_; ++i)
    if (nodes_[static_cast<size_t>(i)].name == name) return Tensor(this, i);
  throw ShapeError("unknown parameter: " + name);
}

}  // namespace tensorformer
