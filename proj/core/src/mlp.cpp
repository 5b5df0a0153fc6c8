#include "tensorformer/mlp.hpp"

#include <cmath>

namespace tensorformer {

static void check_dims(const std::vector<int64_t>& dims) {
  if (dims.size() < 2) throw ShapeError("mlp: needs at least [in, out] dims");
  for (int64_t d : dims)
    if (d < 1) throw ShapeError("mlp: nonpositive layer width " + std::to_string(d));
}

Mlp Mlp::create(Graph& g, const std::string& prefix, std::vector<int64_t> dims, Rng& rng) {
  check_dims(dims);
  Mlp m;
  m.dims_ = std::move(dims);
  for (size_t l = 0; l + 1 < m.dims_.size(); ++l) {
    const int64_t fan_in = m.dims_[l], fan_out = m.dims_[l + 1];
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    std::vector<real_t> w(static_cast<size_t>(fan_in * fan_out));
    std::vector<real_t> b(static_cast<size_t>(fan_out));
    for (real_t& v : w) v = static_cast<real_t>(rng.uniform(-bound, bound));
    for (real_t& v : b) v = static_cast<real_t>(rng.uniform(-bound, bound));
    const std::string suffix = std::to_string(l);
    m.weights_.push_back(g.parameter(prefix + ".w" + suffix, {fan_in, fan_out}, std::move(w)));
    m.biases_.push_back(g.parameter(prefix + ".b" + suffix, {fan_out}, std::move(b)));
  }
  return m;
}

Mlp Mlp::bind(Graph& g, const std::string& prefix, std::vector<int64_t> dims) {
  check_dims(dims);
  Mlp m;
  m.dims_ = std::move(dims);
  for (size_t l = 0; l + 1 < m.dims_.size(); ++l) {
    const std::string suffix = std::to_string(l);
    m.weights_.push_back(g.find_parameter(prefix + ".w" + suffix));
    m.biases_.push_back(g.find_parameter(prefix + ".b" + suffix));
  }
  return m;
}

Tensor Mlp::forward(Tensor x) const {
  if (x.shape().size() != 2 || x.shape()[1] != in_dim())
    throw ShapeError("mlp: input " + shape_to_string(x.shape()) + " does not match in_dim " +
                     std::to_string(in_dim()));
  Tensor h = x;
  for (size_t l = 0; l < weights_.size(); ++l) {
    h = affine(h, weights_[l], biases_[l]);
    if (l + 1 < weights_.size()) h = relu(h);
  }
  return h;
}

void Mlp::set_layer(int64_t layer, const std::vector<real_t>& w, const std::vector<real_t>& b) {
  Tensor wt = weights_[static_cast<size_t>(layer)];
  Tensor bt = biases_[static_cast<size_t>(layer)];
  if (static_cast<int64_t>(w.size()) != wt.numel() || static_cast<int64_t>(b.size()) != bt.numel())
    throw ShapeError("set_layer: size mismatch");
  std::copy(w.begin(), w.end(), wt.value_mut().begin());
  std::copy(b.begin(), b.end(), bt.value_mut().begin());
}

}  // namespace tensorformer
