#pragma once

#include <string>
#include <vector>

#include "tensorformer/rng.hpp"
#include "tensorformer/tensor.hpp"

namespace tensorformer {

// A shared MLP: affine layers with relu on all but the last. Parameters are
// named "<prefix>.w<i>" / "<prefix>.b<i>" and initialized uniform in
// [-sqrt(1/fan_in), +sqrt(1/fan_in)].
class Mlp {
 public:
  Mlp() = default;

  static Mlp create(Graph& g, const std::string& prefix, std::vector<int64_t> dims,
                    Rng& rng);
  // Binds to parameters that already exist in the graph (checkpoint loads).
  static Mlp bind(Graph& g, const std::string& prefix, std::vector<int64_t> dims);

  // x is [R x in_dim]; returns [R x out_dim].
  Tensor forward(Tensor x) const;

  int64_t in_dim() const { return dims_.front(); }
  int64_t out_dim() const { return dims_.back(); }
  int64_t layer_count() const { return static_cast<int64_t>(weights_.size()); }
  const std::vector<int64_t>& dims() const { return dims_; }

  Tensor weight(int64_t layer) const { return weights_[static_cast<size_t>(layer)]; }
  Tensor bias(int64_t layer) const { return biases_[static_cast<size_t>(layer)]; }

  // Test support: overwrite a layer in place.
  void set_layer(int64_t layer, const std::vector<real_t>& w, const std::vector<real_t>& b);

 private:
  std::vector<int64_t> dims_;
  std::vector<Tensor> weights_, biases_;
};

}  // namespace tensorformer
