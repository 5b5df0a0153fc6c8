#pragma once

#include <functional>
#include <string>

#include "tensorformer/tensor.hpp"

namespace tensorformer {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  int64_t worst_index = -1;
};

// Compares reverse-mode gradients against central finite differences for
// every parameter of the graph. build_loss must deterministically rebuild
// the scalar loss from the graph's (possibly perturbed) parameter values;
// the graph is reset() before every evaluation. Relative error is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
GradCheckResult grad_check(Graph& g, const std::function<Tensor()>& build_loss,
                           double eps = 1e-4);

}  // namespace tensorformer
