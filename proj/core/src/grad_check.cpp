#include "tensorformer/grad_check.hpp"

#include <cmath>
#include <vector>

namespace tensorformer {

GradCheckResult grad_check(Graph& g, const std::function<Tensor()>& build_loss, double eps) {
  if (!(eps > 0.0 && eps <= 1e-2))
    throw NumericError("grad_check: eps must lie in (0, 1e-2], got " + std::to_string(eps));

  g.reset();
  g.zero_grad();
  Tensor loss = build_loss();
  g.backward(loss);

  std::vector<std::vector<real_t>> analytic;
  for (Tensor p : g.parameters()) {
    const auto gr = p.grad();
    analytic.emplace_back(gr.begin(), gr.end());
    if (analytic.back().empty())
      analytic.back().assign(static_cast<size_t>(p.numel()), real_t(0));
  }

  auto eval = [&]() {
    g.reset();
    return build_loss().item();
  };

  GradCheckResult result;
  auto params = g.parameters();
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Tensor p = params[pi];
    auto values = p.value_mut();
    for (int64_t i = 0; i < p.numel(); ++i) {
      const real_t original = values[static_cast<size_t>(i)];
      values[static_cast<size_t>(i)] = original + static_cast<real_t>(eps);
      const double f_plus = eval();
      values[static_cast<size_t>(i)] = original - static_cast<real_t>(eps);
      const double f_minus = eval();
      values[static_cast<size_t>(i)] = original;

      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double a = static_cast<double>(analytic[pi][static_cast<size_t>(i)]);
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_parameter = g.node(p.id()).name;
        result.worst_index = i;
      }
    }
  }
  g.reset();
  return result;
}

}  // namespace tensorformer
