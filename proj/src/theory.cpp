#include "dokl/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "dokl/errors.hpp"

namespace dokl {

GradientBoundReport gradient_norm_bound(
    const AgentState& state, const Sample& sample,
    const std::map<int, double>& neighbor_evals, const HyperParams& hp,
    const TheoryConstants& c) {
  const double fx = evaluate(state.f, sample.x);
  double coef = loss_deriv(state.loss, fx, sample.y);
  double mu_sq = 0.0;
  for (const auto& [j, mu] : state.out_duals) {
    const auto it = neighbor_evals.find(j);
    if (it == neighbor_evals.end()) {
      throw ProtocolError("gradient_norm_bound: missing evaluation from " +
                          std::to_string(j));
    }
    coef += mu * proximity_deriv_first(state.prox, fx, it->second);
    mu_sq += mu * mu;
  }
  // ||lambda f + coef k(x,.)||^2 expanded through the reproducing property.
  const double kxx = kernel_eval(state.f.spec, sample.x, sample.x);
  const double fnorm = hilbert_norm(state.f);
  GradientBoundReport r;
  r.observed = hp.lambda * hp.lambda * fnorm * fnorm +
               2.0 * hp.lambda * coef * fx + coef * coef * kxx;
  r.bound = 4.0 * c.V * c.X * c.X * c.C * c.C +
            4.0 * c.V * c.X * c.X * c.L_h * c.L_h * c.E * mu_sq +
            2.0 * c.V * c.lambda * c.lambda * c.R_B * c.R_B;
  r.ok = std::isfinite(r.observed) && r.observed <= r.bound;
  return r;
}

GradientBoundReport dual_gradient_norm_bound(
    const AgentState& state, const Sample& sample,
    const std::map<int, double>& neighbor_evals,
    const std::map<int, double>& topology_gamma, const HyperParams& hp,
    const TheoryConstants& c) {
  const double fx = evaluate(state.f, sample.x);
  GradientBoundReport r;
  double mu_sq = 0.0;
  for (const auto& [j, mu] : state.out_duals) {
    const auto ev = neighbor_evals.find(j);
    const auto g = topology_gamma.find(j);
    if (ev == neighbor_evals.end() || g == topology_gamma.end()) {
      throw ProtocolError("dual_gradient_norm_bound: missing data for edge " +
                          std::to_string(state.id) + "->" + std::to_string(j));
    }
    const double grad = proximity(state.prox, fx, ev->second) - g->second +
                        hp.nu - hp.delta * hp.eta * mu;
    r.observed += grad * grad;
    mu_sq += mu * mu;
  }
  r.bound = c.E * (2.0 * c.K1 + 2.0 * c.L_h * c.L_h * c.X * c.X * c.R_B * c.R_B +
                   2.0 * hp.delta * hp.delta * hp.eta * hp.eta * mu_sq);
  r.ok = std::isfinite(r.observed) && r.observed <= r.bound;
  return r;
}

bool projection_error_bound(const KernelExpansion& before,
                            const KernelExpansion& after,
                            const HyperParams& hp) {
  const double err = hilbert_norm(difference(after, before));
  return err <= hp.epsilon() + 1e-8;
}

double rate_regression(const std::vector<double>& series, double offset) {
  if (series.size() < 2000) {
    throw std::invalid_argument(
        "rate_regression: need at least 2000 rounds, got " +
        std::to_string(series.size()));
  }
  const std::size_t begin = series.size() / 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t k = begin; k < series.size(); ++k) {
    const double gap = series[k] - offset;
    if (!(gap > 0.0) || !std::isfinite(gap)) continue;
    const double x = std::log(static_cast<double>(k + 1));
    const double y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 16) {
    throw std::invalid_argument(
        "rate_regression: fewer than 16 usable points above the offset");
  }
  const double d = static_cast<double>(n);
  const double denom = sxx - sx * sx / d;
  if (!(denom > 0.0)) {
    throw std::invalid_argument("rate_regression: degenerate fit window");
  }
  return (sxy - sx * sy / d) / denom;
}

}  // namespace dokl
