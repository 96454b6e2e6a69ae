#include "dokl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dokl/errors.hpp"

namespace dokl {

double HyperParams::epsilon() const {
  if (epsilon_override >= 0.0) return epsilon_override;
  if (parsimony >= 0.0) return parsimony * eta * eta;
  throw std::invalid_argument(
      "hyper-parameters: neither parsimony nor an epsilon override is set");
}

void validate(const HyperParams& hp) {
  if (!(hp.eta > 0.0)) {
    throw std::invalid_argument("step size eta must be positive");
  }
  if (!(hp.lambda > 0.0)) {
    throw std::invalid_argument("regularizer lambda must be positive");
  }
  if (!(hp.eta * hp.lambda < 1.0)) {
    throw std::invalid_argument("need eta * lambda < 1, got " +
                                std::to_string(hp.eta * hp.lambda));
  }
  if (hp.delta < 0.0) {
    throw std::invalid_argument("dual regularizer delta must be >= 0");
  }
  if (hp.nu < 0.0) {
    throw std::invalid_argument("tightening nu must be >= 0");
  }
  if (!(hp.radius_RB > 0.0)) {
    throw std::invalid_argument("ball radius must be positive");
  }
  if (hp.komp_jitter < 0.0) {
    throw std::invalid_argument("jitter must be >= 0");
  }
  if (!(hp.epsilon() >= 0.0)) {
    throw std::invalid_argument("compression budget must be >= 0");
  }
}

namespace {

// l'(f(x), y) + sum_j mu_ij h'(f(x), f_j(x)), the scalar multiplying the new
// kernel atom in the functional gradient.
double gradient_coefficient(const AgentState& state, double fx, double y,
                            const std::map<int, double>& neighbor_evals) {
  double coef = loss_deriv(state.loss, fx, y);
  for (const auto& [j, mu] : state.out_duals) {
    const auto it = neighbor_evals.find(j);
    if (it == neighbor_evals.end()) {
      throw ProtocolError("agent " + std::to_string(state.id) +
                          ": exchange did not deliver f_j(x) for neighbor " +
                          std::to_string(j));
    }
    coef += mu * proximity_deriv_first(state.prox, fx, it->second);
  }
  return coef;
}

}  // namespace

KernelExpansion primal_uncompressed(const AgentState& state,
                                    const Sample& sample,
                                    const std::map<int, double>& neighbor_evals,
                                    const HyperParams& hp) {
  validate(hp);
  const double fx = evaluate(state.f, sample.x);
  const double coef =
      gradient_coefficient(state, fx, sample.y, neighbor_evals);
  return append_atom(scale_weights(state.f, 1.0 - hp.eta * hp.lambda),
                     sample.x, -hp.eta * coef);
}

AgentState primal_step(const AgentState& state, const Sample& sample,
                       const std::map<int, double>& neighbor_evals,
                       const HyperParams& hp, PrimalDiagnostics* diag) {
  KernelExpansion tilde = primal_uncompressed(state, sample, neighbor_evals, hp);
  if (hp.adapt_bandwidth) tilde.spec = adapt_bandwidth(tilde);
  auto [pruned, count] = komp_prune(tilde, {hp.epsilon(), hp.komp_jitter});
  if (diag) {
    diag->pruned_count = count;
    diag->compression_error = hilbert_norm(difference(pruned, tilde));
  }
  AgentState next = state;
  next.f = ball_project(pruned, hp.radius_RB);
  return next;
}

std::map<int, double> dual_step(const AgentState& state, const Sample& sample,
                                const std::map<int, double>& neighbor_evals,
                                const std::map<int, double>& topology_gamma,
                                const HyperParams& hp) {
  validate(hp);
  const double fx = evaluate(state.f, sample.x);
  const double decay = 1.0 - hp.delta * hp.eta * hp.eta;
  std::map<int, double> next;
  for (const auto& [j, mu] : state.out_duals) {
    const auto ev = neighbor_evals.find(j);
    if (ev == neighbor_evals.end()) {
      throw ProtocolError("agent " + std::to_string(state.id) +
                          ": exchange did not deliver f_j(x) for neighbor " +
                          std::to_string(j));
    }
    const auto g = topology_gamma.find(j);
    if (g == topology_gamma.end()) {
      throw ProtocolError("agent " + std::to_string(state.id) +
                          ": no tolerance gamma for neighbor " +
                          std::to_string(j));
    }
    const double h = proximity(state.prox, fx, ev->second);
    next[j] =
        std::max(mu * decay + hp.eta * (h - g->second + hp.nu), 0.0);
  }
  return next;
}

KernelSpec adapt_bandwidth(const KernelExpansion& f_uncompressed) {
  const KernelExpansion& f = f_uncompressed;
  validate(f);
  const Eigen::Index M = f.order();
  if (M < 2) return f.spec;

  const double sig2 = f.spec.bandwidth * f.spec.bandwidth;
  double mean = 0.0;
  for (Eigen::Index l = 0; l < M; ++l) {
    // Factor out the nearest neighbor's weight so the softmin stays finite
    // when distances dwarf the current bandwidth.
    double min_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < M; ++k) {
      if (k == l) continue;
      min_d2 = std::min(min_d2, (f.D.col(l) - f.D.col(k)).squaredNorm());
    }
    double num = 0.0, den = 0.0;
    for (Eigen::Index k = 0; k < M; ++k) {
      if (k == l) continue;
      const double d2 = (f.D.col(l) - f.D.col(k)).squaredNorm();
      const double w = std::exp(-(d2 - min_d2) / (2.0 * sig2));
      num += w * d2;
      den += w;
    }
    mean += num / den / static_cast<double>(M);
  }
  const double sigma = std::sqrt(mean);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) return f.spec;  // degenerate
  KernelSpec out = f.spec;
  out.bandwidth = sigma;
  return out;
}

double compute_nu(const TheoryConstants& c, double T, double alpha) {
  if (!(c.xi > 0.0)) {
    throw std::invalid_argument("compute_nu: Slater margin xi must be > 0");
  }
  if (!(c.R_B > 0.0) || !(c.V > 0.0) || !(c.C > 0.0) || !(c.X > 0.0) ||
      !(c.lambda > 0.0) || !(c.L_h > 0.0) || !(c.E > 0.0) || !(c.K1 > 0.0)) {
    throw std::invalid_argument("compute_nu: constants must be positive");
  }
  if (c.delta < 0.0) {
    throw std::invalid_argument("compute_nu: delta must be >= 0");
  }
  if (!(T > 0.0) || alpha < 0.0) {
    throw std::invalid_argument("compute_nu: need T > 0 and alpha >= 0");
  }
  const double Q = 4.0 * c.V * c.R_B * (c.C * c.X + c.lambda * c.R_B) / c.xi;
  const double K = 8.0 * c.V * c.X * c.X * c.C * c.C +
                   4.0 * c.V * c.lambda * c.lambda * c.R_B * c.R_B +
                   2.0 * c.E * c.K1 +
                   2.0 * c.E * c.L_h * c.L_h * c.X * c.X * c.R_B * c.R_B;
  const double zeta =
      0.5 * (c.R_B * c.R_B + (1.0 + c.delta) * (2.0 + 2.0 * Q * Q) + K);
  const double lam_cap = 4.0 * c.V * c.R_B;
  return zeta / std::sqrt(T) + lam_cap * alpha;
}

}  // namespace dokl
