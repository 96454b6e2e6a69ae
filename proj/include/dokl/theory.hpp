#pragma once

#include <map>
#include <vector>

#include "dokl/agent.hpp"

namespace dokl {

// One-sided bound check. observed is computed from the actual state; bound
// from the user-asserted constants. ok means observed <= bound; a failure
// with correct constants indicates an implementation bug, never noise.
struct GradientBoundReport {
  double observed = 0.0;
  double bound = 0.0;
  bool ok = false;
};

// Mean-square envelope of the stochastic primal gradient,
//   ||lambda f + (l' + sum_j mu_ij h') k(x,.)||_H^2
//     <= 4 V X^2 C^2 + 4 V X^2 L_h^2 E ||mu||^2 + 2 V lambda^2 R_B^2,
// evaluated for one agent (mu restricted to its own duals keeps the
// inequality one-sided for any V >= 1).
GradientBoundReport gradient_norm_bound(
    const AgentState& state, const Sample& sample,
    const std::map<int, double>& neighbor_evals, const HyperParams& hp,
    const TheoryConstants& c);

// Dual analog: sum_j (h_ij - gamma_ij + nu - delta eta mu_ij)^2
//   <= E (2 K1 + 2 L_h^2 X^2 R_B^2 + 2 delta^2 eta^2 ||mu||^2)
// with the user-asserted K1.
GradientBoundReport dual_gradient_norm_bound(
    const AgentState& state, const Sample& sample,
    const std::map<int, double>& neighbor_evals,
    const std::map<int, double>& topology_gamma, const HyperParams& hp,
    const TheoryConstants& c);

// Compression keeps each round's output within the budget of its
// uncompressed target: ||after - before||_H <= epsilon, checked with a
// 1e-8 absolute slack for accumulated rounding.
bool projection_error_bound(const KernelExpansion& before,
                            const KernelExpansion& after,
                            const HyperParams& hp);

// Least-squares slope of log(series[t] - offset) against log t over the
// second half of the series (t is 1-based). series[t-1] is typically the
// prefix-averaged objective gap; offset removes a known floor. Entries at
// or below the offset are skipped. Requires >= 2000 entries with >= 16
// usable points in the fit window.
double rate_regression(const std::vector<double>& series, double offset = 0.0);

}  // namespace dokl
