#pragma once

#include <map>

#include "dokl/expansion.hpp"
#include "dokl/komp.hpp"
#include "dokl/objectives.hpp"
#include "dokl/sample.hpp"

namespace dokl {

// Step sizes and budgets shared by every agent. The compression budget is
// usually given through the parsimony constant P as epsilon = P * eta^2;
// setting epsilon_override >= 0 bypasses P. alpha() = epsilon / eta is the
// knob trading model order against accuracy.
struct HyperParams {
  double eta = 0.01;            // step size, > 0
  double lambda = 1e-5;         // Tikhonov weight, > 0, eta * lambda < 1
  double delta = 0.0;           // dual regularizer, >= 0
  double nu = 0.0;              // constraint tightening, >= 0
  double parsimony = -1.0;      // P >= 0, or unset (< 0)
  double epsilon_override = -1.0;  // direct budget, or unset (< 0)
  double radius_RB = 100.0;     // Hilbert ball radius, > 0
  bool adapt_bandwidth = false;
  double komp_jitter = 1e-10;

  double epsilon() const;
  double alpha() const { return epsilon() / eta; }
};

void validate(const HyperParams& hp);

// One agent: its function, the duals it owns (one per outgoing directed
// edge), and its loss/proximity bindings. The kernel spec, including an
// adaptive bandwidth, lives inside f.spec. Steps are pure: they take the
// round-t state and return the round-(t+1) pieces, so primal and dual
// updates both read the same snapshot (simultaneous saddle-point update).
struct AgentState {
  int id = 0;
  KernelExpansion f;
  std::map<int, double> out_duals;  // neighbor id -> mu_ij >= 0
  LossSpec loss;
  ProximitySpec prox;
};

// Stochastic functional gradient step before compression:
//   (1 - eta lambda) f + [-eta (l'(f(x), y) + sum_j mu_ij h'(f(x), f_j(x)))]
//   k(x, .).
// neighbor_evals must hold f_j(x) for every dual owner j; a missing entry is
// a ProtocolError. Model order grows by exactly one.
KernelExpansion primal_uncompressed(const AgentState& state,
                                    const Sample& sample,
                                    const std::map<int, double>& neighbor_evals,
                                    const HyperParams& hp);

// Optional measurements from one primal step.
struct PrimalDiagnostics {
  double compression_error = 0.0;  // ||f_pruned - f_uncompressed||_H
  int pruned_count = 0;
};

// Full primal round: gradient step, optional bandwidth adaptation on the
// uncompressed dictionary (compression then runs under the new bandwidth),
// matching-pursuit pruning to epsilon, and projection onto the R_B ball.
// Duals are carried through unchanged.
AgentState primal_step(const AgentState& state, const Sample& sample,
                       const std::map<int, double>& neighbor_evals,
                       const HyperParams& hp,
                       PrimalDiagnostics* diag = nullptr);

// Dual ascent from the round-t snapshot:
//   mu_ij <- [ mu_ij (1 - delta eta^2) + eta (h(f_i(x), f_j(x)) - gamma_ij
//              + nu) ]_+
// topology_gamma maps neighbor id -> gamma_ij.
std::map<int, double> dual_step(const AgentState& state, const Sample& sample,
                                const std::map<int, double>& neighbor_evals,
                                const std::map<int, double>& topology_gamma,
                                const HyperParams& hp);

// Online bandwidth rule on a (pre-compression) dictionary: the new sigma^2
// is the mean over atoms l of the kernel-weighted average squared distance
// to the other atoms, weighted under the current sigma. Dictionaries with
// fewer than two atoms, or whose atoms coincide, leave sigma unchanged.
KernelSpec adapt_bandwidth(const KernelExpansion& f_uncompressed);

// Problem constants feeding the tightening rule and the bound checks. All
// are user-asserted properties of the instance, not estimated. E counts
// directed constraint edges (the dual vector dimension). delta is the dual
// regularizer used in the run (the zeta formula carries a 1 + delta factor).
struct TheoryConstants {
  double R_B = 1.0;    // iterate ball radius
  double V = 1.0;      // agent count
  double C = 1.0;      // loss derivative bound
  double X = 1.0;      // sup_x sqrt(k(x, x)), 1 for the Gaussian
  double lambda = 0.0; // Tikhonov weight
  double xi = 0.0;     // Slater margin, must be > 0 where required
  double L_h = 1.0;    // proximity Lipschitz modulus
  double E = 0.0;      // directed constraint count
  double K1 = 1.0;     // dual-gradient constant
  double delta = 0.0;  // dual regularizer
};

// Tightening constant nu = zeta T^{-1/2} + Lambda alpha with zeta and Lambda
// at their lower bounds:
//   Lambda = 4 V R_B,
//   zeta = 1/2 [ R_B^2 + (1 + delta)(2 + 2 (4 V R_B (C X + lambda R_B) /
//          xi)^2) + K ],
//   K = 8 V X^2 C^2 + 4 V lambda^2 R_B^2 + 2 E K1 + 2 E L_h^2 X^2 R_B^2.
// Throws std::invalid_argument when xi <= 0 or another constant is invalid.
double compute_nu(const TheoryConstants& c, double T, double alpha);

}  // namespace dokl
