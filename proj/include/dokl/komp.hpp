#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dokl/expansion.hpp"

namespace dokl {

// Compression budget for destructive matching pursuit. epsilon is in
// Hilbert-norm units. jitter is the initial ridge added to Gram diagonals
// before solving; on failure it escalates by x10 up to 1e-4, after which a
// NumericError is raised. Duplicate atoms (singular Grams) are the common
// case the pruner must handle, not an exception path.
struct KompBudget {
  double epsilon = 0.0;
  double jitter = 1e-10;
};

struct PruneResult {
  KernelExpansion expansion;
  int pruned_count = 0;
};

// Least-squares weights for representing `target` on dictionary D:
//   argmin_w || target - w' k_D(.) ||_H,
// computed by solving (K_DD + jitter I) w = K_{D,Dt} w_t with one step of
// iterative refinement against the unjittered system.
Eigen::VectorXd refit_weights(const KernelExpansion& target,
                              const Eigen::MatrixXd& D, double jitter = 1e-10);

// Hilbert norm of the residual after refitting `target` on the atoms listed
// in keep (indices into target's dictionary, no duplicates). Empty keep
// returns ||target||_H.
double removal_error(const KernelExpansion& target,
                     const std::vector<Eigen::Index>& keep,
                     double jitter = 1e-10);

// Destructive kernel orthogonal matching pursuit with pre-fitting. Each pass
// refits every leave-one-out candidate against the ORIGINAL target, removes
// the argmin-error atom (smallest index on ties) while that error stays
// within budget, and stops once the minimal error exceeds it. Returns the
// compressed expansion (weights refit on the survivors) and the number of
// atoms removed. Guarantees ||result - target||_H <= epsilon + 1e-8.
// epsilon = 0 still removes exactly redundant atoms (error <= 1e-10 slack).
PruneResult komp_prune(const KernelExpansion& target, const KompBudget& budget);

}  // namespace dokl
