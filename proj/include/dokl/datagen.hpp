#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dokl/sample.hpp"

namespace dokl {

// Spatio-temporally correlated scalar field over V sensor positions:
//   s_t = mean + C' (1 sin(omega t) + v_t),   v_t ~ N(0, process_noise_var I)
//   y_t = s_t + n_t,                          n_t ~ N(0, obs_noise_var) iid
// C is the upper-triangular Cholesky factor, C' C = correlation, so the
// process-noise component of s_t has covariance process_noise_var *
// correlation. Noise parameters are variances. All draws come from
// counter-based streams keyed by (seed, kind, agent, round): sampling is a
// pure function of (seed, t), independent of evaluation order.
struct FieldModel {
  Eigen::MatrixXd positions;    // 2 x V
  Eigen::MatrixXd correlation;  // R_s, unit diagonal, PSD
  Eigen::MatrixXd chol;         // C with C' C = correlation
  Eigen::VectorXd mean;         // (1/V, 2/V, ..., 1)
  double omega = 2.0;
  double process_noise_var = 0.1;
  double obs_noise_var = 0.5;
  std::uint64_t seed = 0;
};

// Latent field s and observations y at integer round t.
struct FieldRound {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
};
FieldRound sample_round(const FieldModel& model, std::uint64_t t);

// Uniform node placement in a [0, area_side]^2 square (seeded); correlation
// entries are exp(-distance / area_side), i.e. the exponential kernel on
// positions normalized to the unit square (raw meter distances would drive
// every off-diagonal entry to numerical zero). Cholesky retries once with a
// 1e-10 diagonal jitter and then raises NumericError.
FieldModel build_field(int V, double area_side, double omega,
                       std::uint64_t seed);

// Same model over caller-supplied positions (2 x V). build_field delegates
// here after drawing placements; tests and custom deployments call it
// directly.
FieldModel build_field_from_positions(const Eigen::MatrixXd& positions,
                                      double area_side, double omega,
                                      std::uint64_t seed);

// Per-node observation table read from CSV. Nodes are reindexed to
// 0..V-1 by ascending node_id; positions come from each node's first row and
// must stay consistent across its rows.
struct NodeTable {
  std::vector<long long> ids;               // ascending original ids
  Eigen::MatrixXd positions;                // 2 x V
  std::vector<std::vector<Sample>> samples; // per node, file order
  Eigen::Index feature_dim = 0;             // p
};

// Input schema (exact header): node_id,pos_x,pos_y,x0..x{p-1},y with p >= 1,
// UTF-8, '.' decimal separator. Parse problems throw std::invalid_argument
// carrying the 1-based line number; a header-only file is "no data rows".
NodeTable load_node_csv(const std::string& path);

}  // namespace dokl
