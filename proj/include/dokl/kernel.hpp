#pragma once

#include <Eigen/Dense>

namespace dokl {

enum class KernelFamily { Gaussian };

// Kernel choice plus hyper-parameters. Only the Gaussian
//   k(x, x') = exp(-||x - x'||^2 / (2 sigma^2))
// ships; the enum keeps room for other families without breaking callers.
// Gaussian is normalized, k(x, x) = 1, so sup_x sqrt(k(x, x)) = 1.
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double bandwidth = 1.0;  // sigma > 0, feature-space units

  bool operator==(const KernelSpec&) const = default;
};

// Throws std::invalid_argument on non-positive bandwidth.
void validate(const KernelSpec& spec);

// k(x, x2). Throws std::invalid_argument on dimension mismatch or bad spec.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& x2);

// Column m of the result is k(D.col(m), x). D is p x M, one atom per column;
// M = 0 yields an empty vector.
Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& D,
                              const Eigen::VectorXd& x);

// (m, n) entry is k(D.col(m), D2.col(n)). kernel_matrix(spec, D, D) is
// symmetric positive semidefinite with unit diagonal.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& D,
                              const Eigen::MatrixXd& D2);

}  // namespace dokl
