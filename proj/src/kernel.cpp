#include "dokl/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dokl {

void validate(const KernelSpec& spec) {
  if (!(spec.bandwidth > 0.0)) {
    throw std::invalid_argument("kernel bandwidth must be positive, got " +
                                std::to_string(spec.bandwidth));
  }
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& x2) {
  validate(spec);
  if (x.size() != x2.size()) {
    throw std::invalid_argument("kernel_eval: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(x2.size()) + ")");
  }
  const double d2 = (x - x2).squaredNorm();
  return std::exp(-d2 / (2.0 * spec.bandwidth * spec.bandwidth));
}

Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& D,
                              const Eigen::VectorXd& x) {
  validate(spec);
  if (D.cols() > 0 && D.rows() != x.size()) {
    throw std::invalid_argument("kernel_vector: dictionary dimension " +
                                std::to_string(D.rows()) + " vs point " +
                                std::to_string(x.size()));
  }
  const double inv2s2 = 1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
  Eigen::VectorXd out(D.cols());
  for (Eigen::Index m = 0; m < D.cols(); ++m) {
    out[m] = std::exp(-(D.col(m) - x).squaredNorm() * inv2s2);
  }
  return out;
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& D,
                              const Eigen::MatrixXd& D2) {
  validate(spec);
  if (D.cols() > 0 && D2.cols() > 0 && D.rows() != D2.rows()) {
    throw std::invalid_argument("kernel_matrix: dictionary dimensions " +
                                std::to_string(D.rows()) + " vs " +
                                std::to_string(D2.rows()));
  }
  const double inv2s2 = 1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
  Eigen::MatrixXd out(D.cols(), D2.cols());
  for (Eigen::Index n = 0; n < D2.cols(); ++n) {
    for (Eigen::Index m = 0; m < D.cols(); ++m) {
      out(m, n) = std::exp(-(D.col(m) - D2.col(n)).squaredNorm() * inv2s2);
    }
  }
  return out;
}

}  // namespace dokl
