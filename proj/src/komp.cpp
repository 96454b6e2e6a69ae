#include "dokl/komp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dokl/errors.hpp"

namespace dokl {

namespace {

constexpr double kZeroSlack = 1e-10;  // redundancy slack at epsilon = 0
constexpr double kMaxJitter = 1e-4;

// Solves (K + jitter I) w = b, escalating jitter x10 until the factorization
// succeeds and the backward error is small. One refinement step against the
// unjittered K pulls the solution toward the exact least-squares weights, so
// duplicate-atom removals measure as (near) zero error instead of O(jitter).
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& K, const Eigen::VectorXd& b,
                            double jitter) {
  const double scale = K.cwiseAbs().maxCoeff() + 1.0;
  double j = jitter;
  for (;;) {
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += j;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Kj);
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXd w = ldlt.solve(b);
      w += ldlt.solve(b - K * w);
      const double backward =
          (Kj * w - b).norm() / (scale * w.norm() + b.norm() + 1e-300);
      if (w.allFinite() && backward <= 1e-9) return w;
    }
    if (j >= kMaxJitter) {
      throw NumericError(
          "ridge_solve: Gram solve failed at jitter " + std::to_string(j) +
          " (size " + std::to_string(K.rows()) +
          ", max |K| = " + std::to_string(scale - 1.0) + ")");
    }
    j = std::min(std::max(j, 1e-10) * 10.0, kMaxJitter);
  }
}

// Residual norm of fitting the target (Gram Kall, weights wt) on the subset
// `keep`, given candidate weights w on that subset. Uses the coefficient
// difference quadratic form, which stays accurate when the residual is tiny.
double residual_norm(const Eigen::MatrixXd& Kall, const Eigen::VectorXd& wt,
                     const std::vector<Eigen::Index>& keep,
                     const Eigen::VectorXd& w) {
  Eigen::VectorXd delta = wt;
  for (std::size_t c = 0; c < keep.size(); ++c) delta[keep[c]] -= w[c];
  return std::sqrt(std::max(delta.dot(Kall * delta), 0.0));
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& Kall,
                          const std::vector<Eigen::Index>& keep) {
  Eigen::MatrixXd out(keep.size(), keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    for (std::size_t i = 0; i < keep.size(); ++i) {
      out(i, j) = Kall(keep[i], keep[j]);
    }
  }
  return out;
}

Eigen::VectorXd subvector(const Eigen::VectorXd& z,
                          const std::vector<Eigen::Index>& keep) {
  Eigen::VectorXd out(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) out[i] = z[keep[i]];
  return out;
}

}  // namespace

Eigen::VectorXd refit_weights(const KernelExpansion& target,
                              const Eigen::MatrixXd& D, double jitter) {
  validate(target);
  if (D.cols() == 0) {
    throw std::invalid_argument("refit_weights: empty dictionary");
  }
  if (target.order() > 0 && target.dim() != D.rows()) {
    throw std::invalid_argument("refit_weights: dimension mismatch");
  }
  const Eigen::MatrixXd Kdd = kernel_matrix(target.spec, D, D);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(D.cols());
  if (target.order() > 0) {
    b = kernel_matrix(target.spec, D, target.D) * target.w;
  }
  return ridge_solve(Kdd, b, jitter);
}

double removal_error(const KernelExpansion& target,
                     const std::vector<Eigen::Index>& keep, double jitter) {
  validate(target);
  if (keep.empty()) return hilbert_norm(target);
  std::vector<Eigen::Index> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || sorted.back() >= target.order() ||
      std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument(
        "removal_error: keep indices must be distinct and within the "
        "dictionary");
  }
  const Eigen::MatrixXd Kall = kernel_matrix(target.spec, target.D, target.D);
  const Eigen::VectorXd z = Kall * target.w;
  const Eigen::VectorXd w =
      ridge_solve(submatrix(Kall, sorted), subvector(z, sorted), jitter);
  return residual_norm(Kall, target.w, sorted, w);
}

PruneResult komp_prune(const KernelExpansion& target,
                       const KompBudget& budget) {
  validate(target);
  if (budget.epsilon < 0.0) {
    throw std::invalid_argument("komp_prune: negative budget");
  }
  if (target.order() == 0) return {target, 0};

  const double threshold = std::max(budget.epsilon, kZeroSlack);
  const Eigen::MatrixXd Kall = kernel_matrix(target.spec, target.D, target.D);
  const Eigen::VectorXd z = Kall * target.w;

  // alive holds surviving original indices in increasing order, so a strict
  // argmin scan breaks ties toward the smallest index.
  std::vector<Eigen::Index> alive(target.order());
  std::iota(alive.begin(), alive.end(), 0);
  Eigen::VectorXd surviving_w = target.w;

  while (!alive.empty()) {
    double best_err = std::numeric_limits<double>::infinity();
    std::size_t best_pos = 0;
    Eigen::VectorXd best_w;
    std::vector<Eigen::Index> kept;
    kept.reserve(alive.size() - 1);
    for (std::size_t pos = 0; pos < alive.size(); ++pos) {
      kept.assign(alive.begin(), alive.end());
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(pos));
      double err;
      Eigen::VectorXd w;
      if (kept.empty()) {
        err = std::sqrt(std::max(target.w.dot(z), 0.0));
      } else {
        w = ridge_solve(submatrix(Kall, kept), subvector(z, kept),
                        budget.jitter);
        err = residual_norm(Kall, target.w, kept, w);
      }
      if (err < best_err) {
        best_err = err;
        best_pos = pos;
        best_w = std::move(w);
      }
    }
    if (best_err > threshold) break;
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(best_pos));
    surviving_w = std::move(best_w);
  }

  const int pruned = static_cast<int>(target.order() - alive.size());
  if (pruned == 0) return {target, 0};  // untouched, weights not refit

  KernelExpansion out;
  out.spec = target.spec;
  out.D.resize(target.dim(), alive.size());
  for (std::size_t c = 0; c < alive.size(); ++c) {
    out.D.col(c) = target.D.col(alive[c]);
  }
  out.w = surviving_w;
  return {std::move(out), pruned};
}

}  // namespace dokl
