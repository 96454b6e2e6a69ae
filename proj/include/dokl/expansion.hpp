#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "dokl/kernel.hpp"

namespace dokl {

// A function in the RKHS as a finite kernel expansion
//   f(x) = sum_m w[m] * k(D.col(m), x).
// D is p x M with one retained feature point per column; M is the model
// order. M = 0 is the zero function. Values are immutable: every operation
// returns a new expansion, which keeps update-equivalence tests direct and
// makes sharing across threads safe.
struct KernelExpansion {
  KernelSpec spec;
  Eigen::MatrixXd D;  // p x M
  Eigen::VectorXd w;  // M

  Eigen::Index order() const { return w.size(); }
  Eigen::Index dim() const { return D.rows(); }
};

// Throws std::invalid_argument unless columns(D) == size(w) and the spec is
// valid.
void validate(const KernelExpansion& f);

// f(x); 0 when the expansion is empty. Dimension mismatch throws.
double evaluate(const KernelExpansion& f, const Eigen::VectorXd& x);

// <f, g>_H = w_f' K_{D_f, D_g} w_g. Both expansions must share one spec;
// mismatched specs live in different spaces and throw std::invalid_argument.
double hilbert_inner(const KernelExpansion& f, const KernelExpansion& g);

// ||f||_H = sqrt(w' K_{DD} w). Round-off can push the quadratic form a hair
// negative; it is clamped to zero.
double hilbert_norm(const KernelExpansion& f);

// Same dictionary, every weight multiplied by c.
KernelExpansion scale_weights(const KernelExpansion& f, double c);

// Appends one atom at x with weight w_new; order grows by exactly 1.
KernelExpansion append_atom(const KernelExpansion& f, const Eigen::VectorXd& x,
                            double w_new);

// Difference f - g in the shared space, as the concatenated expansion with
// g's weights negated. Used for projection-error measurements.
KernelExpansion difference(const KernelExpansion& f, const KernelExpansion& g);

// Projection onto the centered Hilbert ball: unchanged when
// ||f|| <= radius, otherwise weights scaled by radius / ||f||.
// radius must be positive.
KernelExpansion ball_project(const KernelExpansion& f, double radius);

// Flat text checkpoint record: p, M, sigma, row-major D, then w, one value
// per token, 17 significant digits. That is enough for doubles to round
// trip exactly, well inside the 1e-12 relative budget.
void serialize(const KernelExpansion& f, std::ostream& out);
KernelExpansion deserialize(std::istream& in);
std::string serialize_string(const KernelExpansion& f);
KernelExpansion deserialize_string(const std::string& text);

}  // namespace dokl
