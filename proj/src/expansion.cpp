#include "dokl/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dokl {

void validate(const KernelExpansion& f) {
  validate(f.spec);
  if (f.D.cols() != f.w.size()) {
    throw std::invalid_argument(
        "expansion: dictionary has " + std::to_string(f.D.cols()) +
        " atoms but " + std::to_string(f.w.size()) + " weights");
  }
}

double evaluate(const KernelExpansion& f, const Eigen::VectorXd& x) {
  validate(f);
  if (f.order() == 0) return 0.0;
  return f.w.dot(kernel_vector(f.spec, f.D, x));
}

double hilbert_inner(const KernelExpansion& f, const KernelExpansion& g) {
  validate(f);
  validate(g);
  if (!(f.spec == g.spec)) {
    throw std::invalid_argument(
        "hilbert_inner: expansions use different kernel specs");
  }
  if (f.order() == 0 || g.order() == 0) return 0.0;
  return f.w.dot(kernel_matrix(f.spec, f.D, g.D) * g.w);
}

double hilbert_norm(const KernelExpansion& f) {
  validate(f);
  if (f.order() == 0) return 0.0;
  const double q = f.w.dot(kernel_matrix(f.spec, f.D, f.D) * f.w);
  return std::sqrt(std::max(q, 0.0));
}

KernelExpansion scale_weights(const KernelExpansion& f, double c) {
  validate(f);
  return {f.spec, f.D, f.w * c};
}

KernelExpansion append_atom(const KernelExpansion& f, const Eigen::VectorXd& x,
                            double w_new) {
  validate(f);
  if (f.order() > 0 && f.dim() != x.size()) {
    throw std::invalid_argument("append_atom: point dimension " +
                                std::to_string(x.size()) +
                                " vs dictionary dimension " +
                                std::to_string(f.dim()));
  }
  KernelExpansion out;
  out.spec = f.spec;
  out.D.resize(x.size(), f.order() + 1);
  if (f.order() > 0) out.D.leftCols(f.order()) = f.D;
  out.D.col(f.order()) = x;
  out.w.resize(f.order() + 1);
  if (f.order() > 0) out.w.head(f.order()) = f.w;
  out.w[f.order()] = w_new;
  return out;
}

KernelExpansion difference(const KernelExpansion& f, const KernelExpansion& g) {
  validate(f);
  validate(g);
  if (!(f.spec == g.spec)) {
    throw std::invalid_argument(
        "difference: expansions use different kernel specs");
  }
  if (f.order() == 0) return scale_weights(g, -1.0);
  if (g.order() == 0) return f;
  if (f.dim() != g.dim()) {
    throw std::invalid_argument("difference: feature dimensions disagree");
  }
  KernelExpansion out;
  out.spec = f.spec;
  out.D.resize(f.dim(), f.order() + g.order());
  out.D << f.D, g.D;
  out.w.resize(f.order() + g.order());
  out.w << f.w, -g.w;
  return out;
}

KernelExpansion ball_project(const KernelExpansion& f, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("ball_project: radius must be positive");
  }
  const double n = hilbert_norm(f);
  if (n <= radius) return f;
  return scale_weights(f, radius / n);
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void serialize(const KernelExpansion& f, std::ostream& out) {
  validate(f);
  out << f.dim() << ' ' << f.order() << ' ';
  put(out, f.spec.bandwidth);
  for (Eigen::Index i = 0; i < f.D.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.D.cols(); ++j) {
      out << ' ';
      put(out, f.D(i, j));
    }
  }
  for (Eigen::Index m = 0; m < f.order(); ++m) {
    out << ' ';
    put(out, f.w[m]);
  }
  out << '\n';
}

KernelExpansion deserialize(std::istream& in) {
  Eigen::Index p = 0, M = 0;
  double sigma = 0.0;
  if (!(in >> p >> M >> sigma)) {
    throw std::invalid_argument("expansion record: truncated header");
  }
  if (p < 0 || M < 0) {
    throw std::invalid_argument("expansion record: negative dimensions");
  }
  KernelExpansion f;
  f.spec.bandwidth = sigma;
  f.D.resize(p, M);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      if (!(in >> f.D(i, j))) {
        throw std::invalid_argument("expansion record: truncated dictionary");
      }
    }
  }
  f.w.resize(M);
  for (Eigen::Index m = 0; m < M; ++m) {
    if (!(in >> f.w[m])) {
      throw std::invalid_argument("expansion record: truncated weights");
    }
  }
  validate(f);
  return f;
}

std::string serialize_string(const KernelExpansion& f) {
  std::ostringstream out;
  serialize(f, out);
  return out.str();
}

KernelExpansion deserialize_string(const std::string& text) {
  std::istringstream in(text);
  return deserialize(in);
}

}  // namespace dokl
