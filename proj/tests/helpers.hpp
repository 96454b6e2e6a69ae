#pragma once

#include <initializer_list>

#include <Eigen/Dense>

#include "dokl/expansion.hpp"

namespace testutil {

inline Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return v;
}

// Scalar-feature expansion from plain lists; the workhorse fixture.
inline dokl::KernelExpansion expansion1d(double sigma,
                                         std::initializer_list<double> atoms,
                                         std::initializer_list<double> weights) {
  dokl::KernelExpansion f;
  f.spec.bandwidth = sigma;
  f.D.resize(1, static_cast<Eigen::Index>(atoms.size()));
  f.w.resize(static_cast<Eigen::Index>(weights.size()));
  Eigen::Index i = 0;
  for (double a : atoms) f.D(0, i++) = a;
  i = 0;
  for (double w : weights) f.w[i++] = w;
  return f;
}

}  // namespace testutil
