#include "dokl/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace dokl {

void validate(const LossSpec& spec) {
  if (spec.family == LossFamily::Huber && !(spec.huber_phi > 0.0)) {
    throw std::invalid_argument("huber threshold must be positive");
  }
  if (!(spec.lipschitz_C > 0.0)) {
    throw std::invalid_argument("loss lipschitz modulus must be positive");
  }
}

void validate(const ProximitySpec& spec) {
  if (!(spec.lipschitz_Lh > 0.0)) {
    throw std::invalid_argument("proximity lipschitz modulus must be positive");
  }
}

double loss(const LossSpec& spec, double prediction, double target) {
  validate(spec);
  const double r = target - prediction;
  switch (spec.family) {
    case LossFamily::SquaredError:
      return 0.5 * r * r;
    case LossFamily::Huber: {
      const double phi = spec.huber_phi;
      if (std::abs(r) <= phi) return 0.5 * r * r;
      return phi * std::abs(r) - 0.5 * phi * phi;
    }
  }
  return 0.0;
}

double loss_deriv(const LossSpec& spec, double prediction, double target) {
  validate(spec);
  const double r = target - prediction;
  switch (spec.family) {
    case LossFamily::SquaredError:
      return -r;
    case LossFamily::Huber: {
      const double phi = spec.huber_phi;
      if (std::abs(r) <= phi) return -r;  // kink included: quadratic branch
      return r > 0.0 ? -phi : phi;
    }
  }
  return 0.0;
}

double proximity(const ProximitySpec& spec, double zi, double zj) {
  validate(spec);
  const double d = zi - zj;
  switch (spec.family) {
    case ProximityFamily::AbsoluteDifference:
      return std::abs(d);
    case ProximityFamily::SquaredDifference:
      return d * d;
  }
  return 0.0;
}

double proximity_deriv_first(const ProximitySpec& spec, double zi, double zj) {
  validate(spec);
  const double d = zi - zj;
  switch (spec.family) {
    case ProximityFamily::AbsoluteDifference:
      if (d > 0.0) return 1.0;
      if (d < 0.0) return -1.0;
      return 0.0;  // subgradient choice at the tie
    case ProximityFamily::SquaredDifference:
      return 2.0 * d;
  }
  return 0.0;
}

}  // namespace dokl
