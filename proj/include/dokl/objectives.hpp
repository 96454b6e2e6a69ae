#pragma once

namespace dokl {

enum class LossFamily { SquaredError, Huber };

// Local regression loss in (prediction, target). Huber is quadratic inside
// the threshold band and linear outside, so its derivative magnitude never
// exceeds huber_phi. lipschitz_C is the user-asserted derivative bound used
// by the theory helpers; it is not derived from the family.
struct LossSpec {
  LossFamily family = LossFamily::Huber;
  double huber_phi = 1e4;
  double lipschitz_C = 1.0;
};

enum class ProximityFamily { AbsoluteDifference, SquaredDifference };

// Pairwise proximity penalty h(zi, zj) >= 0 with h(z, z) = 0. Absolute
// difference is globally Lipschitz; squared difference is Lipschitz only on
// bounded iterates (which the Hilbert-ball projection provides).
struct ProximitySpec {
  ProximityFamily family = ProximityFamily::AbsoluteDifference;
  double lipschitz_Lh = 1.0;
};

void validate(const LossSpec& spec);
void validate(const ProximitySpec& spec);

double loss(const LossSpec& spec, double prediction, double target);

// d loss / d prediction. At the Huber kink |target - prediction| = phi the
// quadratic-branch value (+-phi) is returned, a valid subgradient choice.
double loss_deriv(const LossSpec& spec, double prediction, double target);

double proximity(const ProximitySpec& spec, double zi, double zj);

// d h / d zi. Absolute difference returns sign(zi - zj) with subgradient 0
// at the tie; squared difference returns 2 (zi - zj).
double proximity_deriv_first(const ProximitySpec& spec, double zi, double zj);

}  // namespace dokl
