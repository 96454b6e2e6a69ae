#include "dokl/rng.hpp"

#include <cmath>
#include <numbers>

namespace dokl {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, StreamKind kind,
                       std::uint64_t agent, std::uint64_t round) {
  std::uint64_t k = splitmix64(seed + kGamma);
  k = splitmix64(k ^ (static_cast<std::uint64_t>(kind) + kGamma));
  k = splitmix64(k ^ (agent + kGamma));
  k = splitmix64(k ^ (round + kGamma));
  key_ = k;
}

std::uint64_t CounterRng::word(std::uint64_t idx) const {
  return splitmix64(key_ + idx * kGamma);
}

double CounterRng::uniform(std::uint64_t idx) const {
  return static_cast<double>(word(idx) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t idx) const {
  // Box-Muller on two sub-draws; u1 shifted into (0, 1] so log stays finite.
  const double u1 =
      (static_cast<double>(word(2 * idx) >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(word(2 * idx + 1) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dokl
