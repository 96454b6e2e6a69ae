#pragma once

#include <cstdint>

namespace dokl {

// Counter-based random streams. Every draw is a pure function of
// (seed, stream kind, agent, round, draw index), so results never depend on
// evaluation order or thread scheduling. The word function is the splitmix64
// output stage applied to a keyed counter; statistical quality is more than
// enough for simulation noise and placement.
enum class StreamKind : std::uint64_t {
  Position = 1,      // node placement in the synthetic field
  ProcessNoise = 2,  // field process noise v_t
  ObsNoise = 3,      // observation noise n_{i,t}
  DataDraw = 4,      // which stored sample a CSV-backed agent sees
  Dictionary = 5,    // fixed-dictionary placement for the RBF baseline
  Instance = 6,      // one-off instance construction (targets, offsets)
};

std::uint64_t splitmix64(std::uint64_t z);

// Keyed stream of iid draws, indexed by a counter.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamKind kind, std::uint64_t agent,
             std::uint64_t round);

  // Uniform on [0, 1), 53-bit resolution.
  double uniform(std::uint64_t idx) const;
  // Standard normal via Box-Muller; one value per index.
  double normal(std::uint64_t idx) const;

 private:
  std::uint64_t word(std::uint64_t idx) const;
  std::uint64_t key_;
};

}  // namespace dokl
