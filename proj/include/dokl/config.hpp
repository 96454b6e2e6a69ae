#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include "dokl/agent.hpp"
#include "dokl/kernel.hpp"
#include "dokl/objectives.hpp"
#include "dokl/simulator.hpp"
#include "dokl/topology.hpp"

namespace dokl {

enum class SourceKind { Field, Csv };

// Flat key=value experiment description. The key set is fixed (see
// dump_config for the full list in canonical order); unknown and duplicate
// keys are rejected with line numbers, '#' starts a comment. Defaults are
// the synthetic field benchmark: V=40, T=1500, eta=0.01, lambda=delta=1e-5,
// sigma=0.05, parsimony 8, omega=2.
struct ExperimentConfig {
  std::uint64_t T = 1500;
  std::uint64_t seed = 1;
  std::string out = "runs/out";
  bool parallel = false;
  int threads = 0;

  HyperParams hp;
  double kernel_sigma = 0.05;
  LossSpec loss;
  ProximitySpec prox;

  int V = 40;
  double connect_radius = 0.3;
  GammaRule gamma_rule = GammaRule::Correlation;
  double gamma_scale = 1.0;
  DistanceMetric metric = DistanceMetric::Euclidean;

  SourceKind source = SourceKind::Field;
  std::string csv_path;
  CsvMode csv_mode = CsvMode::Resample;
  double field_area_side = 1.0;
  double field_omega = 2.0;
  double field_process_noise_var = 0.1;
  double field_obs_noise_var = 0.5;

  ExperimentConfig();
};

// Applies one key=value pair; throws std::invalid_argument on an unknown
// key or a malformed value. Shared by the file parser and CLI overrides.
void set_key(ExperimentConfig& c, const std::string& key,
             const std::string& value);

// Parses onto the given base so subcommands can pre-seed their defaults.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path,
                             ExperimentConfig base = {});

// Canonical serialization: every key once, fixed order, doubles in
// round-trip form. load(dump(c)) reproduces c exactly.
std::string dump_config(const ExperimentConfig& c);

void validate(const ExperimentConfig& c);

// Everything a run needs that the config describes: the data feed, the
// constraint graph over the node positions, and the kernel. Validates the
// config first. For csv sources the config's agent count is replaced by the
// table's node count. A single-node instance gets the degenerate edgeless
// graph. With the Correlation gamma rule on a field source, the gamma scale
// is the deployment square's side (unit-square normalized distances).
struct ExperimentSetup {
  Topology topology;
  KernelSpec kernel;
  std::unique_ptr<DataSource> source;
};
ExperimentSetup build_setup(ExperimentConfig& c);

}  // namespace dokl
