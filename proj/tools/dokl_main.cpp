// dokl: decentralized online kernel learning simulator.
//
// Subcommands:
//   simulate-field  synthetic correlated-field benchmark
//   run-data        per-node CSV experiment (geographic recipe defaults)
//   baseline        penalty / rbf / centralized reference methods
//   check-bounds    evaluate a recorded metrics CSV against the envelopes
//
// Exit codes: 0 ok, 1 user/config error (or failed check), 2 numeric failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dokl/config.hpp"
#include "dokl/errors.hpp"
#include "dokl/metrics_io.hpp"
#include "dokl/rng.hpp"
#include "dokl/theory.hpp"

namespace {

using dokl::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  std::uint64_t T = 0;
  std::string out;
  double eta = 0.0;
  double parsimony = 0.0;
  double sigma = 0.0;
  double radius = 0.0;
  int V = 0;
  int threads = 0;
  bool adapt = false;
  bool parallel = false;

  CLI::Option* o_config = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_T = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_eta = nullptr;
  CLI::Option* o_parsimony = nullptr;
  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_radius = nullptr;
  CLI::Option* o_V = nullptr;
  CLI::Option* o_threads = nullptr;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  f.o_config =
      sub->add_option("--config", f.config_path,
                      "config file with key = value lines (see dump in the "
                      "run manifest for the full key set)")
          ->check(CLI::ExistingFile);
  f.o_seed = sub->add_option("--seed", f.seed, "RNG seed");
  f.o_T = sub->add_option("--T", f.T, "number of rounds");
  f.o_out = sub->add_option("--out", f.out, "output directory");
  sub->add_option("--set", f.sets,
                  "override any config key, e.g. --set lambda=1e-4");
  f.o_eta = sub->add_option("--eta", f.eta, "step size");
  f.o_parsimony = sub->add_option(
      "--P", f.parsimony, "parsimony constant (compression epsilon = P eta^2)");
  f.o_sigma = sub->add_option("--sigma", f.sigma, "Gaussian kernel bandwidth");
  f.o_radius =
      sub->add_option("--radius", f.radius, "graph connectivity radius");
  f.o_V = sub->add_option("--V", f.V, "agent count (field source only)");
  f.o_threads = sub->add_option("--threads", f.threads,
                                "worker threads (implies --parallel)");
  sub->add_flag("--adapt", f.adapt, "per-agent adaptive kernel bandwidth");
  sub->add_flag("--parallel", f.parallel, "parallel agent updates");
}

ExperimentConfig assemble(const CommonFlags& f, ExperimentConfig base) {
  if (f.o_config->count() > 0) {
    base = dokl::load_config(f.config_path, std::move(base));
  }
  for (const auto& kv : f.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    }
    dokl::set_key(base, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.o_seed->count() > 0) base.seed = f.seed;
  if (f.o_T->count() > 0) base.T = f.T;
  if (f.o_out->count() > 0) base.out = f.out;
  if (f.o_eta->count() > 0) base.hp.eta = f.eta;
  if (f.o_parsimony->count() > 0) base.hp.parsimony = f.parsimony;
  if (f.o_sigma->count() > 0) base.kernel_sigma = f.sigma;
  if (f.o_radius->count() > 0) base.connect_radius = f.radius;
  if (f.o_V->count() > 0) base.V = f.V;
  if (f.o_threads->count() > 0) {
    base.threads = f.threads;
    base.parallel = true;
  }
  if (f.adapt) base.hp.adapt_bandwidth = true;
  if (f.parallel) base.parallel = true;
  return base;
}

struct BaselineOpts {
  std::string method;
  double penalty_c = 0.08;
  int rbf_atoms = 30;
  std::string rbf_placement = "grid";
};

// Feature-space bounding box for dictionary placement.
void feature_range(const dokl::DataSource& source, Eigen::VectorXd& lo,
                   Eigen::VectorXd& hi) {
  if (const auto* csv = dynamic_cast<const dokl::CsvSource*>(&source)) {
    const auto p = csv->feature_dim();
    lo = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::infinity());
    hi = Eigen::VectorXd::Constant(p, -std::numeric_limits<double>::infinity());
    for (const auto& node : csv->table().samples) {
      for (const auto& s : node) {
        lo = lo.cwiseMin(s.x);
        hi = hi.cwiseMax(s.x);
      }
    }
  } else {
    lo = Eigen::VectorXd::Zero(1);
    hi = Eigen::VectorXd::Ones(1);
  }
}

Eigen::MatrixXd rbf_dictionary(const dokl::DataSource& source,
                               const BaselineOpts& bl, std::uint64_t seed) {
  Eigen::VectorXd lo, hi;
  feature_range(source, lo, hi);
  const auto p = lo.size();
  Eigen::MatrixXd D(p, bl.rbf_atoms);
  if (bl.rbf_placement == "grid") {
    if (p != 1) {
      throw std::invalid_argument(
          "--rbf-placement grid needs 1-dimensional features; use random");
    }
    for (int k = 0; k < bl.rbf_atoms; ++k) {
      D(0, k) = bl.rbf_atoms == 1
                    ? 0.5 * (lo[0] + hi[0])
                    : lo[0] + (hi[0] - lo[0]) * k / (bl.rbf_atoms - 1.0);
    }
  } else {
    for (int k = 0; k < bl.rbf_atoms; ++k) {
      const dokl::CounterRng rng(seed, dokl::StreamKind::Dictionary, 0,
                                 static_cast<std::uint64_t>(k));
      for (Eigen::Index d = 0; d < p; ++d) {
        D(d, k) = lo[d] + (hi[d] - lo[d]) * rng.uniform(
                                                static_cast<std::uint64_t>(d));
      }
    }
  }
  return D;
}

int run_experiment(ExperimentConfig c, const std::string& command,
                   const BaselineOpts* bl) {
  dokl::ExperimentSetup setup = dokl::build_setup(c);
  const dokl::Topology& topo = setup.topology;
  const dokl::DataSource& source = *setup.source;
  const dokl::KernelSpec spec = setup.kernel;
  auto agents = dokl::make_agents(topo, spec, c.loss, c.prox);

  dokl::RunOptions options;
  options.parallel = c.parallel;
  options.threads = c.threads;

  std::string extras;
  dokl::RunResult result;
  if (bl == nullptr) {
    result = dokl::run_primal_dual(topo, std::move(agents), source, c.hp, c.T,
                                   options);
  } else if (bl->method == "penalty") {
    extras = "# method = penalty\n# penalty_c = " +
             dokl::format_g17(bl->penalty_c) + "\n";
    result = dokl::run_penalty(topo, std::move(agents), source, c.hp, c.T,
                               bl->penalty_c, options);
  } else if (bl->method == "rbf") {
    extras = "# method = rbf\n# rbf_atoms = " + std::to_string(bl->rbf_atoms) +
             "\n# rbf_placement = " + bl->rbf_placement + "\n";
    const Eigen::MatrixXd D = rbf_dictionary(source, *bl, c.seed);
    result =
        dokl::run_rbf(topo, std::move(agents), source, c.hp, c.T, D, options);
  } else {
    extras = "# method = centralized\n";
    result = dokl::run_centralized(source, c.hp, c.T, spec, c.loss, options);
  }

  std::filesystem::create_directories(c.out);
  const std::string metrics_path = c.out + "/metrics.csv";
  dokl::write_metrics_csv(metrics_path, result.metrics);
  dokl::write_text_atomic(c.out + "/manifest",
                          "# dokl manifest\n# version = " DOKL_VERSION
                          "\n# command = " +
                              command + "\n" + extras + dump_config(c));

  if (result.early_stop) {
    std::cout << "warning: " << result.warning << "\n";
  }
  const auto& last = result.metrics.empty() ? dokl::RoundMetrics{}
                                            : result.metrics.back();
  std::cout << "rounds completed: " << result.rounds_completed << "\n"
            << "final avg loss: " << dokl::format_g17(last.avg_loss) << "\n"
            << "final avg violation: " << dokl::format_g17(last.avg_violation)
            << "\n"
            << "max model order: " << last.max_model_order << "\n"
            << "metrics: " << metrics_path << "\n";
  return 0;
}

int run_check_bounds(const std::string& metrics_path,
                     const std::string& config_path, int p_override) {
  const auto rows = dokl::read_metrics_csv(metrics_path);
  if (rows.empty()) {
    throw std::invalid_argument(metrics_path + ": no metric rows");
  }
  ExperimentConfig c = dokl::load_config(config_path);
  const dokl::ExperimentSetup setup = dokl::build_setup(c);
  const int E = setup.topology.directed_edge_count();
  const int p = p_override > 0 ? p_override
                               : static_cast<int>(setup.source->feature_dim());

  int failures = 0;
  bool finite = true;
  for (const auto& m : rows) {
    finite = finite && std::isfinite(m.global_loss) &&
             std::isfinite(m.avg_loss) && std::isfinite(m.max_violation) &&
             std::isfinite(m.avg_violation) &&
             std::isfinite(m.mean_violation_pos) && std::isfinite(m.dual_norm);
  }
  std::cout << "check finite-metrics: " << (finite ? "pass" : "FAIL") << "\n";
  failures += finite ? 0 : 1;

  const auto report = dokl::check_model_order_bound(
      rows, c.hp.alpha(), p, c.loss.lipschitz_C, c.prox.lipschitz_Lh,
      static_cast<double>(E));
  std::cout << "check model-order-bound: " << (report.ok ? "pass" : "FAIL")
            << " (beta " << dokl::format_g17(report.beta) << ", second half "
            << dokl::format_g17(report.beta_second_half) << ")\n";
  failures += report.ok ? 0 : 1;

  const auto& mid = rows[rows.size() / 2];
  const auto& last = rows.back();
  const bool trend =
      last.avg_violation <= std::max(mid.avg_violation, 0.0) + 1e-12;
  std::cout << "check avg-violation-trend: " << (trend ? "pass" : "FAIL")
            << " (midpoint " << dokl::format_g17(mid.avg_violation)
            << ", final " << dokl::format_g17(last.avg_violation) << ")\n";
  failures += trend ? 0 : 1;

  if (failures > 0) {
    std::cout << failures << " check(s) failed\n";
    return 1;
  }
  std::cout << "all checks passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized online kernel learning simulator"};
  app.require_subcommand(1);
  int rc = 0;

  auto* field = app.add_subcommand(
      "simulate-field", "synthetic correlated-field benchmark (V=40, T=1500)");
  CommonFlags field_flags;
  add_common(field, field_flags);
  field->callback([&] {
    rc = run_experiment(assemble(field_flags, ExperimentConfig{}),
                        "simulate-field", nullptr);
  });

  auto* data = app.add_subcommand(
      "run-data",
      "experiment on a node CSV (header node_id,pos_x,pos_y,x0..,y); "
      "defaults follow the geographic recipe: haversine distances, "
      "1000 km connectivity and gamma scale, bandwidth 50");
  CommonFlags data_flags;
  std::string data_path;
  std::string data_mode;
  auto* o_data = data->add_option("--data", data_path, "node CSV path")
                     ->check(CLI::ExistingFile);
  auto* o_mode = data->add_option("--mode", data_mode,
                                  "sequential (row r feeds round r) or "
                                  "resample (uniform redraws)")
                     ->check(CLI::IsMember({"sequential", "resample"}));
  add_common(data, data_flags);
  data->callback([&] {
    ExperimentConfig base;
    base.source = dokl::SourceKind::Csv;
    base.kernel_sigma = 50.0;
    base.gamma_rule = dokl::GammaRule::ExpDistance;
    base.gamma_scale = 1000.0;
    base.connect_radius = 1000.0;
    base.metric = dokl::DistanceMetric::Haversine;
    base.csv_mode = dokl::CsvMode::Resample;
    ExperimentConfig c = assemble(data_flags, std::move(base));
    if (o_data->count() > 0) c.csv_path = data_path;
    if (o_mode->count() > 0) {
      c.csv_mode = data_mode == "sequential" ? dokl::CsvMode::Sequential
                                             : dokl::CsvMode::Resample;
    }
    rc = run_experiment(std::move(c), "run-data", nullptr);
  });

  auto* baseline =
      app.add_subcommand("baseline", "reference methods for comparison runs");
  CommonFlags bl_flags;
  BaselineOpts bl;
  baseline
      ->add_option("--method", bl.method,
                   "penalty (duals pinned at a constant), rbf (fixed "
                   "dictionary, weights-only), centralized (pooled stream, "
                   "single agent, default P=0.001)")
      ->required()
      ->check(CLI::IsMember({"penalty", "rbf", "centralized"}));
  baseline->add_option("--penalty-c", bl.penalty_c,
                       "penalty coefficient (default 0.08)");
  baseline->add_option("--rbf-atoms", bl.rbf_atoms,
                       "fixed dictionary size (default 30)")
      ->check(CLI::NonNegativeNumber);
  baseline
      ->add_option("--rbf-placement", bl.rbf_placement,
                   "grid or random atom placement")
      ->check(CLI::IsMember({"grid", "random"}));
  add_common(baseline, bl_flags);
  baseline->callback([&] {
    ExperimentConfig c = assemble(bl_flags, ExperimentConfig{});
    if (bl.method == "centralized" && bl_flags.o_parsimony->count() == 0) {
      c.hp.parsimony = 0.001;
    }
    rc = run_experiment(std::move(c), "baseline", &bl);
  });

  auto* check = app.add_subcommand(
      "check-bounds", "evaluate a metrics CSV against the analytical checks");
  std::string cb_metrics;
  std::string cb_config;
  int cb_p = 0;
  check->add_option("--metrics", cb_metrics, "metrics CSV from a run")
      ->required()
      ->check(CLI::ExistingFile);
  check
      ->add_option("--config", cb_config,
                   "config or manifest describing the run")
      ->required()
      ->check(CLI::ExistingFile);
  check->add_option("--p", cb_p, "feature dimension override");
  check->callback([&] { rc = run_check_bounds(cb_metrics, cb_config, cb_p); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const dokl::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
