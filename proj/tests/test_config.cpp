#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "dokl/config.hpp"
#include "dokl/metrics_io.hpp"

using dokl::ExperimentConfig;

namespace {

ExperimentConfig parsed(const std::string& text, ExperimentConfig base = {}) {
  std::istringstream in(text);
  return dokl::parse_config(in, std::move(base));
}

}  // namespace

TEST_CASE("defaults describe the synthetic field benchmark") {
  const ExperimentConfig c;
  CHECK(c.T == 1500);
  CHECK(c.V == 40);
  CHECK(c.hp.eta == 0.01);
  CHECK(c.hp.lambda == 1e-5);
  CHECK(c.hp.delta == 1e-5);
  CHECK(c.hp.parsimony == 8.0);
  CHECK(c.kernel_sigma == 0.05);
  CHECK(c.source == dokl::SourceKind::Field);
  CHECK(c.field_omega == 2.0);
  CHECK(c.field_process_noise_var == 0.1);
  CHECK(c.field_obs_noise_var == 0.5);
  CHECK_NOTHROW(dokl::validate(c));
}

TEST_CASE("dump and parse round trip exactly") {
  ExperimentConfig c;
  c.T = 777;
  c.seed = 123456789;
  c.out = "runs/exp 1";
  c.parallel = true;
  c.threads = 3;
  c.hp.eta = 0.007071067811865476;
  c.hp.nu = 1.5;
  c.hp.epsilon_override = 2.5e-5;
  c.hp.adapt_bandwidth = true;
  c.kernel_sigma = 50.0;
  c.loss.family = dokl::LossFamily::SquaredError;
  c.loss.lipschitz_C = 2.5;
  c.prox.family = dokl::ProximityFamily::SquaredDifference;
  c.V = 3;
  c.connect_radius = 1000.0;
  c.gamma_rule = dokl::GammaRule::ExpDistance;
  c.gamma_scale = 1000.0;
  c.metric = dokl::DistanceMetric::Haversine;
  c.source = dokl::SourceKind::Csv;
  c.csv_path = "data/nodes.csv";
  c.csv_mode = dokl::CsvMode::Sequential;

  const std::string text = dokl::dump_config(c);
  const ExperimentConfig back = parsed(text);
  CHECK(dokl::dump_config(back) == text);
  CHECK(back.T == c.T);
  CHECK(back.out == c.out);
  CHECK(back.hp.eta == c.hp.eta);
  CHECK(back.hp.epsilon_override == c.hp.epsilon_override);
  CHECK(back.kernel_sigma == c.kernel_sigma);
  CHECK(back.loss.family == c.loss.family);
  CHECK(back.prox.family == c.prox.family);
  CHECK(back.metric == c.metric);
  CHECK(back.csv_path == c.csv_path);
  CHECK(back.csv_mode == c.csv_mode);
}

TEST_CASE("parser mechanics") {
  const ExperimentConfig c = parsed(
      "# leading comment\n"
      "\n"
      "T = 42   # trailing comment\n"
      "  seed=9\n"
      "out = runs/a=b\n");
  CHECK(c.T == 42);
  CHECK(c.seed == 9);
  CHECK(c.out == "runs/a=b");  // '=' in values survives

  CHECK_THROWS_WITH_AS(parsed("bogus_key = 1\n"),
                       doctest::Contains("unknown config key"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parsed("T = 5\nT = 6\n"), doctest::Contains("line 2"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parsed("T five\n"), doctest::Contains("key = value"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parsed("eta = fast\n"), doctest::Contains("eta"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parsed("loss.family = hinge\n"), std::invalid_argument);
  CHECK_THROWS_AS(parsed("csv.mode = shuffle\n"), std::invalid_argument);

  CHECK_THROWS_AS(dokl::load_config("/nonexistent/config"),
                  std::invalid_argument);
}

TEST_CASE("config validation catches bad setups") {
  ExperimentConfig c;
  c.T = 0;
  CHECK_THROWS_AS(dokl::validate(c), std::invalid_argument);
  c = ExperimentConfig{};
  c.V = 0;
  CHECK_THROWS_AS(dokl::validate(c), std::invalid_argument);
  c = ExperimentConfig{};
  c.source = dokl::SourceKind::Csv;  // no path
  CHECK_THROWS_AS(dokl::validate(c), std::invalid_argument);
  c = ExperimentConfig{};
  c.connect_radius = 0.0;
  CHECK_THROWS_AS(dokl::validate(c), std::invalid_argument);
  c = ExperimentConfig{};
  c.kernel_sigma = -1.0;
  CHECK_THROWS_AS(dokl::validate(c), std::invalid_argument);
  c = ExperimentConfig{};
  c.out.clear();
  CHECK_THROWS_AS(dokl::validate(c), std::invalid_argument);
}

TEST_CASE("build_setup wires the field experiment") {
  ExperimentConfig c;
  c.V = 6;
  c.T = 10;
  c.connect_radius = 0.9;
  auto setup = dokl::build_setup(c);
  CHECK(setup.topology.V == 6);
  CHECK(setup.source->agents() == 6);
  CHECK(setup.source->feature_dim() == 1);
  CHECK(setup.kernel.bandwidth == 0.05);
  // Correlation rule on the field: gamma = exp(-normalized distance).
  for (double g : setup.topology.gamma) {
    CHECK(g > 0.0);
    CHECK(g < 1.0);
  }
  std::vector<dokl::Sample> out;
  CHECK(setup.source->round_samples(0, out));
  CHECK(out.size() == 6);
  CHECK(out[0].x[0] == doctest::Approx(0.1).epsilon(1e-15));  // t/T = 1/10
}

TEST_CASE("metrics csv round trip") {
  std::vector<dokl::RoundMetrics> rows(3);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& m = rows[k];
    m.t = k + 1;
    m.global_loss = 0.1 * static_cast<double>(k + 1);
    m.avg_loss = m.global_loss / 2.0;
    m.max_violation = -0.25 + 1e-17;
    m.avg_violation = 1.0 / 3.0;
    m.mean_violation_pos = 0.125;
    m.total_model_order = 40 + static_cast<long long>(k);
    m.max_model_order = 7;
    m.dual_norm = 1e-300;
  }
  const auto path =
      (std::filesystem::temp_directory_path() / "dokl_metrics_rt.csv").string();
  dokl::write_metrics_csv(path, rows);

  // First line is the pinned header.
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == dokl::kMetricsHeader);
  in.close();

  const auto back = dokl::read_metrics_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(back[k].t == rows[k].t);
    CHECK(back[k].global_loss == rows[k].global_loss);
    CHECK(back[k].avg_loss == rows[k].avg_loss);
    CHECK(back[k].max_violation == rows[k].max_violation);
    CHECK(back[k].avg_violation == rows[k].avg_violation);
    CHECK(back[k].mean_violation_pos == rows[k].mean_violation_pos);
    CHECK(back[k].total_model_order == rows[k].total_model_order);
    CHECK(back[k].max_model_order == rows[k].max_model_order);
    CHECK(back[k].dual_norm == rows[k].dual_norm);
    CHECK(back[k].edge_slack.size() == 0);
  }
  // No temp residue next to the output.
  CHECK(!std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove(path);
}

TEST_CASE("metrics csv rejects malformed files") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto bad_header = (dir / "dokl_bad_header.csv").string();
  dokl::write_text_atomic(bad_header, "time,loss\n1,2\n");
  CHECK_THROWS_WITH_AS(dokl::read_metrics_csv(bad_header),
                       doctest::Contains("header"), std::invalid_argument);
  std::filesystem::remove(bad_header);

  const auto short_row = (dir / "dokl_short_row.csv").string();
  dokl::write_text_atomic(short_row,
                          std::string(dokl::kMetricsHeader) + "\n1,2,3\n");
  CHECK_THROWS_WITH_AS(dokl::read_metrics_csv(short_row),
                       doctest::Contains("line 2"), std::invalid_argument);
  std::filesystem::remove(short_row);

  const auto bad_num = (dir / "dokl_bad_num.csv").string();
  dokl::write_text_atomic(
      bad_num, std::string(dokl::kMetricsHeader) + "\n1,x,0,0,0,0,1,1,0\n");
  CHECK_THROWS_AS(dokl::read_metrics_csv(bad_num), std::invalid_argument);
  std::filesystem::remove(bad_num);

  CHECK_THROWS_AS(dokl::read_metrics_csv("/nonexistent/metrics.csv"),
                  std::invalid_argument);
}

TEST_CASE("g17 formatting round trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    CHECK(std::stod(dokl::format_g17(v)) == v);
  }
}
