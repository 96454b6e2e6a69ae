// Subprocess tests for the dokl binary. The executable path arrives through
// the DOKL_CLI environment variable (set by ctest); each case works in its
// own scratch directory under the system temp root.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dokl/metrics_io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;  // stdout followed by stderr
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* cli_path() {
  const char* p = std::getenv("DOKL_CLI");
  REQUIRE_MESSAGE(p != nullptr, "DOKL_CLI must point at the dokl binary");
  return p;
}

fs::path scratch_dir() {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("dokl_cli_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path dir = fs::temp_directory_path();
  static int n = 0;
  const fs::path out = dir / ("dokl_cli_out_" + std::to_string(::getpid()) +
                              "_" + std::to_string(n++));
  const std::string cmd = std::string("\"") + cli_path() + "\" " + args +
                          " >" + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  fs::remove(out);
  return r;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("bare invocation demands a subcommand") {
  const auto r = run_cli("");
  CHECK(r.code == 1);
}

TEST_CASE("help exits cleanly and lists the subcommands") {
  const auto r = run_cli("--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("simulate-field") != std::string::npos);
  CHECK(r.out.find("run-data") != std::string::npos);
  CHECK(r.out.find("baseline") != std::string::npos);
  CHECK(r.out.find("check-bounds") != std::string::npos);
}

TEST_CASE("simulate-field produces metrics, manifest, and a summary") {
  const fs::path dir = scratch_dir();
  const auto r = run_cli("simulate-field --V 4 --radius 1.5 --T 12 --seed 3 --out " +
                         (dir / "run1").string());
  CAPTURE(r.out);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("rounds completed: 12") != std::string::npos);

  const auto rows = dokl::read_metrics_csv((dir / "run1/metrics.csv").string());
  CHECK(rows.size() == 12);
  CHECK(rows.front().t == 1);
  CHECK(rows.back().t == 12);

  const std::string manifest = read_file(dir / "run1/manifest");
  CHECK(manifest.find("T = 12") != std::string::npos);
  CHECK(manifest.find("topology.V = 4") != std::string::npos);
  CHECK(manifest.find("seed = 3") != std::string::npos);

  // Same seed, fresh process: byte-identical metrics.
  const auto r2 = run_cli("simulate-field --V 4 --radius 1.5 --T 12 --seed 3 --out " +
                          (dir / "run2").string());
  REQUIRE(r2.code == 0);
  CHECK(read_file(dir / "run1/metrics.csv") ==
        read_file(dir / "run2/metrics.csv"));

  // Different seed: different trajectory.
  const auto r3 = run_cli("simulate-field --V 4 --radius 1.5 --T 12 --seed 4 --out " +
                          (dir / "run3").string());
  REQUIRE(r3.code == 0);
  CHECK(read_file(dir / "run1/metrics.csv") !=
        read_file(dir / "run3/metrics.csv"));

  fs::remove_all(dir);
}

TEST_CASE("config files, overrides, and bad keys") {
  const fs::path dir = scratch_dir();
  write_file(dir / "exp.conf",
             "T = 6\ntopology.V = 3\nseed = 5\ntopology.radius = 1.5\n");
  const auto r = run_cli("simulate-field --config " + (dir / "exp.conf").string() +
                         " --out " + (dir / "out").string());
  CAPTURE(r.out);
  REQUIRE(r.code == 0);
  CHECK(dokl::read_metrics_csv((dir / "out/metrics.csv").string()).size() == 6);

  // Typed flags override config values.
  const auto r2 = run_cli("simulate-field --config " + (dir / "exp.conf").string() +
                          " --T 4 --out " + (dir / "out2").string());
  REQUIRE(r2.code == 0);
  CHECK(dokl::read_metrics_csv((dir / "out2/metrics.csv").string()).size() == 4);

  const auto bad = run_cli("simulate-field --set bogus=1 --out " +
                           (dir / "out3").string());
  CHECK(bad.code == 1);
  CHECK(bad.out.find("bogus") != std::string::npos);

  const auto badfile = run_cli("simulate-field --config /nonexistent.conf");
  CHECK(badfile.code == 1);
  fs::remove_all(dir);
}

TEST_CASE("run-data drives csv-backed experiments") {
  const fs::path dir = scratch_dir();
  // Three stations well inside geographic connection range.
  std::ostringstream csv;
  csv << "node_id,pos_x,pos_y,x0,y\n";
  for (int row = 0; row < 4; ++row) {
    csv << "10,0.0,0.0," << 100.0 * row << "," << 20.0 - row << "\n";
    csv << "11,1.0,0.0," << 100.0 * row << "," << 19.0 - row << "\n";
    csv << "12,0.0,1.0," << 100.0 * row << "," << 18.5 - row << "\n";
  }
  write_file(dir / "nodes.csv", csv.str());

  const auto seq = run_cli("run-data --data " + (dir / "nodes.csv").string() +
                           " --mode sequential --T 10 --P 8 --out " +
                           (dir / "seq").string());
  CAPTURE(seq.out);
  REQUIRE(seq.code == 0);
  CHECK(seq.out.find("warning") != std::string::npos);  // exhausted at row 4
  CHECK(dokl::read_metrics_csv((dir / "seq/metrics.csv").string()).size() == 4);

  const auto rs = run_cli("run-data --data " + (dir / "nodes.csv").string() +
                          " --T 9 --seed 2 --out " + (dir / "rs").string());
  CAPTURE(rs.out);
  REQUIRE(rs.code == 0);
  CHECK(dokl::read_metrics_csv((dir / "rs/metrics.csv").string()).size() == 9);

  const auto missing = run_cli("run-data --data /nonexistent.csv --out " +
                               (dir / "x").string());
  CHECK(missing.code == 1);
  fs::remove_all(dir);
}

TEST_CASE("baseline subcommand") {
  const fs::path dir = scratch_dir();
  const std::string common = " --V 3 --radius 1.5 --T 4 --seed 1 --out ";

  const auto pen = run_cli("baseline --method penalty --penalty-c 0.05" +
                           common + (dir / "pen").string());
  CAPTURE(pen.out);
  REQUIRE(pen.code == 0);
  CHECK(dokl::read_metrics_csv((dir / "pen/metrics.csv").string()).size() == 4);
  CHECK(read_file(dir / "pen/manifest").find("penalty") != std::string::npos);

  const auto rbf = run_cli("baseline --method rbf --rbf-atoms 5" + common +
                           (dir / "rbf").string());
  CAPTURE(rbf.out);
  REQUIRE(rbf.code == 0);
  const auto rbf_rows = dokl::read_metrics_csv((dir / "rbf/metrics.csv").string());
  REQUIRE(rbf_rows.size() == 4);
  for (const auto& m : rbf_rows) CHECK(m.max_model_order == 5);

  const auto cen = run_cli("baseline --method centralized" + common +
                           (dir / "cen").string());
  CAPTURE(cen.out);
  REQUIRE(cen.code == 0);
  CHECK(dokl::read_metrics_csv((dir / "cen/metrics.csv").string()).size() ==
        12);  // V * T pooled rounds

  const auto bogus = run_cli("baseline --method sgd" + common +
                             (dir / "b").string());
  CHECK(bogus.code == 1);
  fs::remove_all(dir);
}

TEST_CASE("check-bounds consumes a run and its manifest") {
  const fs::path dir = scratch_dir();
  const auto r = run_cli("simulate-field --V 4 --radius 1.5 --T 40 --seed 7 --out " +
                         (dir / "run").string());
  REQUIRE(r.code == 0);

  const auto chk = run_cli("check-bounds --metrics " +
                           (dir / "run/metrics.csv").string() + " --config " +
                           (dir / "run/manifest").string());
  CAPTURE(chk.out);
  CHECK(chk.code == 0);
  CHECK(chk.out.find("all checks passed") != std::string::npos);
  CHECK(chk.out.find("check model-order-bound: pass") != std::string::npos);

  const auto nometrics = run_cli("check-bounds --metrics /nonexistent.csv "
                                 "--config " +
                                 (dir / "run/manifest").string());
  CHECK(nometrics.code != 0);
  fs::remove_all(dir);
}
