#include "dokl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "dokl/datagen.hpp"
#include "dokl/metrics_io.hpp"

namespace dokl {

ExperimentConfig::ExperimentConfig() {
  hp.eta = 0.01;
  hp.lambda = 1e-5;
  hp.delta = 1e-5;
  hp.parsimony = 8.0;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v +
                                "'");
  }
  if (used != v.size()) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v +
                                "'");
  }
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad count '" + v +
                                "'");
  }
  if (used != v.size() || (!v.empty() && v[0] == '-')) {
    throw std::invalid_argument("config key '" + key + "': bad count '" + v +
                                "'");
  }
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v +
                                "'");
  }
  if (used != v.size()) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v +
                                "'");
  }
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw std::invalid_argument("config key '" + key +
                              "': expected true or false, got '" + v + "'");
}

}  // namespace

void set_key(ExperimentConfig& c, const std::string& key,
             const std::string& value) {
  if (key == "T") {
    c.T = to_u64(key, value);
  } else if (key == "seed") {
    c.seed = to_u64(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "parallel") {
    c.parallel = to_bool(key, value);
  } else if (key == "threads") {
    c.threads = to_int(key, value);
  } else if (key == "eta") {
    c.hp.eta = to_double(key, value);
  } else if (key == "lambda") {
    c.hp.lambda = to_double(key, value);
  } else if (key == "delta") {
    c.hp.delta = to_double(key, value);
  } else if (key == "nu") {
    c.hp.nu = to_double(key, value);
  } else if (key == "parsimony") {
    c.hp.parsimony = to_double(key, value);
  } else if (key == "epsilon") {
    c.hp.epsilon_override = to_double(key, value);
  } else if (key == "radius_RB") {
    c.hp.radius_RB = to_double(key, value);
  } else if (key == "komp_jitter") {
    c.hp.komp_jitter = to_double(key, value);
  } else if (key == "kernel.sigma") {
    c.kernel_sigma = to_double(key, value);
  } else if (key == "kernel.adapt") {
    c.hp.adapt_bandwidth = to_bool(key, value);
  } else if (key == "loss.family") {
    if (value == "squared") {
      c.loss.family = LossFamily::SquaredError;
    } else if (value == "huber") {
      c.loss.family = LossFamily::Huber;
    } else {
      throw std::invalid_argument(
          "config key 'loss.family': expected squared or huber, got '" +
          value + "'");
    }
  } else if (key == "loss.huber_phi") {
    c.loss.huber_phi = to_double(key, value);
  } else if (key == "loss.lipschitz_C") {
    c.loss.lipschitz_C = to_double(key, value);
  } else if (key == "prox.family") {
    if (value == "absolute") {
      c.prox.family = ProximityFamily::AbsoluteDifference;
    } else if (value == "squared") {
      c.prox.family = ProximityFamily::SquaredDifference;
    } else {
      throw std::invalid_argument(
          "config key 'prox.family': expected absolute or squared, got '" +
          value + "'");
    }
  } else if (key == "prox.lipschitz_Lh") {
    c.prox.lipschitz_Lh = to_double(key, value);
  } else if (key == "topology.V") {
    c.V = to_int(key, value);
  } else if (key == "topology.radius") {
    c.connect_radius = to_double(key, value);
  } else if (key == "topology.gamma_rule") {
    if (value == "correlation") {
      c.gamma_rule = GammaRule::Correlation;
    } else if (value == "exp_distance") {
      c.gamma_rule = GammaRule::ExpDistance;
    } else {
      throw std::invalid_argument(
          "config key 'topology.gamma_rule': expected correlation or "
          "exp_distance, got '" +
          value + "'");
    }
  } else if (key == "topology.gamma_scale") {
    c.gamma_scale = to_double(key, value);
  } else if (key == "topology.metric") {
    if (value == "euclidean") {
      c.metric = DistanceMetric::Euclidean;
    } else if (value == "haversine") {
      c.metric = DistanceMetric::Haversine;
    } else {
      throw std::invalid_argument(
          "config key 'topology.metric': expected euclidean or haversine, "
          "got '" +
          value + "'");
    }
  } else if (key == "source") {
    if (value == "field") {
      c.source = SourceKind::Field;
    } else if (value == "csv") {
      c.source = SourceKind::Csv;
    } else {
      throw std::invalid_argument(
          "config key 'source': expected field or csv, got '" + value + "'");
    }
  } else if (key == "csv.path") {
    c.csv_path = value;
  } else if (key == "csv.mode") {
    if (value == "sequential") {
      c.csv_mode = CsvMode::Sequential;
    } else if (value == "resample") {
      c.csv_mode = CsvMode::Resample;
    } else {
      throw std::invalid_argument(
          "config key 'csv.mode': expected sequential or resample, got '" +
          value + "'");
    }
  } else if (key == "field.area_side") {
    c.field_area_side = to_double(key, value);
  } else if (key == "field.omega") {
    c.field_omega = to_double(key, value);
  } else if (key == "field.process_noise_var") {
    c.field_process_noise_var = to_double(key, value);
  } else if (key == "field.obs_noise_var") {
    c.field_obs_noise_var = to_double(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    }
    if (!seen.insert(key).second) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
    }
    try {
      set_key(base, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file " + path);
  }
  return parse_config(in, std::move(base));
}

std::string dump_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "T = " << c.T << "\n";
  out << "seed = " << c.seed << "\n";
  out << "out = " << c.out << "\n";
  out << "parallel = " << (c.parallel ? "true" : "false") << "\n";
  out << "threads = " << c.threads << "\n";
  out << "eta = " << format_g17(c.hp.eta) << "\n";
  out << "lambda = " << format_g17(c.hp.lambda) << "\n";
  out << "delta = " << format_g17(c.hp.delta) << "\n";
  out << "nu = " << format_g17(c.hp.nu) << "\n";
  out << "parsimony = " << format_g17(c.hp.parsimony) << "\n";
  out << "epsilon = " << format_g17(c.hp.epsilon_override) << "\n";
  out << "radius_RB = " << format_g17(c.hp.radius_RB) << "\n";
  out << "komp_jitter = " << format_g17(c.hp.komp_jitter) << "\n";
  out << "kernel.sigma = " << format_g17(c.kernel_sigma) << "\n";
  out << "kernel.adapt = " << (c.hp.adapt_bandwidth ? "true" : "false")
      << "\n";
  out << "loss.family = "
      << (c.loss.family == LossFamily::SquaredError ? "squared" : "huber")
      << "\n";
  out << "loss.huber_phi = " << format_g17(c.loss.huber_phi) << "\n";
  out << "loss.lipschitz_C = " << format_g17(c.loss.lipschitz_C) << "\n";
  out << "prox.family = "
      << (c.prox.family == ProximityFamily::AbsoluteDifference ? "absolute"
                                                               : "squared")
      << "\n";
  out << "prox.lipschitz_Lh = " << format_g17(c.prox.lipschitz_Lh) << "\n";
  out << "topology.V = " << c.V << "\n";
  out << "topology.radius = " << format_g17(c.connect_radius) << "\n";
  out << "topology.gamma_rule = "
      << (c.gamma_rule == GammaRule::Correlation ? "correlation"
                                                 : "exp_distance")
      << "\n";
  out << "topology.gamma_scale = " << format_g17(c.gamma_scale) << "\n";
  out << "topology.metric = "
      << (c.metric == DistanceMetric::Euclidean ? "euclidean" : "haversine")
      << "\n";
  out << "source = " << (c.source == SourceKind::Field ? "field" : "csv")
      << "\n";
  out << "csv.path = " << c.csv_path << "\n";
  out << "csv.mode = "
      << (c.csv_mode == CsvMode::Sequential ? "sequential" : "resample")
      << "\n";
  out << "field.area_side = " << format_g17(c.field_area_side) << "\n";
  out << "field.omega = " << format_g17(c.field_omega) << "\n";
  out << "field.process_noise_var = " << format_g17(c.field_process_noise_var)
      << "\n";
  out << "field.obs_noise_var = " << format_g17(c.field_obs_noise_var)
      << "\n";
  return out.str();
}

void validate(const ExperimentConfig& c) {
  if (c.T == 0) throw std::invalid_argument("config: T must be >= 1");
  if (c.V < 1) throw std::invalid_argument("config: topology.V must be >= 1");
  if (c.threads < 0) {
    throw std::invalid_argument("config: threads must be >= 0");
  }
  if (c.out.empty()) throw std::invalid_argument("config: out must be set");
  validate(c.hp);
  validate(KernelSpec{KernelFamily::Gaussian, c.kernel_sigma});
  validate(c.loss);
  validate(c.prox);
  if (!(c.connect_radius > 0.0)) {
    throw std::invalid_argument("config: topology.radius must be > 0");
  }
  if (!(c.gamma_scale > 0.0)) {
    throw std::invalid_argument("config: topology.gamma_scale must be > 0");
  }
  if (c.source == SourceKind::Csv && c.csv_path.empty()) {
    throw std::invalid_argument("config: csv.path required when source = csv");
  }
  if (c.source == SourceKind::Field) {
    if (!(c.field_area_side > 0.0)) {
      throw std::invalid_argument("config: field.area_side must be > 0");
    }
    if (c.field_process_noise_var < 0.0 || c.field_obs_noise_var < 0.0) {
      throw std::invalid_argument("config: field noise variances must be >= 0");
    }
  }
}

ExperimentSetup build_setup(ExperimentConfig& c) {
  validate(c);
  ExperimentSetup s;
  s.kernel = KernelSpec{KernelFamily::Gaussian, c.kernel_sigma};
  Eigen::MatrixXd positions;
  double gamma_scale = c.gamma_scale;
  if (c.source == SourceKind::Field) {
    FieldModel model =
        build_field(c.V, c.field_area_side, c.field_omega, c.seed);
    model.process_noise_var = c.field_process_noise_var;
    model.obs_noise_var = c.field_obs_noise_var;
    positions = model.positions;
    if (c.gamma_rule == GammaRule::Correlation) {
      gamma_scale = c.field_area_side;
    }
    s.source = std::make_unique<FieldSource>(std::move(model), c.T);
  } else {
    NodeTable table = load_node_csv(c.csv_path);
    c.V = static_cast<int>(table.ids.size());
    positions = table.positions;
    s.source = std::make_unique<CsvSource>(std::move(table), c.csv_mode,
                                           c.seed);
  }
  s.topology = c.V >= 2 ? build_geometric(positions, c.connect_radius,
                                          c.gamma_rule, gamma_scale, c.metric)
                        : single_agent_topology();
  return s;
}

}  // namespace dokl
