#include "dokl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dokl/errors.hpp"
#include "dokl/rng.hpp"

namespace dokl {

FieldRound sample_round(const FieldModel& model, std::uint64_t t) {
  const Eigen::Index V = model.mean.size();
  const double sp = std::sqrt(model.process_noise_var);
  const double so = std::sqrt(model.obs_noise_var);
  Eigen::VectorXd z(V);
  const double phase = std::sin(model.omega * static_cast<double>(t));
  for (Eigen::Index i = 0; i < V; ++i) {
    const CounterRng rng(model.seed, StreamKind::ProcessNoise,
                         static_cast<std::uint64_t>(i), t);
    z[i] = phase + sp * rng.normal(0);
  }
  FieldRound out;
  out.s = model.mean + model.chol.transpose() * z;
  out.y = out.s;
  for (Eigen::Index i = 0; i < V; ++i) {
    const CounterRng rng(model.seed, StreamKind::ObsNoise,
                         static_cast<std::uint64_t>(i), t);
    out.y[i] += so * rng.normal(0);
  }
  return out;
}

FieldModel build_field_from_positions(const Eigen::MatrixXd& positions,
                                      double area_side, double omega,
                                      std::uint64_t seed) {
  const Eigen::Index V = positions.cols();
  if (positions.rows() != 2 || V < 2) {
    throw std::invalid_argument("build_field: positions must be 2 x V, V >= 2");
  }
  if (!(area_side > 0.0)) {
    throw std::invalid_argument("build_field: area side must be positive");
  }
  FieldModel m;
  m.omega = omega;
  m.seed = seed;
  m.positions = positions;
  m.correlation.resize(V, V);
  for (Eigen::Index i = 0; i < V; ++i) {
    for (Eigen::Index j = 0; j < V; ++j) {
      m.correlation(i, j) = std::exp(
          -(m.positions.col(i) - m.positions.col(j)).norm() / area_side);
    }
  }
  m.mean.resize(V);
  for (Eigen::Index i = 0; i < V; ++i) {
    m.mean[i] = static_cast<double>(i + 1) / static_cast<double>(V);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m.correlation);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd jittered = m.correlation;
    jittered.diagonal().array() += 1e-10;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) {
      throw NumericError(
          "build_field: correlation Cholesky failed even with 1e-10 jitter "
          "(V = " + std::to_string(V) + ")");
    }
  }
  m.chol = llt.matrixU();
  return m;
}

FieldModel build_field(int V, double area_side, double omega,
                       std::uint64_t seed) {
  if (V < 2) throw std::invalid_argument("build_field: need V >= 2");
  if (!(area_side > 0.0)) {
    throw std::invalid_argument("build_field: area side must be positive");
  }
  Eigen::MatrixXd positions(2, V);
  for (int i = 0; i < V; ++i) {
    const CounterRng rng(seed, StreamKind::Position,
                         static_cast<std::uint64_t>(i), 0);
    positions(0, i) = rng.uniform(0) * area_side;
    positions(1, i) = rng.uniform(1) * area_side;
  }
  return build_field_from_positions(positions, area_side, omega, seed);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& tok, std::size_t line_no,
                 const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": cannot parse " + what + " from '" + tok +
                                "'");
  }
}

}  // namespace

NodeTable load_node_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty file");
  }
  const auto header = split_csv_line(line);
  if (header.size() < 5 || header[0] != "node_id" || header[1] != "pos_x" ||
      header[2] != "pos_y" || header.back() != "y") {
    throw std::invalid_argument(
        path + ": line 1: header must be node_id,pos_x,pos_y,x0..x{p-1},y");
  }
  const Eigen::Index p = static_cast<Eigen::Index>(header.size()) - 4;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (header[static_cast<std::size_t>(3 + k)] != "x" + std::to_string(k)) {
      throw std::invalid_argument(path +
                                  ": line 1: expected feature column x" +
                                  std::to_string(k) + ", got '" +
                                  header[static_cast<std::size_t>(3 + k)] +
                                  "'");
    }
  }

  struct Node {
    Eigen::Vector2d pos;
    std::vector<Sample> samples;
  };
  std::map<long long, Node> nodes;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tok = split_csv_line(line);
    if (tok.size() != header.size()) {
      throw std::invalid_argument(
          path + ": line " + std::to_string(line_no) + ": expected " +
          std::to_string(header.size()) + " columns, got " +
          std::to_string(tok.size()));
    }
    long long id = 0;
    try {
      std::size_t pos = 0;
      id = std::stoll(tok[0], &pos);
      if (pos != tok[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": cannot parse node_id from '" + tok[0] +
                                  "'");
    }
    Eigen::Vector2d pos(parse_num(tok[1], line_no, "pos_x"),
                        parse_num(tok[2], line_no, "pos_y"));
    Sample s;
    s.x.resize(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      s.x[k] = parse_num(tok[static_cast<std::size_t>(3 + k)], line_no,
                         "feature");
    }
    s.y = parse_num(tok.back(), line_no, "target");

    auto [it, inserted] = nodes.try_emplace(id, Node{pos, {}});
    if (!inserted && (it->second.pos - pos).norm() > 1e-12) {
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": node " + std::to_string(id) +
                                  " changed position mid-file");
    }
    it->second.samples.push_back(std::move(s));
  }
  if (nodes.empty()) {
    throw std::invalid_argument(path + ": no data rows");
  }

  NodeTable table;
  table.feature_dim = p;
  table.positions.resize(2, static_cast<Eigen::Index>(nodes.size()));
  Eigen::Index col = 0;
  for (auto& [id, node] : nodes) {
    table.ids.push_back(id);
    table.positions.col(col++) = node.pos;
    table.samples.push_back(std::move(node.samples));
  }
  return table;
}

}  // namespace dokl
