#include "dokl/metrics_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dokl {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* const kMetricsHeader =
    "t,global_loss,avg_loss,max_violation,avg_violation,mean_violation_pos,"
    "total_model_order,max_model_order,dual_norm";

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw std::runtime_error("write to " + tmp + " failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_metrics_csv(const std::string& path,
                       const std::vector<RoundMetrics>& rows) {
  std::string body;
  body.reserve(rows.size() * 160 + 128);
  body += kMetricsHeader;
  body += '\n';
  for (const auto& m : rows) {
    body += std::to_string(m.t);
    body += ',';
    body += format_g17(m.global_loss);
    body += ',';
    body += format_g17(m.avg_loss);
    body += ',';
    body += format_g17(m.max_violation);
    body += ',';
    body += format_g17(m.avg_violation);
    body += ',';
    body += format_g17(m.mean_violation_pos);
    body += ',';
    body += std::to_string(m.total_model_order);
    body += ',';
    body += std::to_string(m.max_model_order);
    body += ',';
    body += format_g17(m.dual_norm);
    body += '\n';
  }
  write_text_atomic(path, body);
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double_field(const std::string& tok, std::size_t lineno) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("metrics line " + std::to_string(lineno) +
                                ": bad number '" + tok + "'");
  }
  if (used != tok.size()) {
    throw std::invalid_argument("metrics line " + std::to_string(lineno) +
                                ": bad number '" + tok + "'");
  }
  return v;
}

long long parse_int_field(const std::string& tok, std::size_t lineno) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("metrics line " + std::to_string(lineno) +
                                ": bad integer '" + tok + "'");
  }
  if (used != tok.size()) {
    throw std::invalid_argument("metrics line " + std::to_string(lineno) +
                                ": bad integer '" + tok + "'");
  }
  return v;
}

}  // namespace

std::vector<RoundMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open metrics file " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) {
    throw std::invalid_argument(path + ": header mismatch, expected '" +
                                std::string(kMetricsHeader) + "'");
  }
  std::vector<RoundMetrics> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto f = split_row(line);
    if (f.size() != 9) {
      throw std::invalid_argument("metrics line " + std::to_string(lineno) +
                                  ": expected 9 fields, got " +
                                  std::to_string(f.size()));
    }
    RoundMetrics m;
    m.t = static_cast<std::uint64_t>(parse_int_field(f[0], lineno));
    m.global_loss = parse_double_field(f[1], lineno);
    m.avg_loss = parse_double_field(f[2], lineno);
    m.max_violation = parse_double_field(f[3], lineno);
    m.avg_violation = parse_double_field(f[4], lineno);
    m.mean_violation_pos = parse_double_field(f[5], lineno);
    m.total_model_order = parse_int_field(f[6], lineno);
    m.max_model_order = parse_int_field(f[7], lineno);
    m.dual_norm = parse_double_field(f[8], lineno);
    rows.push_back(std::move(m));
  }
  return rows;
}

}  // namespace dokl
