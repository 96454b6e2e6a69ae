#pragma once

#include <string>
#include <vector>

#include "dokl/simulator.hpp"

namespace dokl {

// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_g17(double v);

extern const char* const kMetricsHeader;

// Writes tmp-then-rename so readers never observe a partial file. The nine
// columns follow kMetricsHeader exactly; floats use format_g17, counters are
// plain integers.
void write_metrics_csv(const std::string& path,
                       const std::vector<RoundMetrics>& rows);

// Inverse of write_metrics_csv for the scalar columns. Per-edge vectors are
// not stored in the CSV and come back empty. Rejects a mismatched header and
// reports parse failures with line numbers.
std::vector<RoundMetrics> read_metrics_csv(const std::string& path);

void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace dokl
