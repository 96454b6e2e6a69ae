#pragma once

#include <stdexcept>
#include <string>

namespace dokl {

// Linear-algebra failure that survived all recovery attempts (e.g. a Gram
// solve that stays singular through the whole jitter escalation ladder).
// Carries a human-readable condition diagnostic in what().
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller broke a cross-component protocol (e.g. an agent step ran without
// the neighbor evaluations the exchange phase should have delivered).
class ProtocolError : public std::logic_error {
 public:
  explicit ProtocolError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace dokl
