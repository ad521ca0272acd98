#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mrim {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

constexpr NodeId kInvalidNode = static_cast<NodeId>(-1);

// Thrown when an exact-enumeration instance exceeds the coin-flip cap.
struct EnumerationCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a configurable memory/size budget would be exceeded.
struct ResourceBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line number when known.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_number(line) {}
  std::size_t line_number;
};

}  // namespace mrim
