#pragma once

#include <stdexcept>

namespace sensbound {

/// Filesystem failure (missing or unreadable file).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed network document (syntax, wrong value types).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well-formed document that violates a network invariant (cycle, bad row
/// sum, shape mismatch). The message lists every finding, one per line.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sensbound
