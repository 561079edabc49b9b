#pragma once

#include <stdexcept>
#include <string>

namespace ccc {

/// Invalid or inconsistent configuration (missing gains, unknown keys, bad ranges).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form formula was asked to evaluate outside its hypotheses.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A transfer function was evaluated at (or numerically on top of) a pole.
class PoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state produced during time integration.
class IntegrationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `row()` is the 1-based line number, 0 when not row-specific.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace ccc
