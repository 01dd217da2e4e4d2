#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace carbonsched {

/// Invalid input data: a malformed row, an invariant violation in a trace or
/// pool, or a simulation that cannot proceed on the data given. `line()` is
/// 1-based and 0 when the error is not tied to a single line.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line == 0 ? message
                                     : message + " at line " + std::to_string(line)),
        line_(line) {}

  /// A violation involving two rows, e.g. overlapping intervals. `line()`
  /// reports the later of the two.
  static DataError between_lines(const std::string& message, std::size_t first,
                                 std::size_t second) {
    DataError e(message + " at lines " + std::to_string(first) + " and " +
                std::to_string(second));
    e.line_ = second;
    return e;
  }

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid configuration (unknown policy, bad flag value, missing baseline).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace carbonsched
