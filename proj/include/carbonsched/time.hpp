#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace carbonsched {

using Timestamp = std::chrono::sys_seconds;

/// Parses an ISO-8601 date-time: `YYYY-MM-DDTHH:MM[:SS[.fff]]` followed by
/// `Z` or a `+HH:MM` / `+HHMM` / `+HH` offset. The result is normalized to
/// UTC; fractional seconds are truncated. Throws std::invalid_argument.
Timestamp parse_timestamp(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(Timestamp t);

/// Half-open [start, end).
struct Interval {
  Timestamp start;
  Timestamp end;

  std::chrono::seconds length() const { return end - start; }
  bool contains(Timestamp t) const { return start <= t && t < end; }
  bool overlaps(const Interval& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace carbonsched
