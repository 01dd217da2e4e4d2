#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "carbonsched/errors.hpp"
#include "carbonsched/time.hpp"

namespace carbonsched {

struct CarbonSample {
  Interval interval;
  double intensity_g_per_kwh = 0.0;
};

struct RequestSample {
  Interval interval;
  std::uint64_t count = 0;
};

/// Non-empty series of samples over sorted, non-overlapping half-open
/// intervals. Construction sorts by start and validates; throws DataError.
template <typename Sample>
class Trace {
 public:
  explicit Trace(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw DataError("empty trace");
    std::stable_sort(samples_.begin(), samples_.end(), [](const Sample& a, const Sample& b) {
      return a.interval.start < b.interval.start;
    });
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!(samples_[i].interval.start < samples_[i].interval.end)) {
        throw DataError("interval start must precede end");
      }
      if (i > 0 && samples_[i - 1].interval.end > samples_[i].interval.start) {
        throw DataError("overlapping intervals");
      }
    }
  }

  std::span<const Sample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const Sample& front() const { return samples_.front(); }
  const Sample& back() const { return samples_.back(); }
  Interval span() const { return {samples_.front().interval.start, samples_.back().interval.end}; }

 private:
  std::vector<Sample> samples_;
};

using CarbonTrace = Trace<CarbonSample>;
using RequestTrace = Trace<RequestSample>;

/// CSV `start_utc,end_utc,intensity_g_per_kwh`. Rows may arrive out of order;
/// they are sorted before the overlap check, and an overlap names both rows.
CarbonTrace load_carbon_trace(std::string_view csv);

/// JSON array (or JSON lines) of `{"from", "to", "intensity_g_per_kwh"}`
/// records, the live feed shape. Errors carry the 1-based record number.
CarbonTrace load_carbon_trace_json(std::string_view json);

/// Dispatches on content: JSON when the first non-blank byte is `[` or `{`.
CarbonTrace load_carbon_trace_file(const std::filesystem::path& path);

/// CSV `start_utc,end_utc,count` with non-negative integral counts.
RequestTrace load_request_trace(std::string_view csv);
RequestTrace load_request_trace_file(const std::filesystem::path& path);

enum class GapPolicy { strict, carry_forward };

GapPolicy parse_gap_policy(std::string_view text);
std::string_view to_string(GapPolicy policy);

struct AlignedStep {
  Interval interval;
  double intensity_g_per_kwh = 0.0;
  std::uint64_t count = 0;
};

struct AlignedTimeline {
  std::vector<AlignedStep> steps;
  std::uint64_t ingested_requests = 0;
  /// Requests in time before the first carbon sample (carry_forward only).
  std::uint64_t dropped_requests = 0;
};

/// Joins request counts onto the carbon grid. Intensity is piecewise constant
/// per carbon interval. Each request sample's count is split across the time
/// it overlaps, proportionally to overlap duration; split counts are rounded
/// on the running cumulative share, so every request sample is conserved
/// exactly and each step is within one request of its exact share.
///
/// Uncovered request time is an error under `strict`. Under `carry_forward`
/// it is charged to the step of the latest earlier carbon sample, or dropped
/// when no earlier sample exists. Steps are emitted for every carbon interval
/// that overlaps the request trace or receives carried time.
AlignedTimeline align(const CarbonTrace& carbon, const RequestTrace& requests,
                      GapPolicy gap_policy);

}  // namespace carbonsched
