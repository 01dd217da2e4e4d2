#include "carbonsched/traces.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "carbonsched/digest.hpp"
#include "csv.hpp"
#include "json_records.hpp"

namespace carbonsched {

namespace {

__extension__ using u128 = unsigned __int128;


constexpr std::string_view kCarbonHeader = "start_utc,end_utc,intensity_g_per_kwh";
constexpr std::string_view kRequestHeader = "start_utc,end_utc,count";

template <typename Sample>
struct Numbered {
  std::size_t line;
  Sample sample;
};

Interval parse_interval(const std::string& start, const std::string& end, std::size_t line) {
  Interval iv;
  try {
    iv.start = parse_timestamp(start);
    iv.end = parse_timestamp(end);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what(), line);
  }
  if (!(iv.start < iv.end)) throw DataError("interval start must precede end", line);
  return iv;
}

// Sorts rows by start and rejects overlaps naming both source lines.
template <typename Sample>
Trace<Sample> build_trace(std::vector<Numbered<Sample>> rows) {
  if (rows.empty()) throw DataError("empty trace");
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.sample.interval.start < b.sample.interval.start;
  });
  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i - 1].sample.interval.overlaps(rows[i].sample.interval)) {
      const auto [a, b] = std::minmax(rows[i - 1].line, rows[i].line);
      throw DataError::between_lines("overlapping intervals", a, b);
    }
    samples.push_back(rows[i].sample);
  }
  return Trace<Sample>(std::move(samples));
}

std::uint64_t parse_count(std::string_view field, std::size_t line) {
  const double value = csv::parse_real(field, line, "count");
  if (value < 0.0) throw DataError("negative count", line);
  if (value != std::floor(value)) throw DataError("non-integer count", line);
  if (value > 9007199254740992.0) throw DataError("count out of range", line);
  return static_cast<std::uint64_t>(value);
}

bool looks_like_json(std::string_view doc) {
  for (char c : doc) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    return c == '[' || c == '{';
  }
  return false;
}

}  // namespace

namespace detail {

CarbonSample carbon_sample_from_json(const nlohmann::json& record, std::size_t record_no) {
  if (!record.is_object()) throw DataError("record is not a JSON object", record_no);
  for (const char* key : {"from", "to", "intensity_g_per_kwh"}) {
    if (!record.contains(key)) throw DataError(std::string("missing field '") + key + "'", record_no);
  }
  if (!record["from"].is_string() || !record["to"].is_string()) {
    throw DataError("timestamps must be strings", record_no);
  }
  const auto& value = record["intensity_g_per_kwh"];
  if (!value.is_number()) throw DataError("intensity must be a number", record_no);

  CarbonSample s;
  s.interval = parse_interval(record["from"].get<std::string>(), record["to"].get<std::string>(),
                              record_no);
  s.intensity_g_per_kwh = value.get<double>();
  if (!std::isfinite(s.intensity_g_per_kwh)) throw DataError("malformed intensity", record_no);
  if (s.intensity_g_per_kwh < 0.0) throw DataError("negative intensity", record_no);
  return s;
}

}  // namespace detail

CarbonTrace load_carbon_trace(std::string_view document) {
  std::vector<Numbered<CarbonSample>> rows;
  for (const auto& row : csv::read(document, kCarbonHeader)) {
    CarbonSample s;
    s.interval = parse_interval(row.fields[0], row.fields[1], row.line);
    s.intensity_g_per_kwh = csv::parse_real(row.fields[2], row.line, "intensity_g_per_kwh");
    if (s.intensity_g_per_kwh < 0.0) throw DataError("negative intensity", row.line);
    rows.push_back({row.line, s});
  }
  return build_trace(std::move(rows));
}

CarbonTrace load_carbon_trace_json(std::string_view document) {
  std::vector<Numbered<CarbonSample>> rows;
  const auto trimmed_start = document.find_first_not_of(" \t\r\n");
  if (trimmed_start != std::string_view::npos && document[trimmed_start] == '[') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(std::string("malformed JSON: ") + e.what());
    }
    std::size_t n = 0;
    for (const auto& record : doc) {
      ++n;
      rows.push_back({n, detail::carbon_sample_from_json(record, n)});
    }
  } else {
    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin < document.size()) {
      const std::size_t nl = document.find('\n', begin);
      const std::string_view line = document.substr(begin, nl - begin);
      begin = nl == std::string_view::npos ? document.size() : nl + 1;
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      nlohmann::json record;
      try {
        record = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error&) {
        throw DataError("malformed JSON record", line_no);
      }
      rows.push_back({line_no, detail::carbon_sample_from_json(record, line_no)});
    }
  }
  return build_trace(std::move(rows));
}

CarbonTrace load_carbon_trace_file(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return looks_like_json(bytes) ? load_carbon_trace_json(bytes) : load_carbon_trace(bytes);
}

RequestTrace load_request_trace(std::string_view document) {
  std::vector<Numbered<RequestSample>> rows;
  for (const auto& row : csv::read(document, kRequestHeader)) {
    RequestSample s;
    s.interval = parse_interval(row.fields[0], row.fields[1], row.line);
    s.count = parse_count(row.fields[2], row.line);
    rows.push_back({row.line, s});
  }
  return build_trace(std::move(rows));
}

RequestTrace load_request_trace_file(const std::filesystem::path& path) {
  return load_request_trace(read_file(path));
}

GapPolicy parse_gap_policy(std::string_view text) {
  if (text == "strict") return GapPolicy::strict;
  if (text == "carry_forward") return GapPolicy::carry_forward;
  throw ConfigError("unknown gap policy '" + std::string(text) + "'");
}

std::string_view to_string(GapPolicy policy) {
  return policy == GapPolicy::strict ? "strict" : "carry_forward";
}

AlignedTimeline align(const CarbonTrace& carbon, const RequestTrace& requests,
                      GapPolicy gap_policy) {
  using std::chrono::seconds;
  const auto cs = carbon.samples();
  constexpr std::size_t kDropped = static_cast<std::size_t>(-1);

  std::vector<std::uint64_t> counts(cs.size(), 0);
  std::vector<bool> touched(cs.size(), false);
  bool any_overlap = false;
  AlignedTimeline out;

  for (const auto& r : requests.samples()) {
    out.ingested_requests += r.count;
    const auto total = static_cast<u128>(r.interval.length().count());
    const auto n = static_cast<u128>(r.count);
    // Half-up rounding of the exact share count*elapsed/total. It is exact at
    // both ends of the request interval, so pieces telescope to `count`.
    const auto cumulative = [&](Timestamp t) {
      const auto elapsed = static_cast<u128>((t - r.interval.start).count());
      return static_cast<std::uint64_t>((2 * n * elapsed + total) / (2 * total));
    };

    Timestamp cursor = r.interval.start;
    while (cursor < r.interval.end) {
      // Last carbon sample starting at or before the cursor.
      const auto next = std::upper_bound(
          cs.begin(), cs.end(), cursor,
          [](Timestamp t, const CarbonSample& s) { return t < s.interval.start; });
      const bool has_prev = next != cs.begin();
      const std::size_t prev = has_prev ? static_cast<std::size_t>(next - cs.begin()) - 1 : 0;

      Timestamp piece_end;
      std::size_t target;
      if (has_prev && cs[prev].interval.end > cursor) {
        piece_end = std::min(r.interval.end, cs[prev].interval.end);
        target = prev;
        any_overlap = true;
      } else {
        piece_end = next == cs.end() ? r.interval.end
                                     : std::min(r.interval.end, next->interval.start);
        if (gap_policy == GapPolicy::strict) {
          throw DataError("request time " + format_timestamp(cursor) +
                          " is not covered by the carbon trace");
        }
        target = has_prev ? prev : kDropped;
      }

      const std::uint64_t piece = cumulative(piece_end) - cumulative(cursor);
      if (target == kDropped) {
        out.dropped_requests += piece;
      } else {
        counts[target] += piece;
        touched[target] = true;
      }
      cursor = piece_end;
    }
  }

  if (!any_overlap) throw DataError("carbon and request traces do not overlap");

  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (touched[i]) out.steps.push_back({cs[i].interval, cs[i].intensity_g_per_kwh, counts[i]});
  }
  return out;
}

}  // namespace carbonsched
