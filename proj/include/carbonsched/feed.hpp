#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>

#include "carbonsched/time.hpp"

namespace carbonsched {

/// One reading from a live intensity feed. Wire shape:
/// `{"from": "<ISO-8601>", "to": "<ISO-8601>", "intensity_g_per_kwh": <number>}`
struct IntensityFeedSample {
  Timestamp from;
  Timestamp to;
  double intensity_g_per_kwh = 0.0;
};

/// Network failure, timeout or non-200 status while polling.
class FeedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws DataError for a malformed body, from >= to, or negative intensity.
IntensityFeedSample parse_feed_sample(std::string_view body);

std::string format_feed_sample(const IntensityFeedSample& sample);

/// GET `endpoint` (http://host[:port]/path) and parse the body. Throws
/// FeedError or DataError.
IntensityFeedSample poll_intensity(const std::string& endpoint, std::chrono::milliseconds timeout);

struct Endpoint {
  std::string base;  // scheme://host:port
  std::string path;
};

/// Splits an http URL. Throws ConfigError for anything but plain http.
Endpoint split_endpoint(std::string_view url);

}  // namespace carbonsched
