#include "carbonsched/feed.hpp"

#include "carbonsched/errors.hpp"
#include "httplib.h"
#include "json.hpp"
#include "json_records.hpp"

namespace carbonsched {

IntensityFeedSample parse_feed_sample(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw DataError("malformed feed body");
  }
  const CarbonSample s = detail::carbon_sample_from_json(doc, 0);
  return {s.interval.start, s.interval.end, s.intensity_g_per_kwh};
}

std::string format_feed_sample(const IntensityFeedSample& sample) {
  nlohmann::ordered_json j;
  j["from"] = format_timestamp(sample.from);
  j["to"] = format_timestamp(sample.to);
  j["intensity_g_per_kwh"] = sample.intensity_g_per_kwh;
  return j.dump();
}

Endpoint split_endpoint(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    throw ConfigError("feed URL must start with http:// ('" + std::string(url) + "')");
  }
  const std::size_t slash = url.find('/', kScheme.size());
  Endpoint e;
  e.base = std::string(url.substr(0, slash));
  e.path = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
  if (e.base.size() == kScheme.size()) throw ConfigError("feed URL has no host");
  return e;
}

IntensityFeedSample poll_intensity(const std::string& endpoint, std::chrono::milliseconds timeout) {
  const Endpoint e = split_endpoint(endpoint);
  httplib::Client client(e.base);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const auto res = client.Get(e.path);
  if (!res) {
    throw FeedError("feed request to " + endpoint + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw FeedError("feed " + endpoint + " returned HTTP " + std::to_string(res->status));
  }
  return parse_feed_sample(res->body);
}

}  // namespace carbonsched
