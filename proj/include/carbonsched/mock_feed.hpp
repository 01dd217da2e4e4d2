#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "carbonsched/feed.hpp"
#include "carbonsched/traces.hpp"

namespace httplib {
class Server;
}

namespace carbonsched {

/// Local stand-in for a regional intensity API. Each GET /intensity returns
/// the next sample of a recorded series; past the end it keeps returning the
/// last one.
class MockFeedServer {
 public:
  explicit MockFeedServer(std::vector<IntensityFeedSample> series);
  explicit MockFeedServer(const CarbonTrace& trace);
  ~MockFeedServer();

  MockFeedServer(const MockFeedServer&) = delete;
  MockFeedServer& operator=(const MockFeedServer&) = delete;

  /// Returns the bound port; 0 picks an ephemeral one.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  /// http://host:port/intensity
  std::string url() const;
  std::size_t served() const { return served_.load(); }

  /// While set, requests fail with HTTP 503 (an outage).
  void set_failing(bool failing) { failing_ = failing; }
  /// Replaces the next responses' body verbatim (malformed-feed testing).
  void set_body_override(std::optional<std::string> body);

 private:
  std::vector<IntensityFeedSample> series_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
  std::atomic<std::size_t> served_{0};
  std::atomic<bool> failing_{false};
  std::mutex mu_;
  std::optional<std::string> body_override_;
};

}  // namespace carbonsched
