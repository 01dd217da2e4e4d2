#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "carbonsched/decision_log.hpp"
#include "carbonsched/feed.hpp"
#include "carbonsched/model_registry.hpp"
#include "carbonsched/selector.hpp"
#include "carbonsched/traces.hpp"

namespace httplib {
class Server;
}

namespace carbonsched {

struct LiveConfig {
  std::string feed_url;
  std::chrono::milliseconds poll_period{std::chrono::minutes(5)};
  std::chrono::milliseconds poll_timeout{std::chrono::seconds(5)};
  BoundsWindow window = BoundsWindow::trailing(std::chrono::hours(24));
  MappingDirection mapping = MappingDirection::prose;
  std::string pool_label = "resnet";
  ModelPool pool = builtin_resnet_only();
  std::filesystem::path log_path = "decisions.jsonl";
  std::string host = "127.0.0.1";
  /// 0 binds an ephemeral port.
  int port = 8080;
};

/// Ingested intensity samples. One writer, many readers: readers take an
/// immutable snapshot, so a reader sees the history either before or after
/// an append, never in between.
class IntensityHistory {
 public:
  enum class AppendResult { appended, duplicate };

  /// Samples are keyed by `from`; a repeated `from` leaves the history as is.
  /// Throws DataError for negative intensity, from >= to, or an overlap with
  /// an existing sample.
  AppendResult append(const IntensityFeedSample& sample);

  /// nullptr until the first sample arrives.
  std::shared_ptr<const CarbonTrace> snapshot() const;

  std::size_t size() const;
  std::optional<Timestamp> last_from() const;

 private:
  mutable std::mutex mu_;
  std::vector<CarbonSample> samples_;
  std::shared_ptr<const CarbonTrace> trace_;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Serves model selections against a live intensity feed.
///
/// GET /v1/select -> {model, e_target_mj, fraction, c_current, c_low, c_high,
///                    mapping, decided_at}; 503 before any sample, 500 when
///                    the decision could not be logged.
/// GET /v1/health -> {status, samples_ingested, last_sample_from}
class LiveService {
 public:
  using Clock = std::function<Timestamp()>;

  static Timestamp system_now();

  explicit LiveService(LiveConfig config, Clock clock = &LiveService::system_now);
  ~LiveService();

  LiveService(const LiveService&) = delete;
  LiveService& operator=(const LiveService&) = delete;

  /// Polls the feed once. Failures are logged and leave the history
  /// untouched. Returns true when a new sample was appended.
  bool poll_once();

  /// Adds a sample as if it came from the feed; same rules as poll_once.
  bool ingest(const IntensityFeedSample& sample);

  /// The selection is logged before a 200 is returned.
  HttpResponse handle_select();
  HttpResponse handle_health() const;

  /// Binds the HTTP API and serves on a background thread; with
  /// `run_poller`, also polls the feed every poll_period. Returns the port.
  int start(bool run_poller = true);
  void stop();

  const IntensityHistory& history() const { return history_; }
  const LiveConfig& config() const { return config_; }

 private:
  void poll_loop(std::stop_token stop);

  LiveConfig config_;
  Clock clock_;
  IntensityHistory history_;
  DecisionLog log_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  std::jthread poller_;
  std::mutex poll_mu_;
  std::condition_variable_any poll_cv_;
};

}  // namespace carbonsched
