#include "carbonsched/live_service.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "carbonsched/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace carbonsched {

namespace {

std::string error_body(std::string_view reason, std::string_view message) {
  nlohmann::ordered_json j;
  j["reason"] = reason;
  j["error"] = message;
  return j.dump();
}

// Latest sample starting at or before `now`; the earliest one if the clock
// is behind the feed.
const CarbonSample& current_sample(const CarbonTrace& trace, Timestamp now) {
  const auto samples = trace.samples();
  const auto it = std::upper_bound(
      samples.begin(), samples.end(), now,
      [](Timestamp t, const CarbonSample& s) { return t < s.interval.start; });
  return it == samples.begin() ? samples.front() : *(it - 1);
}

}  // namespace

IntensityHistory::AppendResult IntensityHistory::append(const IntensityFeedSample& sample) {
  if (!(sample.from < sample.to)) throw DataError("feed sample 'from' must precede 'to'");
  if (!(sample.intensity_g_per_kwh >= 0.0)) throw DataError("negative intensity");

  std::lock_guard lock(mu_);
  const auto pos = std::lower_bound(
      samples_.begin(), samples_.end(), sample.from,
      [](const CarbonSample& s, Timestamp t) { return s.interval.start < t; });
  if (pos != samples_.end() && pos->interval.start == sample.from) return AppendResult::duplicate;

  const CarbonSample added{{sample.from, sample.to}, sample.intensity_g_per_kwh};
  if ((pos != samples_.end() && pos->interval.overlaps(added.interval)) ||
      (pos != samples_.begin() && (pos - 1)->interval.overlaps(added.interval))) {
    throw DataError("feed sample " + format_timestamp(sample.from) +
                    " overlaps an ingested interval");
  }
  samples_.insert(pos, added);
  trace_ = std::make_shared<const CarbonTrace>(samples_);
  return AppendResult::appended;
}

std::shared_ptr<const CarbonTrace> IntensityHistory::snapshot() const {
  std::lock_guard lock(mu_);
  return trace_;
}

std::size_t IntensityHistory::size() const {
  std::lock_guard lock(mu_);
  return samples_.size();
}

std::optional<Timestamp> IntensityHistory::last_from() const {
  std::lock_guard lock(mu_);
  if (samples_.empty()) return std::nullopt;
  return samples_.back().interval.start;
}

Timestamp LiveService::system_now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

LiveService::LiveService(LiveConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)), log_(config_.log_path) {}

LiveService::~LiveService() { stop(); }

bool LiveService::ingest(const IntensityFeedSample& sample) {
  try {
    return history_.append(sample) == IntensityHistory::AppendResult::appended;
  } catch (const DataError& e) {
    spdlog::warn("rejected intensity sample: {}", e.what());
    return false;
  }
}

bool LiveService::poll_once() {
  try {
    return ingest(poll_intensity(config_.feed_url, config_.poll_timeout));
  } catch (const std::exception& e) {
    spdlog::warn("intensity poll failed: {}", e.what());
    return false;
  }
}

HttpResponse LiveService::handle_select() {
  const auto trace = history_.snapshot();
  if (!trace) return {503, error_body("no_intensity_data", "no intensity data")};

  const CarbonSample& sample = current_sample(*trace, clock_());
  DecisionLogEntry entry;
  try {
    const auto d = decide(sample.intensity_g_per_kwh, *trace, sample.interval.start, config_.pool,
                          config_.window, config_.mapping);
    entry.decided_at = clock_();
    entry.at = d.at;
    entry.c_current = d.c_current;
    entry.fraction = d.fraction;
    entry.e_target = d.e_target;
    entry.model = d.model;
    entry.mapping = config_.mapping;
    entry.bounds = *d.bounds;
    entry.window = config_.window;
    entry.pool = config_.pool_label;
  } catch (const DataError& e) {
    return {500, error_body("selection_failed", e.what())};
  }

  try {
    entry = log_.append(std::move(entry));
  } catch (const std::exception& e) {
    spdlog::error("decision not served: {}", e.what());
    return {500, error_body("log_write_failed", e.what())};
  }

  nlohmann::ordered_json j;
  j["model"] = entry.model;
  j["e_target_mj"] = entry.e_target;
  j["fraction"] = entry.fraction;
  j["c_current"] = entry.c_current;
  j["c_low"] = entry.bounds.c_low;
  j["c_high"] = entry.bounds.c_high;
  j["mapping"] = std::string(to_string(entry.mapping));
  j["decided_at"] = format_timestamp(entry.decided_at);
  return {200, j.dump()};
}

HttpResponse LiveService::handle_health() const {
  nlohmann::ordered_json j;
  const auto last = history_.last_from();
  j["status"] = last ? "ok" : "no_data";
  j["samples_ingested"] = history_.size();
  j["last_sample_from"] = last ? nlohmann::ordered_json(format_timestamp(*last))
                               : nlohmann::ordered_json(nullptr);
  return {200, j.dump()};
}

int LiveService::start(bool run_poller) {
  server_ = std::make_unique<httplib::Server>();
  const auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server_->Get("/v1/select",
               [this, reply](const httplib::Request&, httplib::Response& res) {
                 reply(res, handle_select());
               });
  server_->Get("/v1/health",
               [this, reply](const httplib::Request&, httplib::Response& res) {
                 reply(res, handle_health());
               });

  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
  } else if (!server_->bind_to_port(config_.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();

  if (run_poller) {
    poller_ = std::jthread([this](std::stop_token st) { poll_loop(st); });
  }
  spdlog::info("serving selections on {}:{}", config_.host, port);
  return port;
}

void LiveService::poll_loop(std::stop_token stop) {
  while (!stop.stop_requested()) {
    poll_once();
    std::unique_lock lock(poll_mu_);
    poll_cv_.wait_for(lock, stop, config_.poll_period, [] { return false; });
  }
}

void LiveService::stop() {
  if (poller_.joinable()) {
    poller_.request_stop();
    poller_.join();
  }
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
}

}  // namespace carbonsched
