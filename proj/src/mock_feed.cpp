#include "carbonsched/mock_feed.hpp"

#include <stdexcept>

#include "httplib.h"

namespace carbonsched {

MockFeedServer::MockFeedServer(std::vector<IntensityFeedSample> series)
    : series_(std::move(series)) {
  if (series_.empty()) throw std::invalid_argument("mock feed needs at least one sample");
}

MockFeedServer::MockFeedServer(const CarbonTrace& trace) {
  for (const auto& s : trace.samples()) {
    series_.push_back({s.interval.start, s.interval.end, s.intensity_g_per_kwh});
  }
}

MockFeedServer::~MockFeedServer() { stop(); }

void MockFeedServer::set_body_override(std::optional<std::string> body) {
  std::lock_guard lock(mu_);
  body_override_ = std::move(body);
}

int MockFeedServer::start(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  server_->Get("/intensity", [this](const httplib::Request&, httplib::Response& res) {
    if (failing_) {
      res.status = 503;
      return;
    }
    std::optional<std::string> override_body;
    {
      std::lock_guard lock(mu_);
      override_body = body_override_;
    }
    if (override_body) {
      res.set_content(*override_body, "application/json");
      return;
    }
    const std::size_t i = std::min(served_.fetch_add(1), series_.size() - 1);
    res.set_content(format_feed_sample(series_[i]), "application/json");
  });

  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : port;
  if (port != 0 && !server_->bind_to_port(host, port)) port_ = -1;
  if (port_ < 0) throw std::runtime_error("mock feed cannot bind " + host);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockFeedServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockFeedServer::url() const {
  return "http://" + host_ + ":" + std::to_string(port_) + "/intensity";
}

}  // namespace carbonsched
