// Replays a recorded carbon-intensity trace as a live feed, one sample per
// GET /intensity, for exercising `carbonsched serve` locally.
#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "carbonsched/errors.hpp"
#include "carbonsched/mock_feed.hpp"
#include "carbonsched/traces.hpp"

namespace {
std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mock carbon-intensity feed"};
  std::string carbon;
  std::string host = "127.0.0.1";
  int port = 8090;
  app.add_option("--carbon", carbon, "Carbon trace (CSV or JSON) to replay")->required();
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    carbonsched::MockFeedServer feed(carbonsched::load_carbon_trace_file(carbon));
    feed.start(host, port);
    std::cout << "feed at " << feed.url() << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    feed.stop();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
