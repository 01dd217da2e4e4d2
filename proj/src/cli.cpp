#include "carbonsched/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "carbonsched/digest.hpp"
#include "carbonsched/emissions.hpp"
#include "carbonsched/errors.hpp"
#include "carbonsched/live_service.hpp"
#include "carbonsched/model_registry.hpp"
#include "carbonsched/report_io.hpp"
#include "carbonsched/simulator.hpp"
#include "carbonsched/traces.hpp"

namespace carbonsched::cli {

namespace {

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested = true; }

std::string sig4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

BoundsWindow parse_window(const std::string& text) {
  if (text == "whole" || text == "whole_trace") return BoundsWindow::whole_trace();
  long hours = 0;
  try {
    std::size_t used = 0;
    hours = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("--window must be 'whole' or a positive number of hours, got '" + text + "'");
  }
  return BoundsWindow::trailing(std::chrono::hours(hours));
}

/// `builtin:<name>` or a CSV path.
std::pair<ModelPool, std::string> resolve_pool(const std::string& path, const std::string& builtin) {
  if (!path.empty()) {
    constexpr std::string_view kBuiltin = "builtin:";
    if (path.rfind(kBuiltin, 0) == 0) {
      const std::string name = path.substr(kBuiltin.size());
      return {builtin_pool(name), name};
    }
    try {
      return {load_pool_file(path), path};
    } catch (const DataError& e) {
      throw DataError(path + ": " + e.what());
    }
  }
  const std::string name = builtin.empty() ? "resnet" : builtin;
  return {builtin_pool(name), name};
}

template <typename F>
auto with_file_context(const std::string& path, F&& load) {
  try {
    return load();
  } catch (const DataError& e) {
    const std::string what = e.what();
    if (what.find(path) != std::string::npos) throw;
    throw DataError(path + ": " + what);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.flush();
  if (!f) throw DataError("cannot write " + path);
}

struct SimulateArgs {
  std::string carbon;
  std::string requests;
  std::string pool;
  std::string pool_builtin;
  std::string mapping = "prose";
  std::string window = "whole";
  std::string gap = "strict";
  std::string baseline;
  std::string out;
  std::string format = "json";
};

int simulate(const SimulateArgs& a, std::ostream& out) {
  // Configuration first so a config error is reported as such (exit 2).
  const MappingDirection mapping = parse_mapping(a.mapping);
  const BoundsWindow window = parse_window(a.window);
  const GapPolicy gap = parse_gap_policy(a.gap);
  if (a.format != "json" && a.format != "csv") {
    throw ConfigError("--format must be json or csv");
  }
  auto [pool, label] = resolve_pool(a.pool, a.pool_builtin);

  SimulationConfig config = default_config(std::move(pool), std::move(label));
  config.mapping = mapping;
  config.window = window;
  config.gap_policy = gap;
  if (!a.baseline.empty()) {
    if (config.pool.find(a.baseline) == nullptr) {
      throw ConfigError("baseline model '" + a.baseline + "' is not in the pool");
    }
    bool listed = false;
    for (const auto& p : config.policies) listed = listed || p.name == a.baseline;
    if (!listed) config.policies.push_back(PolicySpec::fixed(a.baseline));
    config.baseline = a.baseline;
  }

  const std::string carbon_bytes = read_file(a.carbon);
  const std::string request_bytes = read_file(a.requests);
  const CarbonTrace carbon = with_file_context(a.carbon, [&] {
    const auto first = carbon_bytes.find_first_not_of(" \t\r\n");
    const bool json = first != std::string::npos && (carbon_bytes[first] == '[' || carbon_bytes[first] == '{');
    return json ? load_carbon_trace_json(carbon_bytes) : load_carbon_trace(carbon_bytes);
  });
  const RequestTrace requests =
      with_file_context(a.requests, [&] { return load_request_trace(request_bytes); });

  SimulationReport report = run(config, carbon, requests);
  report.inputs.push_back({"carbon", a.carbon, sha256_hex(carbon_bytes)});
  report.inputs.push_back({"requests", a.requests, sha256_hex(request_bytes)});
  if (!a.pool.empty() && a.pool.rfind("builtin:", 0) != 0) {
    report.inputs.push_back({"pool", a.pool, sha256_hex(read_file(a.pool))});
  }

  const std::string out_path =
      a.out.empty() ? "carbonsched-report." + a.format : a.out;
  write_text(out_path, a.format == "json" ? format_report_json(report) : format_report_csv(report));

  out << "policy                 total_carbon_g  blended_error_pct  cee_vs_" << config.baseline << "\n";
  for (const auto& r : report.runs) {
    std::string cee_text = "(baseline)";
    for (const auto& c : report.comparisons) {
      if (c.candidate == r.policy) cee_text = c.cee ? sig4(*c.cee) : "undefined";
    }
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %15s %18s  %s\n", r.policy.c_str(),
                  sig4(r.total_carbon_g).c_str(), sig4(r.blended_error_pct).c_str(),
                  cee_text.c_str());
    out << line;
  }
  out << "mapping=" << to_string(config.mapping) << " bounds=" << to_string(config.window)
      << " steps=" << report.steps << " requests=" << report.ingested_requests << "\n";
  out << "(values rounded to 4 significant digits; full precision in " << out_path << ")\n";
  return kExitOk;
}

struct CeeArgs {
  double baseline_error = 0.0;
  double candidate_error = 0.0;
  double baseline_carbon = 0.0;
  double candidate_carbon = 0.0;
};

int cee(const CeeArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.baseline_error > 0.0) || !(a.candidate_error > 0.0)) {
    err << "error: error rates must be positive\n";
    return kExitDataError;
  }
  const auto c = compare_efficiency("baseline", a.baseline_error, a.baseline_carbon, "candidate",
                                    a.candidate_error, a.candidate_carbon);
  out << "quality_improvement_pct: " << sig6(c.quality_improvement_pct) << "\n";
  out << "delta_carbon_g: " << sig6(c.delta_carbon_g) << "\n";
  if (!c.cee) {
    err << "error: CEE undefined (" << c.undefined_reason << ")\n";
    return kExitDataError;
  }
  out << "cee: " << sig6(*c.cee) << "\n";
  return kExitOk;
}

struct ValidateArgs {
  std::string carbon;
  std::string requests;
  std::string pool;
  std::string pool_builtin;
};

int validate(const ValidateArgs& a, std::ostream& out) {
  const int chosen = !a.carbon.empty() + !a.requests.empty() + !a.pool.empty() + !a.pool_builtin.empty();
  if (chosen != 1) {
    throw ConfigError("validate takes exactly one of --carbon, --requests, --pool, --pool-builtin");
  }
  if (!a.carbon.empty()) {
    const auto trace = with_file_context(a.carbon, [&] { return load_carbon_trace_file(a.carbon); });
    double lo = trace.front().intensity_g_per_kwh;
    double hi = lo;
    for (const auto& s : trace.samples()) {
      lo = std::min(lo, s.intensity_g_per_kwh);
      hi = std::max(hi, s.intensity_g_per_kwh);
    }
    out << "carbon trace " << a.carbon << ": valid\n"
        << "rows: " << trace.size() << "\n"
        << "span: " << format_timestamp(trace.span().start) << " .. "
        << format_timestamp(trace.span().end) << "\n"
        << "intensity_g_per_kwh: min " << lo << " max " << hi << "\n";
    return kExitOk;
  }
  if (!a.requests.empty()) {
    const auto trace =
        with_file_context(a.requests, [&] { return load_request_trace_file(a.requests); });
    std::uint64_t lo = trace.front().count;
    std::uint64_t hi = lo;
    std::uint64_t total = 0;
    for (const auto& s : trace.samples()) {
      lo = std::min(lo, s.count);
      hi = std::max(hi, s.count);
      total += s.count;
    }
    out << "request trace " << a.requests << ": valid\n"
        << "rows: " << trace.size() << "\n"
        << "span: " << format_timestamp(trace.span().start) << " .. "
        << format_timestamp(trace.span().end) << "\n"
        << "count: min " << lo << " max " << hi << " total " << total << "\n";
    return kExitOk;
  }
  const auto [pool, label] = resolve_pool(a.pool, a.pool_builtin);
  const auto e = pool.energy_bounds();
  double err_lo = 100.0;
  double err_hi = 0.0;
  for (const auto& p : pool.profiles()) {
    err_lo = std::min(err_lo, p.error_rate_pct);
    err_hi = std::max(err_hi, p.error_rate_pct);
  }
  out << "model pool " << label << ": valid\n"
      << "rows: " << pool.size() << "\n"
      << "energy_mj: min " << sig6(e.e_low) << " max " << sig6(e.e_high) << "\n"
      << "error_rate_pct: min " << sig6(err_lo) << " max " << sig6(err_hi) << "\n"
      << to_csv(pool);
  return kExitOk;
}

struct ServeArgs {
  std::string feed_url;
  std::string pool;
  std::string pool_builtin;
  std::string mapping = "prose";
  int window_hours = 24;
  double poll_seconds = 300;
  int timeout_ms = 5000;
  std::string log = "decisions.jsonl";
  std::string host = "127.0.0.1";
  int port = 8080;
};

int serve(const ServeArgs& a, std::ostream& out) {
  LiveConfig config;
  if (a.feed_url.empty()) throw ConfigError("--feed-url (or CARBONSCHED_FEED_URL) is required");
  split_endpoint(a.feed_url);
  config.feed_url = a.feed_url;
  config.mapping = parse_mapping(a.mapping);
  config.window = BoundsWindow::trailing(std::chrono::hours(a.window_hours));
  if (!(a.poll_seconds > 0)) throw ConfigError("--poll-seconds must be positive");
  config.poll_period = std::chrono::milliseconds(static_cast<long>(a.poll_seconds * 1000));
  config.poll_timeout = std::chrono::milliseconds(a.timeout_ms);
  auto [pool, label] = resolve_pool(a.pool, a.pool_builtin);
  config.pool = std::move(pool);
  config.pool_label = std::move(label);
  config.log_path = a.log;
  config.host = a.host;
  config.port = a.port;

  g_stop_requested = false;
  std::signal(SIGINT, on_stop_signal);
  std::signal(SIGTERM, on_stop_signal);

  LiveService service(std::move(config));
  const int port = service.start(true);
  out << "listening on " << a.host << ":" << port << " (GET /v1/select, /v1/health)\n" << std::flush;
  while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  service.stop();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Carbon-intensity-aware model selection: simulate, serve, cee, validate",
               args.empty() ? "carbonsched" : args.front()};
  app.set_config("--config", "", "TOML/INI file with keys named after the long flags");
  app.require_subcommand(1, 1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Replay traces under the heuristic and fixed baselines");
  simulate_cmd->add_option("--carbon", sim.carbon, "Carbon intensity CSV or JSON")->required();
  simulate_cmd->add_option("--requests", sim.requests, "Request count CSV")->required();
  auto* sim_pool = simulate_cmd->add_option("--pool", sim.pool, "Model pool CSV (or builtin:<name>)");
  simulate_cmd->add_option("--pool-builtin", sim.pool_builtin, "full|resnet (default resnet)")
      ->excludes(sim_pool);
  simulate_cmd->add_option("--mapping", sim.mapping, "prose|literal")->capture_default_str();
  simulate_cmd->add_option("--window", sim.window, "whole|<hours>")->capture_default_str();
  simulate_cmd->add_option("--gap", sim.gap, "strict|carry_forward")->capture_default_str();
  simulate_cmd->add_option("--baseline", sim.baseline, "Fixed model used as the CEE baseline");
  simulate_cmd->add_option("--out", sim.out, "Report path (default carbonsched-report.<format>)");
  simulate_cmd->add_option("--format", sim.format, "json|csv")->capture_default_str();

  CeeArgs cee_args;
  auto* cee_cmd = app.add_subcommand("cee", "Carbon emission efficiency from raw figures");
  cee_cmd->add_option("--baseline-error", cee_args.baseline_error, "Baseline error rate (%)")->required();
  cee_cmd->add_option("--candidate-error", cee_args.candidate_error, "Candidate error rate (%)")->required();
  cee_cmd->add_option("--baseline-carbon", cee_args.baseline_carbon, "Baseline carbon (g)")->required();
  cee_cmd->add_option("--candidate-carbon", cee_args.candidate_carbon, "Candidate carbon (g)")->required();

  ValidateArgs val;
  auto* validate_cmd = app.add_subcommand("validate", "Check one input file and summarize it");
  validate_cmd->add_option("--carbon", val.carbon, "Carbon intensity CSV or JSON");
  validate_cmd->add_option("--requests", val.requests, "Request count CSV");
  validate_cmd->add_option("--pool", val.pool, "Model pool CSV");
  validate_cmd->add_option("--pool-builtin", val.pool_builtin, "full|resnet");

  ServeArgs srv;
  auto* serve_cmd = app.add_subcommand("serve", "Run the live selection service");
  serve_cmd->add_option("--feed-url", srv.feed_url, "Intensity feed URL")->envname("CARBONSCHED_FEED_URL");
  serve_cmd->add_option("--pool", srv.pool, "Model pool CSV (or builtin:<name>)")->envname("CARBONSCHED_POOL");
  serve_cmd->add_option("--pool-builtin", srv.pool_builtin, "full|resnet");
  serve_cmd->add_option("--mapping", srv.mapping, "prose|literal")
      ->envname("CARBONSCHED_MAPPING")
      ->capture_default_str();
  serve_cmd->add_option("--window-hours", srv.window_hours, "Trailing bounds window")->capture_default_str();
  serve_cmd->add_option("--poll-seconds", srv.poll_seconds, "Feed poll period")->capture_default_str();
  serve_cmd->add_option("--timeout-ms", srv.timeout_ms, "Feed request timeout")->capture_default_str();
  serve_cmd->add_option("--log", srv.log, "Decision log (JSON lines)")->capture_default_str();
  serve_cmd->add_option("--host", srv.host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port", srv.port, "Listen port")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("carbonsched");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*simulate_cmd) return simulate(sim, out);
    if (*cee_cmd) return cee(cee_args, out, err);
    if (*validate_cmd) return validate(val, out);
    if (*serve_cmd) return serve(srv, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitConfigError;
}

}  // namespace carbonsched::cli
