// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fail.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "alignment_oracle.hpp"
#include "carbonsched/cli.hpp"
#include "carbonsched/decision_log.hpp"
#include "carbonsched/emissions.hpp"
#include "carbonsched/live_service.hpp"
#include "carbonsched/mock_feed.hpp"
#include "carbonsched/model_registry.hpp"
#include "carbonsched/selector.hpp"
#include "carbonsched/simulator.hpp"
#include "carbonsched/traces.hpp"
#include "generators.hpp"
#include "httplib.h"
#include "per_request_oracle.hpp"

using namespace carbonsched;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, double v) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path scratch_dir(const std::string& name) {
  std::random_device rd;
  auto p = fs::temp_directory_path() / ("carbonsched-accept-" + name + "-" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

RunSummary summary_with(std::string policy, double error_pct, double carbon_g) {
  RunSummary r;
  r.policy = std::move(policy);
  r.blended_error_pct = error_pct;
  r.total_carbon_g = carbon_g;
  return r;
}

// 1
Outcome cee_reproduction() {
  Outcome o;
  // Rounded improvement figures, expressed as error rates against a 100% baseline.
  const auto base = summary_with("baseline", 100.0, 0.0);
  const auto large = carbon_emission_efficiency(base, summary_with("ResNet152", 100.0 - 16.58, 5720));
  const auto heur = carbon_emission_efficiency(base, summary_with("heuristic", 100.0 - 8.00, 1532));
  // Same quotients from the table's error rates.
  const auto large_t = compare_efficiency("ResNet50", 7.138, 0, "ResNet152", 5.954, 5720);
  const auto heur_t = compare_efficiency("ResNet50", 7.138, 0, "heuristic", 6.57, 1532);
  const std::pair<const EfficiencyComparison*, double> checks[] = {
      {&large, 0.0029}, {&heur, 0.00522}, {&large_t, 0.0029}, {&heur_t, 0.00522}};
  for (const auto& [c, want] : checks) {
    if (!c->cee || std::fabs(*c->cee - want) > 0.0001) {
      o.fail(c->candidate + " cee " + (c->cee ? fmt("%.6g", *c->cee) : "undefined") + ", want " +
             fmt("%g", want));
    }
  }
  if (o.pass) {
    o.detail = "0.0029 -> " + fmt("%.7f", *large.cee) + ", 0.00522 -> " + fmt("%.7f", *heur.cee);
  }
  return o;
}

// 2
Outcome quality_improvement_reproduction() {
  Outcome o;
  const std::pair<double, double> cases[] = {{6.454, 9.58}, {5.954, 16.58}, {6.57, 8.00}};
  std::string got;
  for (const auto& [candidate, want] : cases) {
    const double q = quality_improvement(7.138, candidate);
    got += fmt("%.4f ", q);
    if (std::fabs(q - want) > 0.05) o.fail(fmt("candidate %g", candidate) + fmt(" -> %.4f", q));
  }
  if (o.pass) o.detail = "vs ResNet50: " + got;
  return o;
}

// 3
Outcome boundary_selection() {
  Outcome o;
  std::size_t n = 0;
  const std::pair<const char*, ModelPool> pools[] = {{"full", builtin_table1()},
                                                     {"resnet", builtin_resnet_only()}};
  const double lows[] = {0.0, 17.5, 100.0, 171.0, 250.25};
  const double spans[] = {0.5, 1.0, 100.0, 333.3};
  for (const auto& [label, pool] : pools) {
    const ModelProfile* lo = &pool.profiles().front();
    const ModelProfile* hi = lo;
    for (const auto& p : pool.profiles()) {
      if (p.energy_mj < lo->energy_mj) lo = &p;
      if (p.energy_mj > hi->energy_mj) hi = &p;
    }
    for (double c_low : lows) {
      for (double span : spans) {
        const double c_high = c_low + span;
        const auto t = gen::epoch();
        for (auto window : {BoundsWindow::whole_trace(), BoundsWindow::trailing(24h)}) {
          const CarbonTrace h({{{t, t + 30min}, c_low}, {{t + 30min, t + 60min}, c_high}});
          const auto at = t + 30min;
          const struct {
            double c;
            MappingDirection dir;
            const ModelProfile* want;
          } cases[] = {{c_low, MappingDirection::prose, hi},
                       {c_high, MappingDirection::prose, lo},
                       {c_low, MappingDirection::literal, lo},
                       {c_high, MappingDirection::literal, hi}};
          for (const auto& c : cases) {
            ++n;
            const auto d = decide(c.c, h, at, pool, window, c.dir);
            if (d.model != c.want->name) {
              o.fail(std::string(label) + " " + std::string(to_string(c.dir)) + fmt(" c=%g", c.c) +
                     " -> " + d.model + ", want " + c.want->name);
            }
          }
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(n) + " boundary decisions over full and resnet pools";
  return o;
}

// 4
Outcome monotonicity() {
  Outcome o;
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> u(0.0, 800.0);
  const ModelPool pools[] = {builtin_table1(), builtin_resnet_only()};
  for (int i = 0; i < 1000; ++i) {
    const auto& pool = pools[i % 2];
    double lo = u(rng), hi = u(rng), c1 = u(rng), c2 = u(rng);
    if (lo > hi) std::swap(lo, hi);
    if (c1 > c2) std::swap(c1, c2);
    const auto t = gen::epoch();
    const CarbonTrace h({{{t, t + 30min}, lo}, {{t + 30min, t + 60min}, hi}});
    const auto d1 = decide(c1, h, t + 30min, pool, BoundsWindow::whole_trace(), MappingDirection::prose);
    const auto d2 = decide(c2, h, t + 30min, pool, BoundsWindow::whole_trace(), MappingDirection::prose);
    if (pool.find(d1.model)->energy_mj < pool.find(d2.model)->energy_mj) {
      o.fail(fmt("case %g: ", i) + d1.model + " at lower intensity, " + d2.model + " at higher");
    }
  }
  if (o.pass) o.detail = "1000 random cases, prose never picks more energy at higher intensity";
  return o;
}

// Ragged request samples laid over 48 half-hour carbon steps, fully covered.
gen::Grid ragged_over_grid(std::mt19937_64& rng) {
  auto g = gen::half_hour_grid(rng, 48, 0);
  g.requests.clear();
  std::uniform_int_distribution<int> width(1, 150);
  std::uniform_int_distribution<std::uint64_t> count(0, 10000);
  auto t = gen::epoch();
  const auto end = g.carbon.back().interval.end;
  while (t < end) {
    auto next = std::min(end, t + std::chrono::minutes(width(rng)));
    g.requests.push_back({{t, next}, count(rng)});
    t = next;
  }
  return g;
}

// 5
Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(5005);
  std::uint64_t requests = 0;
  int worst_diff = 0;
  for (int trial = 0; trial < 100 && o.pass; ++trial) {
    const auto g = trial % 2 == 0 ? gen::half_hour_grid(rng, 48, 10000) : ragged_over_grid(rng);
    const CarbonTrace carbon(g.carbon);
    const RequestTrace trace(g.requests);
    const auto tl = align(carbon, trace, GapPolicy::strict);

    const auto minute = oracle::minute_attribution(g.carbon, g.requests);
    std::size_t k = 0;
    for (const auto& s : tl.steps) {
      while (g.carbon[k].interval != s.interval) ++k;
      const double diff = std::fabs(static_cast<double>(s.count) - minute[k]);
      worst_diff = std::max(worst_diff, static_cast<int>(std::ceil(diff)));
      if (diff > 1.0) o.fail(fmt("trial %g: alignment off by more than one request", trial));
    }

    std::uint64_t total = 0;
    for (const auto& s : tl.steps) total += s.count;
    if (total == 0) continue;
    requests += total;

    const bool prose = trial % 4 < 2;
    const auto& pool = trial % 3 == 0 ? builtin_table1() : builtin_resnet_only();
    auto config = default_config(pool, "p");
    config.mapping = prose ? MappingDirection::prose : MappingDirection::literal;
    const auto report = run(config, carbon, trace);
    const auto* h = report.find_run("heuristic");

    std::vector<oracle::Step> steps;
    for (const auto& s : tl.steps) steps.push_back({s.interval, s.intensity_g_per_kwh, s.count});
    const std::vector<ModelProfile> profiles(pool.profiles().begin(), pool.profiles().end());
    const auto expected = oracle::per_request(steps, g.carbon, profiles, prose);
    if (h->total_carbon_g != expected.total_g) {
      o.fail(fmt("trial %g: total ", trial) + fmt("%.17g", h->total_carbon_g) + " vs oracle " +
             fmt("%.17g", expected.total_g));
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (h->per_interval[i].carbon_g != expected.per_interval_g[i]) {
        o.fail(fmt("trial %g: interval carbon differs from oracle", trial));
      }
    }
  }
  if (o.pass) {
    o.detail = "100 timelines, " + std::to_string(requests) +
               " requests decided one by one; totals bit-identical; max alignment deviation " +
               std::to_string(worst_diff);
  }
  return o;
}

// 6
Outcome dominance() {
  Outcome o;
  std::vector<CarbonSample> carbon;
  std::vector<RequestSample> requests;
  auto t = gen::epoch();
  for (int i = 0; i < 7 * 48; ++i, t += 30min) {
    const double phase = 2 * std::numbers::pi * (i % 48) / 48.0;
    carbon.push_back({{t, t + 30min}, 200.0 + 120.0 * std::sin(phase)});
    requests.push_back({{t, t + 30min}, 10000});
  }
  auto config = default_config(builtin_resnet_only(), "resnet");
  config.mapping = MappingDirection::prose;
  const auto report = run(config, CarbonTrace(carbon), RequestTrace(requests));
  const auto* h = report.find_run("heuristic");
  const auto* r152 = report.find_run("ResNet152");
  const auto* r34 = report.find_run("ResNet34");
  if (!(h->total_carbon_g <= r152->total_carbon_g)) o.fail("heuristic emits more than ResNet152");
  if (!(h->blended_error_pct <= r34->blended_error_pct)) o.fail("heuristic error above ResNet34");
  const ModelPool resnets = builtin_resnet_only();
  for (const auto& p : resnets.profiles()) {
    if (report.find_run(p.name)->blended_error_pct != p.error_rate_pct) {
      o.fail(p.name + " blended error differs from its table rate");
    }
  }
  if (o.pass) {
    o.detail = "heuristic " + fmt("%.2f g", h->total_carbon_g) + fmt(" <= ResNet152 %.2f g", r152->total_carbon_g) +
               fmt(", error %.4f%%", h->blended_error_pct) + fmt(" <= %.3f%%", r34->blended_error_pct);
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 7
Outcome determinism() {
  Outcome o;
  const fs::path data = fs::path(CARBONSCHED_SOURCE_DIR) / "data";
  const auto dir = scratch_dir("determinism");
  for (const char* format : {"json", "csv"}) {
    std::string outputs[2];
    for (int i = 0; i < 2; ++i) {
      const auto out = dir / (std::string("run") + std::to_string(i) + "." + format);
      std::ostringstream so, se;
      const int code = cli::run({"carbonsched", "simulate", "--carbon", (data / "carbon_sample.csv").string(),
                                 "--requests", (data / "requests_sample.csv").string(), "--format", format,
                                 "--out", out.string()},
                                so, se);
      if (code != 0) o.fail(std::string("simulate failed: ") + se.str());
      outputs[i] = slurp(out);
    }
    if (outputs[0].empty() || outputs[0] != outputs[1]) o.fail(std::string(format) + " reports differ");
  }
  fs::remove_all(dir);
  if (o.pass) o.detail = "two simulate runs, byte-identical JSON and CSV reports";
  return o;
}

// 8
Outcome live_self_verification() {
  Outcome o;
  const auto dir = scratch_dir("live");
  std::vector<IntensityFeedSample> series;
  auto t = gen::epoch();
  std::mt19937_64 rng(8008);
  std::normal_distribution<double> noise(0.0, 8.0);
  for (int i = 0; i < 48; ++i, t += 30min) {
    const double phase = 2 * std::numbers::pi * i / 48.0;
    series.push_back({t, t + 30min, std::max(0.0, 180.0 + 90.0 * std::sin(phase) + noise(rng))});
  }

  std::size_t served = 0;
  std::size_t replayed = 0;
  const std::pair<MappingDirection, const char*> setups[] = {{MappingDirection::prose, "resnet"},
                                                             {MappingDirection::literal, "full"}};
  for (const auto& [mapping, pool_name] : setups) {
    MockFeedServer feed(series);
    feed.start();

    LiveConfig config;
    config.feed_url = feed.url();
    config.poll_timeout = 2s;
    config.mapping = mapping;
    config.pool_label = pool_name;
    config.pool = builtin_pool(pool_name);
    config.log_path = dir / (std::string(pool_name) + ".jsonl");
    config.port = 0;

    // Simulated wall clock: ten minutes into the newest ingested sample.
    std::atomic<long> now_s{0};
    LiveService svc(config, [&] { return Timestamp(std::chrono::seconds(now_s.load())); });
    const int port = svc.start(false);
    httplib::Client client("127.0.0.1", port);

    auto r = client.Get("/v1/select");
    if (!r || r->status != 503) o.fail("no 503 before the first sample");

    for (std::size_t i = 0; i < series.size(); ++i) {
      if (!svc.poll_once()) o.fail("poll " + std::to_string(i) + " ingested nothing");
      now_s = std::chrono::duration_cast<std::chrono::seconds>(
                  (series[i].from + 10min).time_since_epoch())
                  .count();
      for (int k = 0; k < 2; ++k) {
        r = client.Get("/v1/select");
        if (!r || r->status != 200) {
          o.fail("select failed after sample " + std::to_string(i));
        } else {
          ++served;
        }
      }
    }
    svc.stop();
    feed.stop();

    const auto entries = replay_log(config.log_path);
    if (entries.size() != 2 * series.size()) o.fail("log holds " + std::to_string(entries.size()) + " entries");
    for (const auto& e : entries) {
      const auto d = replay_decision(e, builtin_pool(pool_name));
      ++replayed;
      if (d.model != e.model) o.fail("entry at " + format_timestamp(e.decided_at) + " replays to " + d.model);
    }
  }
  fs::remove_all(dir);
  if (o.pass) {
    o.detail = std::to_string(served) + " selections served over HTTP from a 48-sample mock feed, " +
               std::to_string(replayed) + " log entries replayed to their models; 503 before first sample";
  }
  return o;
}

// 9
Outcome unit_bridge() {
  Outcome o;
  if (grams_per_inference(3.6e9, 1.0) != 1.0) o.fail("3.6e9 mJ at 1 g/kWh is not exactly 1 g");
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> e(1.0, 5000.0), c(0.0, 1000.0), k(0.01, 100.0);
  double worst = 0.0;
  const auto rel = [](double a, double b) { return a == b ? 0.0 : std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)); };
  for (int i = 0; i < 100000; ++i) {
    const double ei = e(rng), ci = c(rng), ki = k(rng), e2 = e(rng);
    const double base = grams_per_inference(ei, ci);
    worst = std::max({worst, rel(grams_per_inference(ki * ei, ci), ki * base),
                      rel(grams_per_inference(ei, ki * ci), ki * base),
                      rel(grams_per_inference(ei + e2, ci), base + grams_per_inference(e2, ci))});
  }
  if (worst > 1e-12) o.fail(fmt("linearity relative error %.3g", worst));
  if (o.pass) o.detail = fmt("exact 1 g; worst relative linearity error %.3g over 100000 draws", worst);
  return o;
}

}  // namespace

// With a criterion number as the only argument, runs just that one.
int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"CEE reproduction", cee_reproduction},
      {"quality improvement reproduction", quality_improvement_reproduction},
      {"boundary selection", boundary_selection},
      {"monotonicity", monotonicity},
      {"oracle equivalence", oracle_equivalence},
      {"dominance", dominance},
      {"determinism", determinism},
      {"live self-verification", live_self_verification},
      {"unit bridge", unit_bridge},
  };

  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    if (only != 0 && index != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d. %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    failed += !o.pass;
  }
  if (only == 0) std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
