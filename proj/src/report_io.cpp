#include "carbonsched/report_io.hpp"

#include "csv.hpp"

namespace carbonsched {

namespace {

ordered_json interval_json(const Interval& iv) {
  return {{"start", format_timestamp(iv.start)}, {"end", format_timestamp(iv.end)}};
}

ordered_json window_json(const BoundsWindow& w) {
  ordered_json j;
  if (w.mode == BoundsWindow::Mode::whole_trace) {
    j["mode"] = "whole_trace";
  } else {
    j["mode"] = "trailing";
    j["hours"] = w.hours.count();
  }
  return j;
}

}  // namespace

ordered_json to_json(const IntervalEmission& e) {
  ordered_json j;
  j["interval"] = interval_json(e.interval);
  j["model"] = e.model;
  j["count"] = e.count;
  j["intensity_g_per_kwh"] = e.intensity_g_per_kwh;
  j["error_rate_pct"] = e.error_rate_pct;
  j["energy_mj"] = e.energy_mj;
  j["energy_mj_total"] = e.energy_mj_total;
  j["carbon_g"] = e.carbon_g;
  return j;
}

ordered_json to_json(const RunSummary& r) {
  ordered_json j;
  j["policy"] = r.policy;
  j["total_carbon_g"] = r.total_carbon_g;
  j["total_requests"] = r.total_requests;
  j["blended_error_pct"] = r.blended_error_pct;
  auto rows = ordered_json::array();
  for (const auto& e : r.per_interval) rows.push_back(to_json(e));
  j["per_interval"] = std::move(rows);
  return j;
}

ordered_json to_json(const EfficiencyComparison& c) {
  ordered_json j;
  j["baseline"] = c.baseline;
  j["candidate"] = c.candidate;
  j["quality_improvement_pct"] = c.quality_improvement_pct;
  j["delta_carbon_g"] = c.delta_carbon_g;
  j["cee"] = c.cee ? ordered_json(*c.cee) : ordered_json(nullptr);
  if (!c.cee) j["undefined_reason"] = c.undefined_reason;
  return j;
}

ordered_json to_json(const SimulationReport& report) {
  const auto& cfg = report.config;
  ordered_json pool = ordered_json::array();
  for (const auto& p : cfg.pool.profiles()) {
    pool.push_back({{"name", p.name}, {"energy_mj", p.energy_mj}, {"error_rate_pct", p.error_rate_pct}});
  }
  ordered_json policies = ordered_json::array();
  for (const auto& p : cfg.policies) {
    ordered_json entry{{"name", p.name}};
    entry["kind"] = p.fixed_model ? "fixed" : "heuristic";
    if (p.fixed_model) entry["model"] = *p.fixed_model;
    policies.push_back(std::move(entry));
  }

  ordered_json j;
  j["config"] = {
      {"pool", {{"label", cfg.pool_label}, {"profiles", std::move(pool)}}},
      {"mapping", std::string(to_string(cfg.mapping))},
      {"bounds_window", window_json(cfg.window)},
      {"gap_policy", std::string(to_string(cfg.gap_policy))},
      {"policies", std::move(policies)},
      {"baseline", cfg.baseline},
      {"mj_per_kwh", kMillijoulesPerKwh},
  };
  ordered_json inputs = ordered_json::array();
  for (const auto& in : report.inputs) {
    inputs.push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
  }
  j["inputs"] = std::move(inputs);
  j["timeline"] = {{"steps", report.steps},
                   {"ingested_requests", report.ingested_requests},
                   {"dropped_requests", report.dropped_requests}};
  ordered_json runs = ordered_json::array();
  for (const auto& r : report.runs) runs.push_back(to_json(r));
  j["runs"] = std::move(runs);
  ordered_json comparisons = ordered_json::array();
  for (const auto& c : report.comparisons) comparisons.push_back(to_json(c));
  j["comparisons"] = std::move(comparisons);
  return j;
}

std::string format_report_json(const SimulationReport& report) {
  return to_json(report).dump(2) + "\n";
}

std::string format_report_csv(const SimulationReport& report) {
  std::string out =
      "policy,start_utc,end_utc,model,count,intensity_g_per_kwh,energy_mj,energy_mj_total,carbon_g\n";
  for (const auto& r : report.runs) {
    for (const auto& e : r.per_interval) {
      out += r.policy + ',' + format_timestamp(e.interval.start) + ',' +
             format_timestamp(e.interval.end) + ',' + e.model + ',' + std::to_string(e.count) +
             ',' + csv::format_real(e.intensity_g_per_kwh) + ',' + csv::format_real(e.energy_mj) +
             ',' + csv::format_real(e.energy_mj_total) + ',' + csv::format_real(e.carbon_g) + '\n';
    }
  }
  return out;
}

}  // namespace carbonsched
