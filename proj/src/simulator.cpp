#include "carbonsched/simulator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "carbonsched/errors.hpp"

namespace carbonsched {

namespace {

constexpr std::string_view kDefaultFixedModels[] = {"ResNet34", "ResNet50", "ResNet101", "ResNet152"};

void validate(const SimulationConfig& config) {
  if (config.policies.empty()) throw ConfigError("empty policy list");
  std::unordered_set<std::string_view> names;
  for (const auto& p : config.policies) {
    if (!names.insert(p.name).second) throw ConfigError("duplicate policy name '" + p.name + "'");
    if (p.fixed_model && config.pool.find(*p.fixed_model) == nullptr) {
      throw ConfigError("fixed policy model '" + *p.fixed_model + "' is not in the pool");
    }
  }
  if (!names.contains(config.baseline)) {
    throw ConfigError("unknown baseline '" + config.baseline + "'");
  }
}

Policy make_policy(const SimulationConfig& config, const PolicySpec& spec) {
  if (spec.fixed_model) return fixed_policy(*spec.fixed_model, config.pool);
  return HeuristicPolicy{config.window, config.mapping};
}

}  // namespace

SimulationConfig default_config(ModelPool pool, std::string pool_label) {
  SimulationConfig c{std::move(pool_label), std::move(pool), MappingDirection::prose,
                     BoundsWindow::whole_trace(), GapPolicy::strict, {}, {}};
  c.policies.push_back(PolicySpec::heuristic());

  bool has_all = true;
  for (auto name : kDefaultFixedModels) has_all = has_all && c.pool.find(name) != nullptr;
  if (has_all) {
    for (auto name : kDefaultFixedModels) c.policies.push_back(PolicySpec::fixed(std::string(name)));
    c.baseline = "ResNet50";
  } else {
    for (const auto& p : c.pool.profiles()) c.policies.push_back(PolicySpec::fixed(p.name));
    c.baseline = c.policies[1].name;
  }
  return c;
}

const RunSummary* SimulationReport::find_run(std::string_view policy) const {
  for (const auto& r : runs) {
    if (r.policy == policy) return &r;
  }
  return nullptr;
}

SimulationReport run(const SimulationConfig& config, const CarbonTrace& carbon,
                     const RequestTrace& requests) {
  validate(config);
  const AlignedTimeline timeline = align(carbon, requests, config.gap_policy);

  SimulationReport report{config, 0, 0, 0, {}, {}, {}};
  report.steps = timeline.steps.size();
  report.ingested_requests = timeline.ingested_requests;
  report.dropped_requests = timeline.dropped_requests;

  for (const auto& spec : config.policies) {
    const Policy policy = make_policy(config, spec);
    std::vector<IntervalEmission> rows;
    rows.reserve(timeline.steps.size());
    for (const auto& step : timeline.steps) {
      const auto decision =
          decide(policy, step.intensity_g_per_kwh, carbon, step.interval.start, config.pool);
      const ModelProfile* model = config.pool.find(decision.model);
      rows.push_back(interval_emission(step.interval, step.count, *model, step.intensity_g_per_kwh));
    }
    try {
      report.runs.push_back(summarize(spec.name, std::move(rows)));
    } catch (const std::domain_error&) {
      throw DataError("aligned timeline carries no requests");
    }
  }

  const RunSummary* baseline = report.find_run(config.baseline);
  for (const auto& r : report.runs) {
    if (r.policy == config.baseline) continue;
    if (baseline->blended_error_pct > 0.0) {
      report.comparisons.push_back(carbon_emission_efficiency(*baseline, r));
    } else {
      EfficiencyComparison c;
      c.baseline = baseline->policy;
      c.candidate = r.policy;
      c.quality_improvement_pct = std::numeric_limits<double>::quiet_NaN();
      c.delta_carbon_g = r.total_carbon_g - baseline->total_carbon_g;
      c.undefined_reason = "zero baseline error";
      report.comparisons.push_back(std::move(c));
    }
  }
  return report;
}

std::vector<SweepOutcome> sweep(std::span<const SimulationConfig> configs,
                                const CarbonTrace& carbon, const RequestTrace& requests) {
  std::vector<SweepOutcome> out;
  out.reserve(configs.size());
  for (const auto& config : configs) {
    try {
      out.push_back({run(config, carbon, requests), {}});
    } catch (const std::exception& e) {
      out.push_back({std::nullopt, e.what()});
    }
  }
  return out;
}

}  // namespace carbonsched
