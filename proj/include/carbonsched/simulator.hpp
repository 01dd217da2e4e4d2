#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carbonsched/emissions.hpp"
#include "carbonsched/model_registry.hpp"
#include "carbonsched/selector.hpp"
#include "carbonsched/traces.hpp"

namespace carbonsched {

inline constexpr std::string_view kHeuristicPolicyName = "heuristic";

/// One policy to replay. Fixed policies are named after their model.
struct PolicySpec {
  std::string name;
  std::optional<std::string> fixed_model;

  static PolicySpec heuristic() { return {std::string(kHeuristicPolicyName), std::nullopt}; }
  static PolicySpec fixed(std::string model) { return {model, model}; }
};

struct SimulationConfig {
  std::string pool_label;
  ModelPool pool;
  MappingDirection mapping = MappingDirection::prose;
  BoundsWindow window = BoundsWindow::whole_trace();
  GapPolicy gap_policy = GapPolicy::strict;
  std::vector<PolicySpec> policies;
  /// Policy name the CEE comparisons are taken against.
  std::string baseline;
};

/// Heuristic plus fixed ResNet34/50/101/152 baselines against ResNet50 when
/// the pool has them; otherwise one fixed baseline per pool model, compared
/// against the first.
SimulationConfig default_config(ModelPool pool, std::string pool_label);

struct InputDigest {
  std::string role;
  std::string path;
  std::string sha256;
};

struct SimulationReport {
  SimulationConfig config;
  std::size_t steps = 0;
  std::uint64_t ingested_requests = 0;
  std::uint64_t dropped_requests = 0;
  std::vector<RunSummary> runs;
  /// Every non-baseline run against the baseline, in policy order.
  std::vector<EfficiencyComparison> comparisons;
  std::vector<InputDigest> inputs;

  const RunSummary* find_run(std::string_view policy) const;
};

/// Replays the aligned timeline under every configured policy: one decision
/// per step, made at the step's start with the step's intensity. Throws
/// ConfigError for an invalid policy list and DataError for alignment
/// failures or a timeline without requests.
SimulationReport run(const SimulationConfig& config, const CarbonTrace& carbon,
                     const RequestTrace& requests);

struct SweepOutcome {
  std::optional<SimulationReport> report;
  std::string error;
};

/// Independent runs, one outcome per config in order. A failing config is
/// recorded in its outcome and the sweep continues.
std::vector<SweepOutcome> sweep(std::span<const SimulationConfig> configs,
                                const CarbonTrace& carbon, const RequestTrace& requests);

}  // namespace carbonsched
