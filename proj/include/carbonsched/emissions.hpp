#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carbonsched/model_registry.hpp"
#include "carbonsched/time.hpp"

namespace carbonsched {

/// 1 kWh = 3.6e6 J = 3.6e9 mJ. The only place this constant lives.
inline constexpr double kMillijoulesPerKwh = 3.6e9;

/// grams CO2 for one inference: energy_mj * intensity / kMillijoulesPerKwh.
double grams_per_inference(double energy_mj, double intensity_g_per_kwh);

struct IntervalEmission {
  Interval interval;
  std::string model;
  double intensity_g_per_kwh = 0.0;
  double error_rate_pct = 0.0;
  double energy_mj = 0.0;
  std::uint64_t count = 0;
  double energy_mj_total = 0.0;
  double carbon_g = 0.0;
};

/// carbon_g is count * grams_per_inference rounded once.
IntervalEmission interval_emission(const Interval& interval, std::uint64_t count,
                                   const ModelProfile& model, double intensity_g_per_kwh);

struct ServedCount {
  std::uint64_t count = 0;
  double error_rate_pct = 0.0;
};

/// Request-weighted mean error rate. Throws std::domain_error when the total
/// count is zero.
double blended_error(std::span<const ServedCount> served);

struct RunSummary {
  std::string policy;
  double total_carbon_g = 0.0;
  std::uint64_t total_requests = 0;
  double blended_error_pct = 0.0;
  std::vector<IntervalEmission> per_interval;
};

/// Totals are exact sums rounded once: total_carbon_g is the correctly rounded
/// value of sum(count_i * grams_i), independent of interval order.
RunSummary summarize(std::string policy, std::vector<IntervalEmission> per_interval);

/// Relative error-rate improvement in percent: (baseline - candidate) /
/// baseline * 100. Negative when the candidate is worse. Throws
/// std::domain_error unless baseline_error_pct > 0.
double quality_improvement(double baseline_error_pct, double candidate_error_pct);

struct EfficiencyComparison {
  std::string baseline;
  std::string candidate;
  double quality_improvement_pct = 0.0;
  double delta_carbon_g = 0.0;
  /// quality_improvement_pct / delta_carbon_g; empty when undefined.
  std::optional<double> cee;
  /// Why `cee` is empty, e.g. "equal carbon totals".
  std::string undefined_reason;
};

/// Carbon emission efficiency from raw figures.
EfficiencyComparison compare_efficiency(std::string baseline, double baseline_error_pct,
                                        double baseline_carbon_g, std::string candidate,
                                        double candidate_error_pct, double candidate_carbon_g);

EfficiencyComparison carbon_emission_efficiency(const RunSummary& baseline,
                                                const RunSummary& candidate);

}  // namespace carbonsched
