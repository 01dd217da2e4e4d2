#include "carbonsched/emissions.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "carbonsched/exact_sum.hpp"

namespace carbonsched {

double grams_per_inference(double energy_mj, double intensity_g_per_kwh) {
  return energy_mj * intensity_g_per_kwh / kMillijoulesPerKwh;
}

IntervalEmission interval_emission(const Interval& interval, std::uint64_t count,
                                   const ModelProfile& model, double intensity_g_per_kwh) {
  const auto n = static_cast<double>(count);
  IntervalEmission e;
  e.interval = interval;
  e.model = model.name;
  e.intensity_g_per_kwh = intensity_g_per_kwh;
  e.error_rate_pct = model.error_rate_pct;
  e.energy_mj = model.energy_mj;
  e.count = count;
  e.energy_mj_total = n * model.energy_mj;
  e.carbon_g = n * grams_per_inference(model.energy_mj, intensity_g_per_kwh);
  return e;
}

double blended_error(std::span<const ServedCount> served) {
  ExactSum weighted;
  std::uint64_t total = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : served) {
    if (s.count == 0) continue;
    weighted.add_product(static_cast<double>(s.count), s.error_rate_pct);
    total += s.count;
    lo = std::min(lo, s.error_rate_pct);
    hi = std::max(hi, s.error_rate_pct);
  }
  if (total == 0) throw std::domain_error("blended error undefined for zero requests");
  // The exact mean lies in [lo, hi]; the clamp only absorbs division rounding.
  return std::clamp(weighted.value() / static_cast<double>(total), lo, hi);
}

RunSummary summarize(std::string policy, std::vector<IntervalEmission> per_interval) {
  RunSummary r;
  r.policy = std::move(policy);
  ExactSum carbon;
  std::vector<ServedCount> served;
  served.reserve(per_interval.size());
  for (const auto& e : per_interval) {
    carbon.add_product(static_cast<double>(e.count),
                       grams_per_inference(e.energy_mj, e.intensity_g_per_kwh));
    r.total_requests += e.count;
    served.push_back({e.count, e.error_rate_pct});
  }
  r.total_carbon_g = carbon.value();
  r.blended_error_pct = blended_error(served);
  r.per_interval = std::move(per_interval);
  return r;
}

double quality_improvement(double baseline_error_pct, double candidate_error_pct) {
  if (!(baseline_error_pct > 0.0)) {
    throw std::domain_error("quality improvement undefined for zero baseline error");
  }
  return (baseline_error_pct - candidate_error_pct) / baseline_error_pct * 100.0;
}

EfficiencyComparison compare_efficiency(std::string baseline, double baseline_error_pct,
                                        double baseline_carbon_g, std::string candidate,
                                        double candidate_error_pct, double candidate_carbon_g) {
  EfficiencyComparison c;
  c.baseline = std::move(baseline);
  c.candidate = std::move(candidate);
  c.quality_improvement_pct = quality_improvement(baseline_error_pct, candidate_error_pct);
  c.delta_carbon_g = candidate_carbon_g - baseline_carbon_g;
  if (c.delta_carbon_g != 0.0) {
    c.cee = c.quality_improvement_pct / c.delta_carbon_g;
  } else {
    c.undefined_reason = "equal carbon totals";
  }
  return c;
}

EfficiencyComparison carbon_emission_efficiency(const RunSummary& baseline,
                                                const RunSummary& candidate) {
  return compare_efficiency(baseline.policy, baseline.blended_error_pct, baseline.total_carbon_g,
                            candidate.policy, candidate.blended_error_pct,
                            candidate.total_carbon_g);
}

}  // namespace carbonsched
