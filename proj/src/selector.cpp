#include "carbonsched/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carbonsched/errors.hpp"

namespace carbonsched {

MappingDirection parse_mapping(std::string_view text) {
  if (text == "prose") return MappingDirection::prose;
  if (text == "literal") return MappingDirection::literal;
  throw ConfigError("unknown mapping '" + std::string(text) + "' (expected prose|literal)");
}

std::string_view to_string(MappingDirection dir) {
  return dir == MappingDirection::prose ? "prose" : "literal";
}

BoundsWindow BoundsWindow::trailing(std::chrono::hours hours) {
  if (hours.count() <= 0) throw ConfigError("trailing window hours must be positive");
  return {Mode::trailing, hours};
}

std::string to_string(const BoundsWindow& window) {
  if (window.mode == BoundsWindow::Mode::whole_trace) return "whole_trace";
  return "trailing(" + std::to_string(window.hours.count()) + "h)";
}

IntensityBounds observe_bounds(const CarbonTrace& carbon, Timestamp at,
                               const BoundsWindow& window) {
  const auto samples = carbon.samples();
  if (samples.front().interval.start > at) {
    throw DataError("no carbon sample at or before " + format_timestamp(at));
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (window.mode == BoundsWindow::Mode::trailing) {
      if (s.interval.start > at) break;
      if (s.interval.start <= at - window.hours) continue;
    }
    lo = std::min(lo, s.intensity_g_per_kwh);
    hi = std::max(hi, s.intensity_g_per_kwh);
  }
  if (lo > hi) {
    throw DataError("no carbon sample within " + to_string(window) + " of " +
                    format_timestamp(at));
  }
  return {lo, hi};
}

double intensity_fraction(double c_current, IntensityBounds bounds) {
  const double span = bounds.c_high - bounds.c_low;
  if (!(span > 0.0)) return 0.0;
  return std::clamp((c_current - bounds.c_low) / span, 0.0, 1.0);
}

double target_energy(double fraction, EnergyBounds energy, MappingDirection dir) {
  const double span = energy.e_high - energy.e_low;
  const double target = dir == MappingDirection::literal ? energy.e_low + fraction * span
                                                         : energy.e_high - fraction * span;
  return std::clamp(target, energy.e_low, energy.e_high);
}

const ModelProfile& select_model(double e_target, const ModelPool& pool) {
  const ModelProfile* best = nullptr;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& p : pool.profiles()) {
    const double d = std::fabs(p.energy_mj - e_target);
    if (best == nullptr || d < best_distance ||
        (d == best_distance && p.energy_mj < best->energy_mj)) {
      best = &p;
      best_distance = d;
    }
  }
  return *best;
}

SelectionDecision decide(double c_current, const CarbonTrace& history, Timestamp at,
                         const ModelPool& pool, const BoundsWindow& window, MappingDirection dir) {
  SelectionDecision d;
  d.at = at;
  d.c_current = c_current;
  d.bounds = observe_bounds(history, at, window);
  d.fraction = intensity_fraction(c_current, *d.bounds);
  d.e_target = target_energy(d.fraction, pool.energy_bounds(), dir);
  d.model = select_model(d.e_target, pool).name;
  return d;
}

FixedPolicy fixed_policy(std::string_view model_name, const ModelPool& pool) {
  const ModelProfile* p = pool.find(model_name);
  if (p == nullptr) throw ConfigError("model '" + std::string(model_name) + "' is not in the pool");
  return {*p};
}

SelectionDecision decide(const Policy& policy, double c_current, const CarbonTrace& history,
                         Timestamp at, const ModelPool& pool) {
  if (const auto* h = std::get_if<HeuristicPolicy>(&policy)) {
    return decide(c_current, history, at, pool, h->window, h->mapping);
  }
  const auto& fixed = std::get<FixedPolicy>(policy);
  SelectionDecision d;
  d.at = at;
  d.c_current = c_current;
  d.e_target = fixed.model.energy_mj;
  d.model = fixed.model.name;
  return d;
}

}  // namespace carbonsched
