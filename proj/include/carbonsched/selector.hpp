#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "carbonsched/model_registry.hpp"
#include "carbonsched/time.hpp"
#include "carbonsched/traces.hpp"

namespace carbonsched {

struct IntensityBounds {
  double c_low = 0.0;
  double c_high = 0.0;
};

/// How the normalized intensity maps onto the pool's energy range.
///  - literal: target = e_low + f * (e_high - e_low); high intensity picks the
///    most energy-hungry model.
///  - prose:   target = e_high - f * (e_high - e_low); high intensity picks the
///    cheapest model. This is the default.
enum class MappingDirection { literal, prose };

MappingDirection parse_mapping(std::string_view text);
std::string_view to_string(MappingDirection dir);

/// Which carbon samples define C_low / C_high for a decision at time `at`.
///  - whole_trace: every sample of the history (global bounds).
///  - trailing:    samples whose start lies in (at - hours, at].
struct BoundsWindow {
  enum class Mode { whole_trace, trailing };

  Mode mode = Mode::whole_trace;
  std::chrono::hours hours{0};

  static BoundsWindow whole_trace() { return {}; }
  /// Throws ConfigError unless hours > 0.
  static BoundsWindow trailing(std::chrono::hours hours);

  friend bool operator==(const BoundsWindow&, const BoundsWindow&) = default;
};

/// "whole_trace" or "trailing(<h>h)".
std::string to_string(const BoundsWindow& window);

struct SelectionDecision {
  Timestamp at;
  double c_current = 0.0;
  /// Absent for fixed policies, which look at no history.
  std::optional<IntensityBounds> bounds;
  double fraction = 0.0;
  double e_target = 0.0;
  std::string model;
};

/// Throws DataError when no sample starts at or before `at` (or, for a
/// trailing window, none starts inside it).
IntensityBounds observe_bounds(const CarbonTrace& carbon, Timestamp at, const BoundsWindow& window);

/// (c - c_low) / (c_high - c_low) clamped to [0, 1]; 0 for flat bounds.
double intensity_fraction(double c_current, IntensityBounds bounds);

double target_energy(double fraction, EnergyBounds energy, MappingDirection dir);

/// Profile whose energy is nearest `e_target`. Ties go to the lower-energy
/// profile, then to the earlier one in pool order.
const ModelProfile& select_model(double e_target, const ModelPool& pool);

SelectionDecision decide(double c_current, const CarbonTrace& history, Timestamp at,
                         const ModelPool& pool, const BoundsWindow& window, MappingDirection dir);

struct HeuristicPolicy {
  BoundsWindow window;
  MappingDirection mapping = MappingDirection::prose;
};

struct FixedPolicy {
  ModelProfile model;
};

using Policy = std::variant<HeuristicPolicy, FixedPolicy>;

/// Throws ConfigError when `model_name` is not in the pool.
FixedPolicy fixed_policy(std::string_view model_name, const ModelPool& pool);

SelectionDecision decide(const Policy& policy, double c_current, const CarbonTrace& history,
                         Timestamp at, const ModelPool& pool);

}  // namespace carbonsched
