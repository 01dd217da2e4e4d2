#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace carbonsched {

/// A servable model variant: energy per inference and its error rate.
/// Error rate stays in percent as measured; nothing here converts it to
/// accuracy.
struct ModelProfile {
  std::string name;
  double energy_mj = 0.0;
  double error_rate_pct = 0.0;

  friend bool operator==(const ModelProfile&, const ModelProfile&) = default;
};

struct EnergyBounds {
  double e_low = 0.0;
  double e_high = 0.0;
};

/// Ordered, non-empty set of uniquely named profiles. Immutable once built;
/// order only matters for tie-breaking in selection.
class ModelPool {
 public:
  /// Throws std::invalid_argument if empty, on duplicate names, or if a
  /// profile violates energy_mj > 0 / 0 <= error_rate_pct <= 100.
  explicit ModelPool(std::vector<ModelProfile> profiles);

  std::span<const ModelProfile> profiles() const { return profiles_; }
  std::size_t size() const { return profiles_.size(); }

  /// nullptr when absent.
  const ModelProfile* find(std::string_view name) const;

  EnergyBounds energy_bounds() const { return bounds_; }

 private:
  std::vector<ModelProfile> profiles_;
  EnergyBounds bounds_;
};

inline EnergyBounds energy_bounds(const ModelPool& pool) { return pool.energy_bounds(); }

/// Parses `name,energy_mj,error_rate_pct` CSV. Rows keep file order. Errors
/// are DataError carrying the offending line number.
ModelPool load_pool(std::string_view csv);
ModelPool load_pool_file(const std::filesystem::path& path);

/// Inverse of load_pool; numbers are written in shortest round-trip form.
std::string to_csv(const ModelPool& pool);

/// The seven measured vision models (V100, Triton).
ModelPool builtin_table1();

/// ResNet34/50/101/152 only.
ModelPool builtin_resnet_only();

/// "full" -> builtin_table1(), "resnet" / "resnet_only" -> builtin_resnet_only().
/// Throws ConfigError for any other name.
ModelPool builtin_pool(std::string_view name);

}  // namespace carbonsched
