#pragma once

#include <cstdio>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "carbonsched/model_registry.hpp"
#include "carbonsched/selector.hpp"
#include "carbonsched/time.hpp"
#include "json.hpp"

namespace carbonsched {

/// One served selection with everything needed to recompute it.
struct DecisionLogEntry {
  Timestamp decided_at;
  /// Start of the carbon sample the decision was anchored to.
  Timestamp at;
  double c_current = 0.0;
  double fraction = 0.0;
  double e_target = 0.0;
  std::string model;
  MappingDirection mapping = MappingDirection::prose;
  IntensityBounds bounds;
  BoundsWindow window;
  std::string pool;
};

nlohmann::ordered_json to_json(const DecisionLogEntry& entry);
/// Throws DataError on missing or mistyped fields.
DecisionLogEntry decision_entry_from_json(const nlohmann::json& j);

/// Append-only JSON-lines log with a single serialized appender.
class DecisionLog {
 public:
  /// Opens (creating if needed) for append. A torn final line left by a crash
  /// is cut off first; complete lines are never touched. Throws
  /// std::system_error when the file cannot be opened.
  explicit DecisionLog(std::filesystem::path path);
  ~DecisionLog();

  DecisionLog(const DecisionLog&) = delete;
  DecisionLog& operator=(const DecisionLog&) = delete;

  /// Writes one line and flushes before returning. decided_at is raised to
  /// the previous entry's if the clock went backwards, so the log stays
  /// ordered; the stored entry is returned. Throws std::system_error on I/O
  /// failure, in which case nothing counts as logged.
  DecisionLogEntry append(DecisionLogEntry entry);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mu_;
  std::FILE* file_ = nullptr;
  std::optional<Timestamp> last_decided_at_;
};

/// All complete entries in order. An unterminated or unparsable final line is
/// treated as torn and dropped; a bad line anywhere else is a DataError.
std::vector<DecisionLogEntry> replay_log(const std::filesystem::path& path);

/// Recomputes an entry through selector::decide from its own recorded inputs
/// (c_current, bounds, window, mapping) against `pool`.
SelectionDecision replay_decision(const DecisionLogEntry& entry, const ModelPool& pool);

}  // namespace carbonsched
