#pragma once

#include "tuner/paramspace.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tuner {

/// Canonical alarm key; identity is exact string equality.
using alarm_id = std::string;

struct analysis_task {
  std::string program_ref;
  configuration config;
  double timeout = 0.0; ///< wall-clock seconds, > 0
};

struct completed {
  std::vector<alarm_id> alarms; ///< sorted, deduplicated
  double wall_time = 0.0;
  bool operator==(const completed &) const = default;
};

struct timed_out {
  double wall_time = 0.0;
  bool operator==(const timed_out &) const = default;
};

struct crashed {
  std::string exit_info;
  double wall_time = 0.0;
  bool operator==(const crashed &) const = default;
};

using analysis_outcome = std::variant<completed, timed_out, crashed>;

inline bool is_completed(const analysis_outcome &o) {
  return std::holds_alternative<completed>(o);
}
double outcome_wall_time(const analysis_outcome &o);

/// Sorts and deduplicates in place.
void normalize_alarms(std::vector<alarm_id> &alarms);

/// Black-box analyzer: Analyze(prog, p) -> alarms. Implementations must allow
/// concurrent run() calls on distinct tasks.
class analyzer {
public:
  virtual ~analyzer() = default;

  virtual analysis_outcome run(const analysis_task &task) = 0;

  /// True when wall_time values are simulated and run() does not block; the
  /// orchestrator then accounts time arithmetically instead of by the clock.
  virtual bool uses_virtual_clock() const { return false; }

  /// Reason the backend cannot run at all (e.g. executable not found).
  virtual std::optional<std::string> unavailable_reason() const { return std::nullopt; }
};

/// Runs body(0..count-1) on at most `workers` threads; returns when all finish.
/// With one worker the calls happen in order on the calling thread.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)> &body);

} // namespace tuner
