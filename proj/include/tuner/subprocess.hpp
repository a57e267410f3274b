#pragma once

#include "tuner/analyzer.hpp"

#include <string>
#include <vector>

namespace tuner {

/// How to launch a real analyzer and read alarms from its output.
struct adapter_config {
  /// Run by /bin/sh -c after substituting {program} and {args}, both
  /// shell-quoted.
  std::string command_template;
  /// ECMAScript regex applied to each output line (stdout and stderr merged).
  /// Each capture group becomes one field of the alarm id.
  std::string alarm_pattern;
  std::string join = ":";
  /// 1-based capture indices replaced by a 16-hex-digit FNV-1a hash.
  std::vector<std::size_t> hash_captures;
  /// When non-empty, the child sees only these variables (plus PATH).
  std::vector<std::string> env_passthrough;
  /// Extra wall time allowed for process teardown after the deadline.
  double grace = 2.0;
};

struct extraction_result {
  std::vector<alarm_id> alarms;
  std::size_t anomalies = 0; ///< matching lines with an empty capture
};

extraction_result extract_alarms(const std::string &output, const adapter_config &cfg);

std::string shell_quote(const std::string &s);
std::string fnv1a_hex(std::string_view s);

/// Launches the command for `task`, enforcing the deadline by killing the
/// whole process group.
analysis_outcome run_subprocess(const analysis_task &task, const catalog &cat,
                                const adapter_config &cfg);

class subprocess_analyzer final : public analyzer {
public:
  subprocess_analyzer(catalog cat, adapter_config cfg);

  analysis_outcome run(const analysis_task &task) override;
  std::optional<std::string> unavailable_reason() const override;

private:
  catalog cat_;
  adapter_config cfg_;
};

} // namespace tuner
