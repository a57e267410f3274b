#pragma once

/*
   On-disk formats: the per-iteration trace, the final result and the
   dominancy report.

   A trace is newline-delimited JSON, one self-describing record per
   iteration:
     {"schema": "strategy-tuner/trace", "version": 1, "index": 0,
      "parameters": [["slevel", "int"], ...], "sampled_configs": [{...}],
      "outcomes": [{"status": "completed", "alarms": [...], "wall_time": 1.5}],
      ...}
   Lattice values are stored as literals in the "name = value" grammar and
   deltas in their text form, so a record decodes back to an equal
   iteration_record.
*/

#include "tuner/dominancy.hpp"
#include "tuner/orchestrator.hpp"

#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tuner {

inline constexpr std::string_view trace_schema = "strategy-tuner/trace";
inline constexpr int trace_version = 1;

class trace_error : public std::runtime_error {
public:
  /// `record` is the 0-based position of the offending line.
  trace_error(std::size_t record, const std::string &message);
  std::size_t record() const { return record_; }

private:
  std::size_t record_;
};

/// One line of JSON without the trailing newline.
std::string encode_trace_record(const iteration_record &rec, const catalog &cat);

/// Throws std::invalid_argument (or a JSON or literal error) on malformed input.
iteration_record decode_trace_record(std::string_view line, const catalog &cat);

/// A catalog with the names and kinds listed in a record's "parameters"
/// field and placeholder rendering rules. Enough to decode records.
catalog catalog_from_trace_record(std::string_view line);

/// Appends records to a file, flushing after each one.
class trace_writer {
public:
  explicit trace_writer(const std::string &path);
  void append(const iteration_record &rec, const catalog &cat);

private:
  std::ofstream out_;
};

struct trace_contents {
  catalog cat;
  std::vector<iteration_record> records;
};

/// Throws trace_error naming the first bad record, including for an empty
/// trace (record 0).
trace_contents read_trace(const std::string &path);

std::string encode_result(const tune_result &result, const catalog &cat,
                          const tuner_settings &settings);

std::string format_summary(const tune_result &result, const tuner_settings &settings);

std::string encode_dominancy_report(const dominancy_report &report);

} // namespace tuner
