#pragma once

// Static SVG charts of a recorded trace: one per parameter (base value and
// delta parameter across iterations) and one for alarm counts.

#include "tuner/trace.hpp"

#include <string>
#include <vector>

namespace tuner {

struct chart_file {
  std::string name; ///< file name, e.g. "param-slevel.svg"
  std::string content;
};

/// Deterministic for a given trace; charts follow catalog order with the
/// alarm chart last.
std::vector<chart_file> render_trace_charts(const trace_contents &trace);

} // namespace tuner
