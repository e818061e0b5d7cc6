#pragma once

// Text reports for classification runs and single-trace checks.
//
//   #! manip-report 1
//   kind: classify
//   mapping: relative
//   gain_t: const:1 ego
//   ...
//   directional_t: always
//     general: 1000 trials, 0 failures
//     condition device orientation equal to its initial orientation: 1000 trials, 0 failures, holds
//   begin counterexample transitive_t
//   mapping: relative
//   gain_t: const:1 ego
//   gain_r: const:1 allo
//   #! manip-trace 1
//   ...
//   end counterexample
//
// Counterexample blocks embed a full trace and can be cut out with
// parse_counterexamples() and replayed.

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "manip/compliance.hpp"

namespace manip {

std::string format_report(const ComplianceReport& report);
std::string format_check(const std::array<TraceCheck, 5>& checks, const MappingConfig& config, double tol,
                         std::size_t samples);

/// Extracts every counterexample block. Throws ParseError.
std::vector<Counterexample> parse_counterexamples(std::string_view report_text);

/// Table cell text: "yes", "no", or "if <condition>[ or <condition>]".
std::string table_cell(const CellReport& cell);

/// One row per report, in the order given.
std::string render_table(std::span<const ComplianceReport> reports);

}  // namespace manip
