#include "manip/report.hpp"

#include <sstream>

#include "manip/config.hpp"
#include "manip/errors.hpp"

namespace manip {

namespace {

constexpr std::string_view kMagic = "#! manip-report 1";
constexpr std::string_view kBegin = "begin counterexample ";
constexpr std::string_view kEnd = "end counterexample";

void write_counterexample(std::ostringstream& os, const Counterexample& cx) {
  os << kBegin << to_string(cx.property) << '\n';
  os << "mapping: " << to_string(cx.config.kind) << '\n';
  os << "gain_t: " << describe(cx.config.translation) << '\n';
  os << "gain_r: " << describe(cx.config.rotation) << '\n';
  os << serialize_trace(cx.trace);
  os << kEnd << '\n';
}

Property parse_property(std::string_view name, int line) {
  for (Property p : kProperties) {
    if (to_string(p) == name) return p;
  }
  throw ParseError(line, 1, "unknown property '" + std::string(name) + "'");
}

ChannelGain parse_channel(std::string_view text, int line) {
  const auto space = text.rfind(' ');
  if (space == std::string_view::npos) throw ParseError(line, 1, "gain needs a spec and ego|allo");
  const std::string_view frame = text.substr(space + 1);
  if (frame != "ego" && frame != "allo") throw ParseError(line, 1, "expected ego or allo, got '" + std::string(frame) + "'");
  try {
    return {parse_gain_spec(std::string(text.substr(0, space))), frame == "ego"};
  } catch (const ConfigError& e) {
    throw ParseError(line, 1, e.what());
  }
}

std::string_view field(std::string_view line, std::string_view key, int line_no) {
  if (line.substr(0, key.size()) != key || line.substr(key.size(), 2) != ": ") {
    throw ParseError(line_no, 1, "expected '" + std::string(key) + ": '");
  }
  return line.substr(key.size() + 2);
}

}  // namespace

std::string format_report(const ComplianceReport& report) {
  std::ostringstream os;
  os << kMagic << '\n';
  os << "kind: classify\n";
  os << "mapping: " << to_string(report.config.kind) << '\n';
  os << "gain_t: " << describe(report.config.translation) << '\n';
  os << "gain_r: " << describe(report.config.rotation) << '\n';
  os << "seed: " << report.seed << '\n';
  os << "trials: " << report.trials << '\n';
  os << "tol: " << format_real(report.tol) << '\n';
  for (const auto& cell : report.cells) {
    os << to_string(cell.property) << ": " << to_string(cell.verdict) << '\n';
    os << "  general: " << cell.general_trials << " trials, " << cell.general_failures << " failures\n";
    for (const auto& o : cell.restricted) {
      os << "  condition " << o.condition.label << ": " << o.trials << " trials, " << o.failures << " failures"
         << (o.holds() ? ", holds" : "") << '\n';
    }
  }
  for (const auto& cell : report.cells) {
    if (cell.counterexample) write_counterexample(os, *cell.counterexample);
  }
  return os.str();
}

std::string format_check(const std::array<TraceCheck, 5>& checks, const MappingConfig& config, double tol,
                         std::size_t samples) {
  const auto& dt = checks[static_cast<std::size_t>(Property::directional_t)];
  const auto& dr = checks[static_cast<std::size_t>(Property::directional_r)];
  std::string directional = "always";
  if (dt.verdict == "never" || dr.verdict == "never") {
    directional = "never";
  } else if (dt.verdict == "n/a") {
    directional = "n/a";
  }

  std::ostringstream os;
  os << kMagic << '\n';
  os << "kind: check\n";
  os << "mapping: " << to_string(config.kind) << '\n';
  os << "gain_t: " << describe(config.translation) << '\n';
  os << "gain_r: " << describe(config.rotation) << '\n';
  os << "tol: " << format_real(tol) << '\n';
  os << "samples: " << samples << '\n';
  os << "directional: " << directional << '\n';
  for (const auto& c : checks) {
    os << to_string(c.property) << ": " << c.verdict;
    if (!c.note.empty()) os << " (" << c.note << ')';
    os << '\n';
  }
  for (const auto& c : checks) {
    if (c.counterexample) write_counterexample(os, *c.counterexample);
  }
  return os.str();
}

std::vector<Counterexample> parse_counterexamples(std::string_view text) {
  std::vector<Counterexample> out;
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].substr(0, kBegin.size()) != kBegin) continue;
    const int begin_line = static_cast<int>(i) + 1;
    if (i + 3 >= lines.size()) throw ParseError(begin_line, 1, "truncated counterexample block");
    Counterexample cx;
    cx.property = parse_property(lines[i].substr(kBegin.size()), begin_line);
    try {
      cx.config.kind = parse_mapping_kind(std::string(field(lines[i + 1], "mapping", begin_line + 1)));
    } catch (const ConfigError& e) {
      throw ParseError(begin_line + 1, 1, e.what());
    }
    cx.config.translation = parse_channel(field(lines[i + 2], "gain_t", begin_line + 2), begin_line + 2);
    cx.config.rotation = parse_channel(field(lines[i + 3], "gain_r", begin_line + 3), begin_line + 3);
    std::size_t j = i + 4;
    std::string body;
    for (; j < lines.size() && lines[j] != kEnd; ++j) {
      body.append(lines[j]);
      body.push_back('\n');
    }
    if (j == lines.size()) throw ParseError(begin_line, 1, "counterexample block has no end marker");
    try {
      cx.trace = parse_trace(body).trace;
    } catch (const ParseError& e) {
      // Re-anchor the line number to the report.
      throw ParseError(static_cast<int>(i) + 4 + e.line(), e.column(), "in counterexample: " + std::string(e.what()));
    }
    out.push_back(std::move(cx));
    i = j;
  }
  return out;
}

std::string table_cell(const CellReport& cell) {
  switch (cell.verdict) {
    case Verdict::always:
      return "yes";
    case Verdict::never:
      return "no";
    case Verdict::conditional:
      break;
  }
  std::string out = "if ";
  const auto labels = cell.holding_conditions();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += " or ";
    out += labels[i];
  }
  return out;
}

std::string render_table(std::span<const ComplianceReport> reports) {
  std::ostringstream os;
  os << "mapping";
  for (Property p : kProperties) os << " | " << to_string(p);
  os << '\n';
  for (const auto& r : reports) {
    os << to_string(r.config.kind);
    for (Property p : kProperties) os << " | " << table_cell(r.cell(p));
    os << '\n';
  }
  return os.str();
}

}  // namespace manip
