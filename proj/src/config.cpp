#include "manip/config.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "manip/errors.hpp"
#include "manip/trace.hpp"

namespace manip {

namespace {

double parse_number(const std::string& text, const std::string& spec) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigError("gain spec '" + spec + "': '" + text + "' is not a number");
  }
  return value;
}

std::vector<double> parse_list(const std::string& body, const std::string& spec) {
  std::vector<double> values;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = body.find(',', start);
    values.push_back(parse_number(body.substr(start, comma - start), spec));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_real(values[i]);
  }
  return out;
}

}  // namespace

GainSpec parse_gain_spec(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) return ConstantGain{parse_number(text, text)};

  const std::string name = text.substr(0, colon);
  const std::vector<double> v = parse_list(text.substr(colon + 1), text);
  auto expect = [&](std::size_t n) {
    if (v.size() != n) {
      throw ConfigError("gain spec '" + text + "': " + name + " takes " + std::to_string(n) + " parameter(s)");
    }
  };
  if (name == "const") {
    expect(1);
    return ConstantGain{v[0]};
  }
  if (name == "deadband") {
    expect(1);
    return DeadbandGain{v[0]};
  }
  if (name == "dist") {
    expect(3);
    return DistanceGain{v[0], v[1], v[2]};
  }
  if (name == "speed") {
    expect(3);
    return SpeedGain{v[0], v[1], v[2]};
  }
  if (name == "schedule") return ScheduledGain{v};
  throw ConfigError("gain spec '" + text + "': unknown law '" + name +
                    "' (expected const, deadband, dist, speed or schedule)");
}

std::string format_gain_spec(const GainSpec& spec) {
  if (const auto* g = std::get_if<ConstantGain>(&spec)) return "const:" + format_real(g->k);
  if (const auto* g = std::get_if<DeadbandGain>(&spec)) return "deadband:" + format_real(g->threshold);
  if (const auto* g = std::get_if<DistanceGain>(&spec)) return "dist:" + join({g->a, g->b, g->c});
  if (const auto* g = std::get_if<SpeedGain>(&spec)) return "speed:" + join({g->a, g->b, g->c});
  return "schedule:" + join(std::get<ScheduledGain>(spec).k);
}

std::string describe(const ChannelGain& gain) {
  return format_gain_spec(gain.law) + (gain.egocentric ? " ego" : " allo");
}

std::string describe(const MappingConfig& config) {
  return to_string(config.kind) + " t=" + describe(config.translation) + " r=" + describe(config.rotation);
}

void validate(const RunConfig& config) {
  validate(config.mapping);
  if (!(config.tol > 0.0) || !std::isfinite(config.tol)) throw ConfigError("tolerance must be finite and > 0");
  if (config.trials < kMinTrials) {
    throw ConfigError("trials must be >= " + std::to_string(kMinTrials) + " (got " + std::to_string(config.trials) +
                      ")");
  }
}

}  // namespace manip
