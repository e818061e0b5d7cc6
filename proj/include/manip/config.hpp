#pragma once

#include <cstdint>
#include <string>

#include "manip/mapping.hpp"

namespace manip {

/// Parses a gain spec string:
///   const:K | K            constant gain
///   deadband:T             deadband of radius T (m or rad)
///   dist:A,B,C             A + B * dist^C
///   speed:A,B,C            A + B * (dist / dt)^C
///   schedule:K1,K2,...     per-tick gains, cycled
/// Throws ConfigError.
GainSpec parse_gain_spec(const std::string& text);

/// Inverse of parse_gain_spec (17 significant digits).
std::string format_gain_spec(const GainSpec& spec);

/// Gain spec plus "ego"/"allo" suffix, e.g. "const:1 ego".
std::string describe(const ChannelGain& gain);
std::string describe(const MappingConfig& config);

struct RunConfig {
  MappingConfig mapping = default_config(MappingKind::relative);
  double tol = 1e-9;
  std::uint64_t seed = 42;
  int trials = 1000;
};

inline constexpr int kMinTrials = 100;

/// Throws ConfigError citing the violated constraint.
void validate(const RunConfig& config);

}  // namespace manip
