#include <cmath>
#include <type_traits>

#include "manip/errors.hpp"
#include "manip/mapping.hpp"

namespace manip {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

DistanceMode mode_of(Channel channel) {
  return channel == Channel::translation ? DistanceMode::translation : DistanceMode::rotation;
}

bool finite_all(std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void validate_law(const GainSpec& spec, MappingKind kind, const char* channel) {
  const std::string where = std::string(channel) + " gain: ";
  std::visit(overloaded{
                 [&](const ConstantGain& g) {
                   if (!std::isfinite(g.k)) throw ConfigError(where + "constant k must be finite");
                 },
                 [&](const DeadbandGain& g) {
                   if (!std::isfinite(g.threshold) || g.threshold < 0.0)
                     throw ConfigError(where + "deadband threshold must be finite and >= 0");
                 },
                 [&](const DistanceGain& g) {
                   if (!finite_all({g.a, g.b, g.c})) throw ConfigError(where + "distance a, b, c must be finite");
                   if (g.b < 0.0 || g.c <= 0.0) throw ConfigError(where + "distance gain requires b >= 0 and c > 0");
                 },
                 [&](const SpeedGain& g) {
                   if (!finite_all({g.a, g.b, g.c})) throw ConfigError(where + "speed a, b, c must be finite");
                   if (g.b < 0.0 || g.c <= 0.0) throw ConfigError(where + "speed gain requires b >= 0 and c > 0");
                   if (kind != MappingKind::relative)
                     throw ConfigError(where + "speed-based gain is only meaningful for the relative mapping (got " +
                                       to_string(kind) + ")");
                 },
                 [&](const ScheduledGain& g) {
                   if (g.k.empty()) throw ConfigError(where + "schedule must not be empty");
                   for (double k : g.k) {
                     if (!std::isfinite(k)) throw ConfigError(where + "schedule values must be finite");
                   }
                 },
             },
             spec);
}

}  // namespace

void validate(const MappingConfig& config) {
  validate_law(config.translation.law, config.kind, "translation");
  validate_law(config.rotation.law, config.kind, "rotation");
}

double eval_gain(const GainSpec& spec, const Session& session, const TrackerSample& sample, Channel channel) {
  const DistanceMode mode = mode_of(channel);
  return std::visit(overloaded{
                        [](const ConstantGain& g) { return g.k; },
                        [&](const DeadbandGain& g) {
                          const double d = pose_dist(sample.pose, session.device_start(), mode);
                          if (d <= g.threshold) return 0.0;
                          return (d - g.threshold) / d;
                        },
                        [&](const DistanceGain& g) {
                          const double d = pose_dist(sample.pose, session.device_start(), mode);
                          return g.a + g.b * std::pow(d, g.c);
                        },
                        [&](const SpeedGain& g) {
                          const double d = pose_dist(sample.pose, session.device_prev(), mode);
                          return g.a + g.b * std::pow(d / sample.dt, g.c);
                        },
                        [&](const ScheduledGain& g) {
                          const auto n = static_cast<std::int64_t>(g.k.size());
                          const std::int64_t t = session.t() + 1;
                          return g.k[static_cast<std::size_t>((t - 1) % n)];
                        },
                    },
                    spec);
}

}  // namespace manip
