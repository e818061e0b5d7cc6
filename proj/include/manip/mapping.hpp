#pragma once

// Device-to-object manipulation mappings.
//
// Three mappings are provided. All convert device motion to screen space by
// cancelling a reference device orientation (q^-1 v q), scale it by a
// per-channel gain factor, and apply it to the object:
//
//   absolute  displacement from the engage pose, applied to the engage object pose
//   relative  per-tick displacement, applied to the current object pose
//   rate      displacement from the engage pose, added to the current object
//             pose every tick (velocity, one unit of time per tick)
//
// Translations are scaled as vectors (k v); rotations through quat_pow (q^k).

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "manip/geometry.hpp"

namespace manip {

enum class MappingKind { absolute, relative, rate };

enum class Channel { translation, rotation };

struct ConstantGain {
  double k = 1.0;
};

/// Zero inside `threshold` of the engage pose, (d - threshold) / d outside.
struct DeadbandGain {
  double threshold = 0.0;
};

/// a + b * dist(t, 0)^c
struct DistanceGain {
  double a = 1.0, b = 0.0, c = 1.0;
};

/// a + b * (dist(t, t-1) / dt)^c; relative mapping only.
struct SpeedGain {
  double a = 1.0, b = 0.0, c = 1.0;
};

/// Explicit time-varying gain: k_t = k[(t - 1) mod size] for t >= 1.
struct ScheduledGain {
  std::vector<double> k;
};

using GainSpec = std::variant<ConstantGain, DeadbandGain, DistanceGain, SpeedGain, ScheduledGain>;

/// Gain law for one channel plus the allocentric/egocentric sign.
struct ChannelGain {
  GainSpec law = ConstantGain{};
  bool egocentric = false;

  double sign() const noexcept { return egocentric ? -1.0 : 1.0; }
};

struct MappingConfig {
  MappingKind kind = MappingKind::relative;
  ChannelGain translation{};
  ChannelGain rotation{};
};

/// Egocentric translations and allocentric rotations, unit gain.
MappingConfig default_config(MappingKind kind);

/// Throws ConfigError on invalid parameters or a speed gain on a non-relative mapping.
void validate(const MappingConfig& config);

struct TrackerSample {
  std::int64_t t = 0;
  Pose pose{};
  double dt = 1.0;
  bool engaged = true;
};

struct Displacement {
  Vec3 dv{};
  UnitQuat dq{};
};

struct StepResult {
  Pose object{};
  double k_t = 0.0;
  double k_r = 0.0;
};

/// Converts a device displacement measured in tracker space into screen
/// space by cancelling the reference orientation: v' = q^-1 v q, r' = q^-1 r q.
Displacement to_screen_space(const Vec3& dv, const UnitQuat& dq, const UnitQuat& q_ref) noexcept;

/// Scales dv by k and raises dq to the power k.
Displacement apply_gain(double k, const Displacement& d) noexcept;
Displacement apply_gain(double k_t, double k_r, const Displacement& d) noexcept;

class Session;

/// Raw gain-law value for `channel` at `sample` (before the egocentric sign).
double eval_gain(const GainSpec& spec, const Session& session, const TrackerSample& sample, Channel channel);

/// Per-manipulation state. Single owner; not synchronized.
class Session {
 public:
  /// Starts a manipulation at tick `tick`: snapshots device and object poses.
  static Session engage(const MappingConfig& config, const Pose& device, const Pose& object, std::int64_t tick = 0);

  /// Stops driving the object. Throws EngineError when already disengaged.
  void disengage();

  /// Engages again from the current object pose with a new device reference.
  void reengage(const Pose& device, std::int64_t tick);

  /// Replaces mapping and gains. Only valid while disengaged.
  void reconfigure(const MappingConfig& config);

  /// Advances one tick. Requires engaged and sample.t == tick() + 1.
  StepResult step(const TrackerSample& sample);

  /// Relative mapping fed by a sensor that already reports increments in the
  /// device frame: skips the screen-space conversion, still applies gain.
  StepResult step_relative_incremental(const Vec3& dv_device, const UnitQuat& dq_device, double dt);

  const MappingConfig& config() const noexcept { return config_; }
  MappingKind kind() const noexcept { return config_.kind; }
  bool engaged() const noexcept { return engaged_; }
  /// Ticks since engage.
  std::int64_t t() const noexcept { return t_; }
  /// Last absolute tick seen.
  std::int64_t tick() const noexcept { return tick_; }

  const Vec3& pc0() const noexcept { return pc0_; }
  const UnitQuat& qc0() const noexcept { return qc0_; }
  const Vec3& pd0() const noexcept { return pd0_; }
  const UnitQuat& qd0() const noexcept { return qd0_; }
  const Vec3& prev_pc() const noexcept { return prev_pc_; }
  const UnitQuat& prev_qc() const noexcept { return prev_qc_; }
  Pose device_start() const noexcept { return {pc0_, qc0_}; }
  Pose device_prev() const noexcept { return {prev_pc_, prev_qc_}; }
  const Pose& object() const noexcept { return object_; }

 private:
  Session() = default;

  void start(const Pose& device, std::int64_t tick);
  StepResult advance(const Displacement& screen, const TrackerSample& sample);

  MappingConfig config_{};
  Vec3 pc0_{};
  UnitQuat qc0_{};
  Vec3 pd0_{};
  UnitQuat qd0_{};
  Vec3 prev_pc_{};
  UnitQuat prev_qc_{};
  Pose object_{};
  std::int64_t t_ = 0;
  std::int64_t tick_ = 0;
  bool engaged_ = false;
};

std::string to_string(MappingKind kind);
/// Accepts "absolute", "relative", "rate". Throws ConfigError otherwise.
MappingKind parse_mapping_kind(const std::string& name);

}  // namespace manip
