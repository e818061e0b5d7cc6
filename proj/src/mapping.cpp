#include "manip/mapping.hpp"

#include <string>

#include "manip/errors.hpp"

namespace manip {

MappingConfig default_config(MappingKind kind) {
  MappingConfig config;
  config.kind = kind;
  config.translation.egocentric = true;
  config.rotation.egocentric = false;
  return config;
}

std::string to_string(MappingKind kind) {
  switch (kind) {
    case MappingKind::absolute:
      return "absolute";
    case MappingKind::relative:
      return "relative";
    case MappingKind::rate:
      return "rate";
  }
  return "unknown";
}

MappingKind parse_mapping_kind(const std::string& name) {
  if (name == "absolute") return MappingKind::absolute;
  if (name == "relative") return MappingKind::relative;
  if (name == "rate") return MappingKind::rate;
  throw ConfigError("unknown mapping '" + name + "' (expected absolute, relative or rate)");
}

Displacement to_screen_space(const Vec3& dv, const UnitQuat& dq, const UnitQuat& q_ref) noexcept {
  const UnitQuat cancel = inverse(q_ref);
  return {rotate_vec(cancel, dv), conjugate_rot(cancel, dq)};
}

Displacement apply_gain(double k, const Displacement& d) noexcept { return apply_gain(k, k, d); }

Displacement apply_gain(double k_t, double k_r, const Displacement& d) noexcept {
  return {d.dv * k_t, quat_pow(d.dq, k_r)};
}

Session Session::engage(const MappingConfig& config, const Pose& device, const Pose& object, std::int64_t tick) {
  validate(config);
  if (!is_finite(device.p) || !is_finite(object.p)) throw EngineError("engage: non-finite pose");
  Session s;
  s.config_ = config;
  s.object_ = object;
  s.start(device, tick);
  return s;
}

void Session::start(const Pose& device, std::int64_t tick) {
  pc0_ = device.p;
  qc0_ = device.q;
  pd0_ = object_.p;
  qd0_ = object_.q;
  prev_pc_ = pc0_;
  prev_qc_ = qc0_;
  t_ = 0;
  tick_ = tick;
  engaged_ = true;
}

void Session::disengage() {
  if (!engaged_) throw EngineError("disengage: session is not engaged");
  engaged_ = false;
}

void Session::reengage(const Pose& device, std::int64_t tick) {
  if (engaged_) throw EngineError("engage: session is already engaged");
  if (!is_finite(device.p)) throw EngineError("engage: non-finite device pose");
  start(device, tick);
}

void Session::reconfigure(const MappingConfig& config) {
  if (engaged_) throw EngineError("reconfigure: disengage first");
  validate(config);
  config_ = config;
}

StepResult Session::step(const TrackerSample& sample) {
  if (!engaged_) throw EngineError("tick " + std::to_string(sample.t) + ": session is not engaged");
  if (sample.t != tick_ + 1) {
    throw EngineError("tick " + std::to_string(sample.t) + ": expected tick " + std::to_string(tick_ + 1));
  }
  if (!is_finite(sample.pose.p)) throw EngineError("tick " + std::to_string(sample.t) + ": non-finite position");
  if (!(sample.dt > 0.0) || !std::isfinite(sample.dt)) {
    throw EngineError("tick " + std::to_string(sample.t) + ": dt must be finite and > 0");
  }

  const bool from_start = config_.kind != MappingKind::relative;
  const Vec3& ref_p = from_start ? pc0_ : prev_pc_;
  const UnitQuat& ref_q = from_start ? qc0_ : prev_qc_;
  const Vec3 dv = sample.pose.p - ref_p;
  const UnitQuat dq = compose(sample.pose.q, inverse(ref_q));
  return advance(to_screen_space(dv, dq, ref_q), sample);
}

StepResult Session::step_relative_incremental(const Vec3& dv_device, const UnitQuat& dq_device, double dt) {
  if (config_.kind != MappingKind::relative) {
    throw EngineError("incremental step requires the relative mapping (session is " + to_string(config_.kind) + ")");
  }
  if (!engaged_) throw EngineError("tick " + std::to_string(tick_ + 1) + ": session is not engaged");
  if (!is_finite(dv_device)) throw EngineError("tick " + std::to_string(tick_ + 1) + ": non-finite increment");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw EngineError("tick " + std::to_string(tick_ + 1) + ": dt must be finite and > 0");
  }
  // Dead-reckoned device pose, used only by the gain laws and as next reference.
  TrackerSample sample;
  sample.t = tick_ + 1;
  sample.dt = dt;
  sample.pose = {prev_pc_ + rotate_vec(prev_qc_, dv_device), compose(prev_qc_, dq_device)};
  return advance({dv_device, dq_device}, sample);
}

StepResult Session::advance(const Displacement& screen, const TrackerSample& sample) {
  StepResult result;
  result.k_t = config_.translation.sign() * eval_gain(config_.translation.law, *this, sample, Channel::translation);
  result.k_r = config_.rotation.sign() * eval_gain(config_.rotation.law, *this, sample, Channel::rotation);
  if (!std::isfinite(result.k_t) || !std::isfinite(result.k_r)) {
    throw EngineError("tick " + std::to_string(sample.t) + ": gain evaluated to a non-finite value");
  }
  const Displacement scaled = apply_gain(result.k_t, result.k_r, screen);

  if (config_.kind == MappingKind::absolute) {
    object_ = {scaled.dv + pd0_, compose(scaled.dq, qd0_)};
  } else {
    object_ = {scaled.dv + object_.p, compose(scaled.dq, object_.q)};
  }
  if (!is_finite(object_.p)) throw EngineError("tick " + std::to_string(sample.t) + ": object pose became non-finite");

  prev_pc_ = sample.pose.p;
  prev_qc_ = sample.pose.q;
  tick_ = sample.t;
  ++t_;
  result.object = object_;
  return result;
}

}  // namespace manip
