#include "manip/compliance.hpp"

#include <algorithm>
#include <stdexcept>

#include "manip/config.hpp"
#include "manip/errors.hpp"
#include "manip/random.hpp"


namespace manip {

namespace {

constexpr double kCubeEdge = 0.5;
constexpr double kMaxStepAngle = 0.3;
constexpr int kDirectionalPoses = 12;
constexpr int kTransitivityWaypoints = 5;
constexpr int kExcursionOut = 6;

}  // namespace

StepVerdict step_verdict(const Pose& device_prev, const Pose& device, const Pose& object_prev, const Pose& object,
                         double tol, std::int64_t tick) {
  StepVerdict v;
  v.tick = tick;
  const UnitQuat cancel = inverse(device_prev.q);

  // Translation: collinearity of object motion with screen-space device motion.
  const Vec3 dev_t = rotate_vec(cancel, device.p - device_prev.p);
  const Vec3 obj_t = object.p - object_prev.p;
  const double dev_n = norm(dev_t);
  const double obj_n = norm(obj_t);
  if (dev_n < kDegenerateMotion || obj_n < kDegenerateMotion) {
    v.vacuous_t = true;
  } else {
    v.residual_t = norm(cross(dev_t, obj_t)) / std::max(dev_n * obj_n, kCollinearityFloor);
    v.translation_compliant = v.residual_t <= tol;
    v.alpha = dot(dev_t, obj_t) / (dev_n * dev_n);
  }

  // Rotation: axis equality of object rotation with screen-space device rotation.
  const UnitQuat dev_r = conjugate_rot(cancel, compose(device.q, inverse(device_prev.q)));
  const UnitQuat obj_r = compose(object.q, inverse(object_prev.q));
  const double dev_a = dev_r.angle();
  const double obj_a = obj_r.angle();
  if (dev_a < kDegenerateMotion || obj_a < kDegenerateMotion) {
    v.vacuous_r = true;
  } else {
    const double d = dot(dev_r.axis(), obj_r.axis());
    v.residual_r = std::max(0.0, 1.0 - std::abs(d));
    v.rotation_compliant = v.residual_r <= tol;
    v.beta = (d < 0.0 ? -1.0 : 1.0) * obj_a / dev_a;
  }
  return v;
}

std::vector<StepVerdict> directional_verdicts(std::span<const Pose> device, std::span<const Pose> object, double tol) {
  if (device.size() != object.size()) throw std::invalid_argument("device and object traces differ in length");
  if (device.size() < 2) throw std::invalid_argument("directional check needs at least two poses");
  std::vector<StepVerdict> out;
  out.reserve(device.size() - 1);
  for (std::size_t i = 1; i < device.size(); ++i) {
    out.push_back(step_verdict(device[i - 1], device[i], object[i - 1], object[i], tol, static_cast<std::int64_t>(i)));
  }
  return out;
}

TransitivityResult transitivity_check(const MappingConfig& config, std::span<const Pose> waypoints, double tol,
                                      const Pose& object0, std::span<const double> dt) {
  if (waypoints.size() < 3) throw std::invalid_argument("transitivity check needs at least three waypoints");
  const Pose stepwise = drive(config, waypoints, object0, dt).back();
  const std::array<Pose, 2> direct_path = {waypoints.front(), waypoints.back()};
  std::array<double, 2> direct_dt = {1.0, 1.0};
  if (!dt.empty()) direct_dt = {dt.front(), dt.back()};
  const Pose direct = drive(config, direct_path, object0, direct_dt).back();
  TransitivityResult r;
  r.error_t = norm(stepwise.p - direct.p);
  r.error_r = rotation_distance(stepwise.q, direct.q);
  r.transitive_t = r.error_t <= tol;
  r.transitive_r = r.error_r <= tol;
  return r;
}

NullingResult nulling_check(const MappingConfig& config, std::span<const Pose> excursion, double tol,
                            const Pose& object0, std::span<const double> dt) {
  if (excursion.empty()) throw std::invalid_argument("nulling check needs a non-empty excursion");
  const Pose& first = excursion.front();
  const Pose& last = excursion.back();
  if (norm(last.p - first.p) > kDegenerateMotion || rotation_distance(last.q, first.q) > kDegenerateMotion) {
    throw std::invalid_argument("excursion does not end at its starting device pose");
  }
  const Pose final_object = drive(config, excursion, object0, dt).back();
  NullingResult r;
  r.error_t = norm(final_object.p - object0.p);
  r.error_r = rotation_distance(final_object.q, object0.q);
  r.nulling = r.error_t <= tol && r.error_r <= tol;
  return r;
}

double EquivalenceResult::max_residual() const noexcept {
  return std::max({absolute_vs_relative, absolute_vs_closed_form, relative_vs_closed_form, world_drift});
}

EquivalenceResult k_minus1_equivalence(std::span<const UnitQuat> trajectory, const UnitQuat& qd0) {
  EquivalenceResult r;
  if (trajectory.empty()) return r;
  std::vector<Pose> device;
  device.reserve(trajectory.size());
  for (const auto& q : trajectory) device.push_back({{}, q});

  MappingConfig config;
  config.rotation.law = ConstantGain{-1.0};
  config.kind = MappingKind::absolute;
  const Pose object0{{}, qd0};
  const auto absolute = drive(config, device, object0);
  config.kind = MappingKind::relative;
  const auto relative = drive(config, device, object0);

  const UnitQuat& qc0 = trajectory.front();
  const UnitQuat world = compose(qc0, qd0);
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const UnitQuat closed = compose(compose(inverse(trajectory[i]), qc0), qd0);
    r.absolute_vs_relative = std::max(r.absolute_vs_relative, rotation_distance(absolute[i].q, relative[i].q));
    r.absolute_vs_closed_form = std::max(r.absolute_vs_closed_form, rotation_distance(absolute[i].q, closed));
    r.relative_vs_closed_form = std::max(r.relative_vs_closed_form, rotation_distance(relative[i].q, closed));
    r.world_drift = std::max({r.world_drift, rotation_distance(compose(trajectory[i], absolute[i].q), world),
                              rotation_distance(compose(trajectory[i], relative[i].q), world)});
  }
  return r;
}

// ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::always:
      return "always";
    case Verdict::conditional:
      return "conditional";
    case Verdict::never:
      return "never";
  }
  return "?";
}

std::string to_string(Property p) {
  switch (p) {
    case Property::directional_t:
      return "directional_t";
    case Property::directional_r:
      return "directional_r";
    case Property::transitive_t:
      return "transitive_t";
    case Property::transitive_r:
      return "transitive_r";
    case Property::nulling:
      return "nulling";
  }
  return "?";
}

std::string to_string(Family f) {
  switch (f) {
    case Family::general:
      return "general";
    case Family::fixed_orientation:
      return "fixed_orientation";
    case Family::single_axis_translation:
      return "single_axis_translation";
    case Family::single_axis_rotation:
      return "single_axis_rotation";
    case Family::rotation_only:
      return "rotation_only";
  }
  return "?";
}

std::vector<std::string> CellReport::holding_conditions() const {
  std::vector<std::string> out;
  for (const auto& c : restricted) {
    if (c.holds()) out.push_back(c.condition.label);
  }
  return out;
}

std::vector<Condition> conditions_for(Property property) {
  switch (property) {
    case Property::directional_t:
      return {{Family::fixed_orientation, false, "device orientation equal to its initial orientation"},
              {Family::single_axis_translation, false,
               "translations along a single axis and device orientation equal to its initial orientation"}};
    case Property::directional_r:
      return {{Family::general, true, "rotation gain constant at -1"},
              {Family::single_axis_rotation, false, "device rotates about a single axis"}};
    case Property::transitive_t:
      return {{Family::fixed_orientation, false, "no device rotation"}};
    case Property::transitive_r:
      return {{Family::general, true, "rotation gain constant at -1"}};
    case Property::nulling:
      return {{Family::fixed_orientation, false, "no device rotation"},
              {Family::rotation_only, true, "rotation gain constant at -1 and no device translation"}};
  }
  return {};
}

std::vector<Pose> trial_trajectory(Family family, Property property, std::uint64_t seed) {
  Rng rng(seed);
  const bool excursion = property == Property::nulling;
  int count = kDirectionalPoses;
  if (property == Property::transitive_t || property == Property::transitive_r) count = kTransitivityWaypoints;
  if (excursion) count = kExcursionOut;

  const Vec3 p0 = rng.in_cube(kCubeEdge);
  const UnitQuat q0 = rng.orientation();
  const Vec3 line_dir = rng.unit_vector();
  const Vec3 spin_axis = rng.unit_vector();

  std::vector<Pose> path;
  path.reserve(static_cast<std::size_t>(count) * 2);
  path.push_back({p0, q0});
  double spin = 0.0;
  for (int i = 1; i < count; ++i) {
    const Pose& prev = path.back();
    Pose next = prev;
    switch (family) {
      case Family::general:
        next.p = rng.in_cube(kCubeEdge);
        next.q = compose(rng.small_rotation(kMaxStepAngle), prev.q);
        break;
      case Family::fixed_orientation:
        next.p = rng.in_cube(kCubeEdge);
        break;
      case Family::single_axis_translation:
        next.p = p0 + line_dir * rng.uniform(-0.5 * kCubeEdge, 0.5 * kCubeEdge);
        break;
      case Family::single_axis_rotation:
        next.p = rng.in_cube(kCubeEdge);
        spin += rng.uniform(-kMaxStepAngle, kMaxStepAngle);
        next.q = compose(UnitQuat::from_axis_angle(spin_axis, spin), q0);
        break;
      case Family::rotation_only:
        next.q = compose(rng.small_rotation(kMaxStepAngle), prev.q);
        break;
    }
    path.push_back(next);
  }
  if (excursion) {
    // Out and back along the same waypoints, ending exactly at the start pose.
    for (int i = count - 2; i >= 0; --i) path.push_back(path[static_cast<std::size_t>(i)]);
  }
  return path;
}

bool property_holds(Property property, const MappingConfig& config, std::span<const Pose> device, double tol,
                    std::span<const double> dt) {
  switch (property) {
    case Property::directional_t:
    case Property::directional_r: {
      const auto object = drive(config, device, {}, dt);
      const auto verdicts = directional_verdicts(device, object, tol);
      const bool translation = property == Property::directional_t;
      return std::all_of(verdicts.begin(), verdicts.end(), [&](const StepVerdict& v) {
        return translation ? v.translation_compliant : v.rotation_compliant;
      });
    }
    case Property::transitive_t:
      return transitivity_check(config, device, tol, {}, dt).transitive_t;
    case Property::transitive_r:
      return transitivity_check(config, device, tol, {}, dt).transitive_r;
    case Property::nulling:
      return nulling_check(config, device, tol, {}, dt).nulling;
  }
  return false;
}

bool counterexample_fails(const Counterexample& cx, double tol) {
  const auto device = poses_of(cx.trace);
  const auto dt = intervals_of(cx.trace);
  return !property_holds(cx.property, cx.config, device, tol, dt);
}

namespace {

constexpr std::uint64_t kGeneralStream = 0;
constexpr std::uint64_t kConditionStream = 100;

MappingConfig restrict_config(const MappingConfig& config, const Condition& c) {
  MappingConfig out = config;
  if (c.rotation_gain_minus1) out.rotation = {ConstantGain{-1.0}, false};
  return out;
}

// One trial: a property under either the general family (condition < 0) or
// one restricting condition.
struct Job {
  Property property;
  int condition;
  int trial;
};

struct Plan {
  std::vector<Job> jobs;
  std::array<std::vector<Condition>, kProperties.size()> conditions;
};

Plan make_plan(int n_trials) {
  Plan plan;
  for (Property p : kProperties) {
    auto& conds = plan.conditions[static_cast<std::size_t>(p)];
    conds = conditions_for(p);
    for (int c = -1; c < static_cast<int>(conds.size()); ++c) {
      for (int i = 0; i < n_trials; ++i) plan.jobs.push_back({p, c, i});
    }
  }
  return plan;
}

struct JobInput {
  MappingConfig config;
  std::vector<Pose> device;
};

JobInput job_input(const Plan& plan, const Job& job, const MappingConfig& config, std::uint64_t seed) {
  const auto prop = static_cast<std::uint64_t>(job.property);
  const auto trial = static_cast<std::uint64_t>(job.trial);
  if (job.condition < 0) {
    return {config, trial_trajectory(Family::general, job.property, derive_seed(seed, prop, kGeneralStream, trial))};
  }
  const Condition& c = plan.conditions[static_cast<std::size_t>(job.property)][static_cast<std::size_t>(job.condition)];
  const std::uint64_t stream = kConditionStream + static_cast<std::uint64_t>(job.condition);
  return {restrict_config(config, c), trial_trajectory(c.family, job.property, derive_seed(seed, prop, stream, trial))};
}

bool run_job(const Plan& plan, const Job& job, const MappingConfig& config, std::uint64_t seed, double tol) {
  const JobInput in = job_input(plan, job, config, seed);
  return property_holds(job.property, in.config, in.device, tol);
}

ComplianceReport assemble(const Plan& plan, const std::vector<char>& holds, const MappingConfig& config,
                          std::uint64_t seed, int n_trials, double tol) {
  ComplianceReport report;
  report.config = config;
  report.seed = seed;
  report.trials = n_trials;
  report.tol = tol;
  for (Property p : kProperties) {
    auto& cell = report.cells[static_cast<std::size_t>(p)];
    cell.property = p;
    for (const auto& c : plan.conditions[static_cast<std::size_t>(p)]) cell.restricted.push_back({c, 0, 0});
  }
  for (std::size_t j = 0; j < plan.jobs.size(); ++j) {
    const Job& job = plan.jobs[j];
    auto& cell = report.cells[static_cast<std::size_t>(job.property)];
    const bool ok = holds[j] != 0;
    if (job.condition < 0) {
      ++cell.general_trials;
      if (!ok) {
        ++cell.general_failures;
        if (!cell.counterexample) {
          JobInput in = job_input(plan, job, config, seed);
          cell.counterexample = Counterexample{
              job.property, in.config,
              trace_from_poses(in.device, 1.0,
                               to_string(job.property) + " counterexample, general trial " + std::to_string(job.trial))};
        }
      }
    } else {
      auto& outcome = cell.restricted[static_cast<std::size_t>(job.condition)];
      ++outcome.trials;
      if (!ok) ++outcome.failures;
    }
  }
  for (auto& cell : report.cells) {
    if (cell.general_failures == 0) {
      cell.verdict = Verdict::always;
    } else if (std::any_of(cell.restricted.begin(), cell.restricted.end(),
                           [](const ConditionOutcome& o) { return o.holds(); })) {
      cell.verdict = Verdict::conditional;
    } else {
      cell.verdict = Verdict::never;
    }
  }
  return report;
}

void check_args(const MappingConfig& config, int n_trials, double tol) {
  validate(config);
  if (n_trials < kMinTrials) {
    throw ConfigError("classification needs at least " + std::to_string(kMinTrials) + " trials (got " +
                      std::to_string(n_trials) + ")");
  }
  if (!(tol > 0.0)) throw ConfigError("tolerance must be > 0");
}

}  // namespace

ComplianceReport classify_serial(const MappingConfig& config, std::uint64_t seed, int n_trials, double tol) {
  check_args(config, n_trials, tol);
  const Plan plan = make_plan(n_trials);
  std::vector<char> holds(plan.jobs.size(), 0);
  for (std::size_t j = 0; j < plan.jobs.size(); ++j) holds[j] = run_job(plan, plan.jobs[j], config, seed, tol);
  return assemble(plan, holds, config, seed, n_trials, tol);
}

namespace {

struct Segment {
  std::vector<Pose> poses;
  std::vector<double> dt;
};

std::vector<Segment> engaged_segments(const Trace& trace) {
  std::vector<Segment> out;
  bool open = false;
  for (const auto& s : trace.samples) {
    if (!s.engaged) {
      open = false;
      continue;
    }
    if (!open) out.emplace_back();
    open = true;
    out.back().poses.push_back(s.pose);
    out.back().dt.push_back(s.dt);
  }
  return out;
}

Counterexample segment_counterexample(Property p, const MappingConfig& config, const Segment& seg) {
  Counterexample cx{p, config, {}};
  cx.trace.header.description = to_string(p) + " counterexample from recorded trace";
  for (std::size_t i = 0; i < seg.poses.size(); ++i) {
    cx.trace.samples.push_back({static_cast<std::int64_t>(i), seg.poses[i], seg.dt[i], true});
  }
  return cx;
}

}  // namespace

std::array<TraceCheck, 5> check_trace(const Trace& trace, const MappingConfig& config, double tol) {
  validate(config);
  std::array<TraceCheck, 5> out;
  for (Property p : kProperties) out[static_cast<std::size_t>(p)].property = p;
  const auto segments = engaged_segments(trace);

  for (Property p : {Property::directional_t, Property::directional_r}) {
    auto& c = out[static_cast<std::size_t>(p)];
    c.verdict = "always";
    int steps = 0;
    for (const auto& seg : segments) {
      if (seg.poses.size() < 2) continue;
      steps += static_cast<int>(seg.poses.size()) - 1;
      if (!c.counterexample && !property_holds(p, config, seg.poses, tol, seg.dt)) {
        c.verdict = "never";
        c.counterexample = segment_counterexample(p, config, seg);
      }
    }
    if (steps == 0) {
      c.verdict = "n/a";
      c.note = "no engaged steps";
    } else {
      c.note = std::to_string(steps) + " engaged steps";
    }
  }

  const auto three = std::find_if(segments.begin(), segments.end(), [](const Segment& s) { return s.poses.size() >= 3; });
  for (Property p : {Property::transitive_t, Property::transitive_r}) {
    auto& c = out[static_cast<std::size_t>(p)];
    if (three == segments.end()) {
      c.verdict = "n/a";
      c.note = "no engaged segment with three or more samples";
    } else if (property_holds(p, config, three->poses, tol, three->dt)) {
      c.verdict = "always";
    } else {
      c.verdict = "never";
      c.counterexample = segment_counterexample(p, config, *three);
    }
  }

  auto& nulling = out[static_cast<std::size_t>(Property::nulling)];
  const auto loop = std::find_if(segments.begin(), segments.end(), [](const Segment& s) {
    return s.poses.size() >= 2 && norm(s.poses.back().p - s.poses.front().p) <= kDegenerateMotion &&
           rotation_distance(s.poses.back().q, s.poses.front().q) <= kDegenerateMotion;
  });
  if (loop == segments.end()) {
    nulling.verdict = "n/a";
    nulling.note = "no engaged segment returns to its engage pose";
  } else if (property_holds(Property::nulling, config, loop->poses, tol, loop->dt)) {
    nulling.verdict = "always";
  } else {
    nulling.verdict = "never";
    nulling.counterexample = segment_counterexample(Property::nulling, config, *loop);
  }
  return out;
}

ComplianceReport classify(const MappingConfig& config, std::uint64_t seed, int n_trials, double tol) {
  check_args(config, n_trials, tol);
  const Plan plan = make_plan(n_trials);
  std::vector<char> holds(plan.jobs.size(), 0);
  const auto n = static_cast<std::int64_t>(plan.jobs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t j = 0; j < n; ++j) {
    holds[static_cast<std::size_t>(j)] = run_job(plan, plan.jobs[static_cast<std::size_t>(j)], config, seed, tol);
  }
  return assemble(plan, holds, config, seed, n_trials, tol);
}

}  // namespace manip
