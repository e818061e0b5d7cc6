#pragma once

// Numerical checks of spatial compliance.
//
// Directional compliance at step t holds when the object's translation is
// collinear with the device translation expressed in screen space (cancelling
// qc_{t-1}), and the object's rotation shares the axis of the screen-space
// device rotation. Transitivity compares a stepwise waypoint path with the
// direct path; nulling compliance returns the device to its engage pose and
// expects the object back at its engage pose.
//
// classify() falsifies these properties at scale: for every property it runs
// randomized trials in the general case and under each restricting condition,
// and reports always / conditional / never together with a replayable
// counterexample for anything short of "always".

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "manip/geometry.hpp"
#include "manip/mapping.hpp"
#include "manip/trace.hpp"

namespace manip {

/// Displacements below this (m or rad) are treated as no motion.
inline constexpr double kDegenerateMotion = 1e-12;
/// Floor of the collinearity residual denominator.
inline constexpr double kCollinearityFloor = 1e-15;

struct StepVerdict {
  std::int64_t tick = 0;
  bool translation_compliant = true;
  bool rotation_compliant = true;
  /// Signed scale factors; positive is allocentric, negative egocentric.
  double alpha = 0.0;
  double beta = 0.0;
  double residual_t = 0.0;
  double residual_r = 0.0;
  /// Device or object did not move on this channel; excluded from alpha/beta statistics.
  bool vacuous_t = false;
  bool vacuous_r = false;
};

/// Verdict for the step from (device_prev, object_prev) to (device, object).
StepVerdict step_verdict(const Pose& device_prev, const Pose& device, const Pose& object_prev, const Pose& object,
                         double tol, std::int64_t tick = 0);

/// One verdict per step (size - 1 entries). Throws std::invalid_argument when
/// the traces differ in length or have fewer than two poses.
std::vector<StepVerdict> directional_verdicts(std::span<const Pose> device, std::span<const Pose> object, double tol);

struct TransitivityResult {
  bool transitive_t = true;
  bool transitive_r = true;
  double error_t = 0.0;  // meters
  double error_r = 0.0;  // radians

  bool transitive() const noexcept { return transitive_t && transitive_r; }
};

/// Runs waypoints[0..n] stepwise and waypoints[0] -> waypoints[n] directly
/// through fresh sessions and compares the final object poses.
/// Throws std::invalid_argument for fewer than three waypoints.
/// `dt` as in drive(); the direct path uses the interval of the last waypoint.
TransitivityResult transitivity_check(const MappingConfig& config, std::span<const Pose> waypoints, double tol,
                                      const Pose& object0 = {}, std::span<const double> dt = {});

struct NullingResult {
  bool nulling = true;
  double error_t = 0.0;
  double error_r = 0.0;

  explicit operator bool() const noexcept { return nulling; }
};

/// Throws std::invalid_argument when the excursion does not end where it
/// starts (beyond 1e-12) or is empty.
NullingResult nulling_check(const MappingConfig& config, std::span<const Pose> excursion, double tol,
                            const Pose& object0 = {}, std::span<const double> dt = {});

struct EquivalenceResult {
  double absolute_vs_relative = 0.0;
  double absolute_vs_closed_form = 0.0;
  double relative_vs_closed_form = 0.0;
  /// Max rotation distance of compose(qc_t, qd_t) from its value at t = 0.
  double world_drift = 0.0;

  double max_residual() const noexcept;
};

/// Runs a rotation-only trajectory through absolute and relative mappings
/// with rotation gain -1 and compares both with (qc_t^-1 qc_0) qd_0.
EquivalenceResult k_minus1_equivalence(std::span<const UnitQuat> trajectory, const UnitQuat& qd0 = {});

// ---------------------------------------------------------------------------
// Classifier

enum class Verdict { always, conditional, never };

enum class Property { directional_t, directional_r, transitive_t, transitive_r, nulling };
inline constexpr std::array<Property, 5> kProperties = {Property::directional_t, Property::directional_r,
                                                        Property::transitive_t, Property::transitive_r,
                                                        Property::nulling};

/// Device trajectory families used as trial stimuli.
enum class Family {
  general,                  // random positions and rotations
  fixed_orientation,        // random positions, orientation held at qc0
  single_axis_translation,  // positions on one line through pc0, orientation held
  single_axis_rotation,     // orientation turns about one tracker-frame axis
  rotation_only,            // position held, random rotations
};

/// A restricting condition: a trajectory family, optionally with the rotation
/// gain forced to a constant -1.
struct Condition {
  Family family = Family::general;
  bool rotation_gain_minus1 = false;
  std::string label;
};

struct Counterexample {
  Property property = Property::directional_t;
  MappingConfig config{};
  /// Device trajectory (waypoints or excursion), always engaged, unit dt.
  Trace trace;
};

struct ConditionOutcome {
  Condition condition;
  int trials = 0;
  int failures = 0;

  bool holds() const noexcept { return trials > 0 && failures == 0; }
};

struct CellReport {
  Property property = Property::directional_t;
  Verdict verdict = Verdict::always;
  int general_trials = 0;
  int general_failures = 0;
  std::vector<ConditionOutcome> restricted;
  std::optional<Counterexample> counterexample;

  /// Labels of the restricting conditions that held in every trial.
  std::vector<std::string> holding_conditions() const;
};

struct ComplianceReport {
  MappingConfig config{};
  std::uint64_t seed = 0;
  int trials = 0;
  double tol = 0.0;
  std::array<CellReport, 5> cells{};

  const CellReport& cell(Property p) const { return cells[static_cast<std::size_t>(p)]; }
};

/// Restricting conditions tried for a property. The catalog is the same for
/// every mapping; which conditions hold is what the trials find out.
std::vector<Condition> conditions_for(Property property);

/// Randomized classification. Trials run in parallel (OpenMP) and the result
/// is identical to classify_serial for the same arguments.
/// Throws ConfigError when n_trials < 100 or the config is invalid.
ComplianceReport classify(const MappingConfig& config, std::uint64_t seed, int n_trials, double tol = 1e-9);
ComplianceReport classify_serial(const MappingConfig& config, std::uint64_t seed, int n_trials, double tol = 1e-9);

/// Device trajectory for one trial; deterministic in (family, property, seed).
std::vector<Pose> trial_trajectory(Family family, Property property, std::uint64_t seed);

/// Evaluates `property` on one device trajectory. True when it holds.
bool property_holds(Property property, const MappingConfig& config, std::span<const Pose> device, double tol,
                    std::span<const double> dt = {});

/// Re-runs a stored counterexample; true when the property still fails.
bool counterexample_fails(const Counterexample& cx, double tol);

// ---------------------------------------------------------------------------
// Single-trace check

struct TraceCheck {
  Property property = Property::directional_t;
  /// "always", "never", or "n/a" when the trace cannot exercise the property.
  std::string verdict;
  std::string note;
  std::optional<Counterexample> counterexample;
};

/// Checks the five properties on the engaged segments of one recorded trace.
/// Directional verdicts cover every engaged step; transitivity and nulling use
/// the first engaged segment (nulling only when it ends where it started).
std::array<TraceCheck, 5> check_trace(const Trace& trace, const MappingConfig& config, double tol);

std::string to_string(Verdict v);
std::string to_string(Property p);
std::string to_string(Family f);

}  // namespace manip
