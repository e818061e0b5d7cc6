#pragma once

// Trace file format, synthetic trajectory generators, and replay.
//
// A trace is UTF-8 text, one record per line:
//
//   #! manip-trace 1
//   #! units m rad
//   #! description free text up to end of line
//   # t px py pz qw qx qy qz dt engaged
//   0 0 0 0 1 0 0 0 0.01 1
//
// The first non-blank line must be the "#! manip-trace 1" magic. Other "#!"
// directives are optional; plain "#" lines and blank lines are ignored.
// Records carry the tick (contiguous from 0), position in meters, the
// scalar-first orientation quaternion, the time since the previous sample in
// seconds (> 0), and the engaged flag (0 or 1). Reals are written with 17
// significant digits so that parse(serialize(t)) == t bit-for-bit.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "manip/geometry.hpp"
#include "manip/mapping.hpp"

namespace manip {

inline constexpr int kTraceVersion = 1;

struct TraceHeader {
  int version = kTraceVersion;
  std::string description;

  bool operator==(const TraceHeader&) const = default;
};

struct Trace {
  TraceHeader header;
  std::vector<TrackerSample> samples;
};

bool operator==(const TrackerSample& a, const TrackerSample& b) noexcept;
bool operator==(const Trace& a, const Trace& b) noexcept;

struct ParsedTrace {
  Trace trace;
  std::vector<std::string> warnings;
};

/// Throws ParseError naming line and column.
ParsedTrace parse_trace(std::string_view text);
std::string serialize_trace(const Trace& trace);

ParsedTrace read_trace_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Formats a double with 17 significant digits.
std::string format_real(double value);

/// Builds an always-engaged trace from a pose sequence (ticks 0.., constant dt).
Trace trace_from_poses(std::span<const Pose> poses, double dt = 1.0, std::string description = {});
std::vector<Pose> poses_of(const Trace& trace);
std::vector<double> intervals_of(const Trace& trace);

// ---------------------------------------------------------------------------
// Generators

enum class TrajectoryKind { line, single_axis_rotation, helix, random_walk };

struct TrajectoryParams {
  int steps = 10;
  double dt = 0.01;
  Pose start{};
  /// line: total displacement reached at the last step.
  Vec3 displacement{1.0, 0.0, 0.0};
  /// single_axis_rotation: tracker-frame axis and total angle (rad).
  Vec3 axis{0.0, 0.0, 1.0};
  double total_angle = 1.5707963267948966;
  /// helix about the tracker z axis.
  double radius = 0.1;
  double pitch = 0.05;
  double turns = 1.0;
  /// random_walk: per-step bounds.
  double max_step_t = 0.01;
  double max_step_r = 0.05;
};

/// Deterministic for a fixed seed (only random_walk consumes randomness).
/// Produces steps + 1 samples. Throws std::invalid_argument on bad params.
Trace gen_trajectory(TrajectoryKind kind, const TrajectoryParams& params, std::uint64_t seed);

TrajectoryKind parse_trajectory_kind(const std::string& name);

// ---------------------------------------------------------------------------
// Replay

struct ObjectSample {
  std::int64_t t = 0;
  Pose pose{};
  /// Effective gains of the step; 0 on engage ticks, where nothing is applied.
  double k_t = 0.0;
  double k_r = 0.0;

  bool operator==(const ObjectSample&) const = default;
};

struct TraceMetrics {
  int clutch_count = 0;
  double max_excursion_t = 0.0;
  double max_excursion_r = 0.0;
  double device_path_length = 0.0;
  double object_path_length = 0.0;

  bool operator==(const TraceMetrics&) const = default;
};

struct ReplayResult {
  /// One entry per engaged sample.
  std::vector<ObjectSample> object_trace;
  TraceMetrics metrics;
};

/// Drives a session through the trace, honoring engaged flags. A sample that
/// turns the flag on engages at its pose; one that turns it off disengages.
/// Engine errors propagate as EngineError carrying the tick.
ReplayResult replay(const Trace& trace, const MappingConfig& config, const Pose& initial_object = {});

/// Engages at device[0] and steps through the rest. `dt[i]` is the sample
/// interval of device[i]; an empty span means unit intervals.
/// Returns the object pose at every tick (same length as `device`).
std::vector<Pose> drive(const MappingConfig& config, std::span<const Pose> device, const Pose& initial_object = {},
                        std::span<const double> dt = {});

std::string serialize_object_trace(const ReplayResult& result, const MappingConfig& config);
std::string serialize_metrics(const TraceMetrics& metrics);

}  // namespace manip
