#include "manip/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "manip/config.hpp"
#include "manip/errors.hpp"
#include "manip/random.hpp"

namespace manip {

namespace {

constexpr std::string_view kMagic = "#! manip-trace";
constexpr double kSilentRenormalize = 1e-9;
constexpr double kMaxRenormalize = 1e-6;

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> split_fields(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

double parse_real(const Token& tok, std::size_t line_no, const char* field) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
  if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
    throw ParseError(line_no, tok.column, std::string("field ") + field + ": '" + std::string(tok.text) +
                                              "' is not a real number");
  }
  if (!std::isfinite(value)) throw ParseError(line_no, tok.column, std::string("field ") + field + " is not finite");
  return value;
}

std::int64_t parse_int(const Token& tok, std::size_t line_no, const char* field) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
  if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
    throw ParseError(line_no, tok.column, std::string("field ") + field + ": '" + std::string(tok.text) +
                                              "' is not an integer");
  }
  return value;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }

}  // namespace

bool operator==(const TrackerSample& a, const TrackerSample& b) noexcept {
  return a.t == b.t && a.pose == b.pose && a.dt == b.dt && a.engaged == b.engaged;
}

bool operator==(const Trace& a, const Trace& b) noexcept { return a.header == b.header && a.samples == b.samples; }

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ParsedTrace parse_trace(std::string_view text) {
  ParsedTrace result;
  bool have_magic = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (is_blank(line)) continue;

    if (!have_magic) {
      const auto fields = split_fields(line);
      if (fields.size() != 3 || fields[0].text != "#!" || fields[1].text != "manip-trace") {
        throw ParseError(line_no, 1, "expected '#! manip-trace 1' header");
      }
      const std::int64_t version = parse_int(fields[2], line_no, "version");
      if (version != kTraceVersion) {
        throw ParseError(line_no, fields[2].column, "unsupported trace version " + std::to_string(version));
      }
      result.trace.header.version = static_cast<int>(version);
      have_magic = true;
      continue;
    }

    if (line.starts_with("#!")) {
      const auto fields = split_fields(line);
      if (fields.size() >= 2 && fields[1].text == "units") {
        if (fields.size() != 4 || fields[2].text != "m" || fields[3].text != "rad") {
          throw ParseError(line_no, fields[1].column, "units must be 'm rad'");
        }
      } else if (fields.size() >= 2 && fields[1].text == "description") {
        constexpr std::string_view key = "description";
        const std::size_t at = line.find(key) + key.size();
        result.trace.header.description = at < line.size() ? std::string(line.substr(at + 1)) : std::string{};
      } else {
        throw ParseError(line_no, 1, "unknown directive '" + std::string(line) + "'");
      }
      continue;
    }
    if (line.front() == '#') continue;

    const auto f = split_fields(line);
    if (f.size() != 10) {
      throw ParseError(line_no, f.empty() ? 1 : f.back().column,
                       "expected 10 fields (t px py pz qw qx qy qz dt engaged), got " + std::to_string(f.size()));
    }
    TrackerSample s;
    s.t = parse_int(f[0], line_no, "t");
    const auto expected = static_cast<std::int64_t>(result.trace.samples.size());
    if (s.t != expected) {
      throw ParseError(line_no, f[0].column,
                       "tick " + std::to_string(s.t) + " breaks contiguity (expected " + std::to_string(expected) + ")");
    }
    s.pose.p = {parse_real(f[1], line_no, "px"), parse_real(f[2], line_no, "py"), parse_real(f[3], line_no, "pz")};
    const double qw = parse_real(f[4], line_no, "qw");
    const double qx = parse_real(f[5], line_no, "qx");
    const double qy = parse_real(f[6], line_no, "qy");
    const double qz = parse_real(f[7], line_no, "qz");
    const double qn = std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz);
    const double off = std::abs(qn - 1.0);
    if (off > kMaxRenormalize) {
      throw ParseError(line_no, f[4].column, "quaternion norm " + format_real(qn) + " is not unit (tolerance 1e-6)");
    }
    if (off > kSilentRenormalize) {
      result.warnings.push_back("line " + std::to_string(line_no) + ": quaternion norm " + format_real(qn) +
                                " renormalized");
    }
    s.pose.q = UnitQuat::from_components(qw, qx, qy, qz);
    s.dt = parse_real(f[8], line_no, "dt");
    if (!(s.dt > 0.0)) throw ParseError(line_no, f[8].column, "dt must be > 0");
    if (f[9].text == "1") {
      s.engaged = true;
    } else if (f[9].text == "0") {
      s.engaged = false;
    } else {
      throw ParseError(line_no, f[9].column, "engaged must be 0 or 1");
    }
    result.trace.samples.push_back(s);
  }
  if (!have_magic) throw ParseError(line_no == 0 ? 1 : line_no, 1, "missing '#! manip-trace 1' header");
  return result;
}

std::string serialize_trace(const Trace& trace) {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(trace.header.version) + "\n";
  out += "#! units m rad\n";
  if (!trace.header.description.empty()) out += "#! description " + trace.header.description + "\n";
  out += "# t px py pz qw qx qy qz dt engaged\n";
  for (const auto& s : trace.samples) {
    out += std::to_string(s.t);
    for (double v : {s.pose.p.x, s.pose.p.y, s.pose.p.z, s.pose.q.w(), s.pose.q.x(), s.pose.q.y(), s.pose.q.z(), s.dt}) {
      out += ' ';
      out += format_real(v);
    }
    out += s.engaged ? " 1\n" : " 0\n";
  }
  return out;
}

ParsedTrace read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, 0, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

Trace trace_from_poses(std::span<const Pose> poses, double dt, std::string description) {
  Trace trace;
  trace.header.description = std::move(description);
  trace.samples.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    trace.samples.push_back({static_cast<std::int64_t>(i), poses[i], dt, true});
  }
  return trace;
}

std::vector<Pose> poses_of(const Trace& trace) {
  std::vector<Pose> out;
  out.reserve(trace.samples.size());
  for (const auto& s : trace.samples) out.push_back(s.pose);
  return out;
}

std::vector<double> intervals_of(const Trace& trace) {
  std::vector<double> out;
  out.reserve(trace.samples.size());
  for (const auto& s : trace.samples) out.push_back(s.dt);
  return out;
}

TrajectoryKind parse_trajectory_kind(const std::string& name) {
  if (name == "line") return TrajectoryKind::line;
  if (name == "single_axis_rotation" || name == "rotation") return TrajectoryKind::single_axis_rotation;
  if (name == "helix") return TrajectoryKind::helix;
  if (name == "random_walk") return TrajectoryKind::random_walk;
  throw std::invalid_argument("unknown trajectory kind '" + name +
                              "' (expected line, single_axis_rotation, helix or random_walk)");
}

Trace gen_trajectory(TrajectoryKind kind, const TrajectoryParams& params, std::uint64_t seed) {
  if (params.steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (!(params.dt > 0.0) || !std::isfinite(params.dt)) throw std::invalid_argument("dt must be finite and > 0");
  if (!is_finite(params.start.p)) throw std::invalid_argument("start position must be finite");

  std::vector<Pose> poses;
  poses.reserve(static_cast<std::size_t>(params.steps) + 1);
  const double n = params.steps;
  std::string description;

  switch (kind) {
    case TrajectoryKind::line: {
      if (!is_finite(params.displacement)) throw std::invalid_argument("line displacement must be finite");
      if (params.steps == 0) throw std::invalid_argument("line needs at least one step");
      for (int i = 0; i <= params.steps; ++i) {
        poses.push_back({params.start.p + params.displacement * (i / n), params.start.q});
      }
      description = "line";
      break;
    }
    case TrajectoryKind::single_axis_rotation: {
      if (norm(params.axis) == 0.0 || !is_finite(params.axis)) throw std::invalid_argument("rotation axis must be non-zero");
      if (!std::isfinite(params.total_angle)) throw std::invalid_argument("total angle must be finite");
      if (params.steps == 0) throw std::invalid_argument("rotation needs at least one step");
      for (int i = 0; i <= params.steps; ++i) {
        const UnitQuat r = UnitQuat::from_axis_angle(params.axis, params.total_angle * (i / n));
        poses.push_back({params.start.p, compose(r, params.start.q)});
      }
      description = "single_axis_rotation";
      break;
    }
    case TrajectoryKind::helix: {
      if (!(params.radius > 0.0) || !std::isfinite(params.pitch) || !std::isfinite(params.turns)) {
        throw std::invalid_argument("helix needs radius > 0 and finite pitch/turns");
      }
      if (params.steps == 0) throw std::invalid_argument("helix needs at least one step");
      const double total = 2.0 * std::numbers::pi * params.turns;
      for (int i = 0; i <= params.steps; ++i) {
        const double a = total * (i / n);
        const Vec3 offset{params.radius * (std::cos(a) - 1.0), params.radius * std::sin(a),
                          params.pitch * a / (2.0 * std::numbers::pi)};
        poses.push_back({params.start.p + offset, params.start.q});
      }
      description = "helix";
      break;
    }
    case TrajectoryKind::random_walk: {
      if (!(params.max_step_t >= 0.0) || !(params.max_step_r >= 0.0) || !std::isfinite(params.max_step_t) ||
          !std::isfinite(params.max_step_r)) {
        throw std::invalid_argument("random walk bounds must be finite and >= 0");
      }
      Rng rng(seed);
      Pose pose = params.start;
      poses.push_back(pose);
      for (int i = 0; i < params.steps; ++i) {
        pose.p += rng.in_ball(params.max_step_t);
        pose.q = compose(rng.small_rotation(params.max_step_r), pose.q);
        poses.push_back(pose);
      }
      description = "random_walk seed=" + std::to_string(seed);
      break;
    }
  }
  return trace_from_poses(poses, params.dt, description);
}

ReplayResult replay(const Trace& trace, const MappingConfig& config, const Pose& initial_object) {
  validate(config);
  ReplayResult result;
  std::optional<Session> session;
  Pose object = initial_object;
  Pose engage_device{};
  bool was_disengaged = false;
  auto& m = result.metrics;

  for (const auto& sample : trace.samples) {
    const bool active = session && session->engaged();
    if (sample.engaged && !active) {
      if (session) {
        session->reengage(sample.pose, sample.t);
      } else {
        session = Session::engage(config, sample.pose, object, sample.t);
      }
      if (was_disengaged) ++m.clutch_count;
      engage_device = sample.pose;
      result.object_trace.push_back({sample.t, session->object(), 0.0, 0.0});
      continue;
    }
    if (!sample.engaged) {
      if (active) session->disengage();
      was_disengaged = true;
      continue;
    }
    const Pose prev_device = session->device_prev();
    const Pose prev_object = session->object();
    const StepResult step = session->step(sample);
    result.object_trace.push_back({sample.t, step.object, step.k_t, step.k_r});
    m.max_excursion_t = std::max(m.max_excursion_t, pose_dist(sample.pose, engage_device, DistanceMode::translation));
    m.max_excursion_r = std::max(m.max_excursion_r, pose_dist(sample.pose, engage_device, DistanceMode::rotation));
    m.device_path_length += norm(sample.pose.p - prev_device.p);
    m.object_path_length += norm(step.object.p - prev_object.p);
  }
  return result;
}

std::vector<Pose> drive(const MappingConfig& config, std::span<const Pose> device, const Pose& initial_object,
                        std::span<const double> dt) {
  if (!dt.empty() && dt.size() != device.size()) throw std::invalid_argument("drive: dt and device lengths differ");
  std::vector<Pose> out;
  if (device.empty()) return out;
  out.reserve(device.size());
  Session session = Session::engage(config, device[0], initial_object, 0);
  out.push_back(session.object());
  for (std::size_t i = 1; i < device.size(); ++i) {
    const double interval = dt.empty() ? 1.0 : dt[i];
    out.push_back(session.step({static_cast<std::int64_t>(i), device[i], interval, true}).object);
  }
  return out;
}

std::string serialize_object_trace(const ReplayResult& result, const MappingConfig& config) {
  std::string out = "#! manip-objects 1\n";
  out += "#! mapping " + describe(config) + "\n";
  out += "# t px py pz qw qx qy qz k_t k_r\n";
  for (const auto& s : result.object_trace) {
    out += std::to_string(s.t);
    for (double v : {s.pose.p.x, s.pose.p.y, s.pose.p.z, s.pose.q.w(), s.pose.q.x(), s.pose.q.y(), s.pose.q.z(), s.k_t,
                     s.k_r}) {
      out += ' ';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

std::string serialize_metrics(const TraceMetrics& m) {
  std::string out;
  out += "clutch_count: " + std::to_string(m.clutch_count) + "\n";
  out += "max_excursion_t: " + format_real(m.max_excursion_t) + "\n";
  out += "max_excursion_r: " + format_real(m.max_excursion_r) + "\n";
  out += "device_path_length: " + format_real(m.device_path_length) + "\n";
  out += "object_path_length: " + format_real(m.object_path_length) + "\n";
  return out;
}

}  // namespace manip
