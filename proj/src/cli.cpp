#include "manip/cli.hpp"

#include <CLI11.hpp>
#include <array>
#include <istream>
#include <ostream>

#include "manip/compliance.hpp"
#include "manip/config.hpp"
#include "manip/errors.hpp"
#include "manip/protocol.hpp"
#include "manip/report.hpp"
#include "manip/server.hpp"
#include "manip/trace.hpp"

namespace manip {

namespace {

// Flag values as typed, applied over the defaults of the chosen mapping.
struct MappingFlags {
  std::string mapping = "relative";
  std::string gain_t = "1";
  std::string gain_r = "1";
  bool ego_t = true;
  bool ego_r = false;
  CLI::Option* ego_t_opt = nullptr;
  CLI::Option* ego_r_opt = nullptr;
  bool mapping_given = false;
};

void add_mapping_flags(CLI::App& cmd, MappingFlags& f) {
  cmd.add_option("--mapping", f.mapping, "absolute, relative or rate")->capture_default_str();
  cmd.add_option("--gain-t", f.gain_t, "translation gain spec")->capture_default_str();
  cmd.add_option("--gain-r", f.gain_r, "rotation gain spec")->capture_default_str();
  f.ego_t_opt = cmd.add_flag("--ego-t", f.ego_t, "egocentric translations; --ego-t=false for allocentric (default on)");
  f.ego_r_opt = cmd.add_flag("--ego-r", f.ego_r, "egocentric rotations (default off)");
}

MappingConfig build_mapping(const MappingFlags& f) {
  MappingConfig c = default_config(parse_mapping_kind(f.mapping));
  c.translation.law = parse_gain_spec(f.gain_t);
  c.rotation.law = parse_gain_spec(f.gain_r);
  if (f.ego_t_opt != nullptr && f.ego_t_opt->count() > 0) c.translation.egocentric = f.ego_t;
  if (f.ego_r_opt != nullptr && f.ego_r_opt->count() > 0) c.rotation.egocentric = f.ego_r;
  validate(c);
  return c;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

ParsedTrace load_trace(const std::string& path, std::istream& in, std::ostream& err) {
  ParsedTrace parsed;
  if (path == "-") {
    std::string text(std::istreambuf_iterator<char>(in), {});
    parsed = parse_trace(text);
  } else {
    parsed = read_trace_file(path);
  }
  for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';
  return parsed;
}

Vec3 parse_vec(const std::string& text, const char* what) {
  std::array<double, 3> v{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const auto comma = text.find(',', pos);
    if ((i < 2) != (comma != std::string::npos)) throw ConfigError(std::string(what) + " must be x,y,z");
    const std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      v[static_cast<std::size_t>(i)] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + " component '" + part + "' is not a number");
    }
    pos = comma + 1;
  }
  return {v[0], v[1], v[2]};
}

struct ServeOptions {
  std::string listen = "127.0.0.1:7878";
  bool stdio = false;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"manipctl: 6-DOF manipulation mappings, traces and compliance checks"};
  app.require_subcommand(1);

  std::array<MappingFlags, 4> flags;  // run, check, classify, serve
  std::string out_path;
  double tol = RunConfig{}.tol;
  std::uint64_t seed = RunConfig{}.seed;
  int trials = RunConfig{}.trials;

  std::string trace_path;
  auto* run = app.add_subcommand("run", "replay a trace through a mapping");
  run->add_option("trace", trace_path, "trace file, or - for stdin")->required();
  add_mapping_flags(*run, flags[0]);
  run->add_option("--out", out_path, "object trace path; metrics go to <out>.metrics");

  auto* check = app.add_subcommand("check", "check compliance properties on one trace");
  check->add_option("trace", trace_path, "trace file, or - for stdin")->required();
  add_mapping_flags(*check, flags[1]);
  check->add_option("--tol", tol, "tolerance")->capture_default_str();
  check->add_option("--out", out_path, "report path");

  auto* cls = app.add_subcommand("classify", "randomized compliance classification");
  add_mapping_flags(*cls, flags[2]);
  cls->add_option("--tol", tol, "tolerance")->capture_default_str();
  cls->add_option("--seed", seed, "random seed")->capture_default_str();
  cls->add_option("--trials", trials, "trials per property and condition")->capture_default_str();
  cls->add_option("--out", out_path, "report path");

  std::string gen_kind;
  TrajectoryParams gp;
  std::string displacement = "1,0,0";
  std::string axis = "0,0,1";
  auto* gen = app.add_subcommand("gen", "generate a synthetic trace");
  gen->add_option("kind", gen_kind, "line, single_axis_rotation, helix or random_walk")->required();
  gen->add_option("--steps", gp.steps)->capture_default_str();
  gen->add_option("--dt", gp.dt)->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--displacement", displacement, "line: total displacement x,y,z")->capture_default_str();
  gen->add_option("--axis", axis, "single_axis_rotation: axis x,y,z")->capture_default_str();
  gen->add_option("--angle", gp.total_angle, "single_axis_rotation: total angle (rad)")->capture_default_str();
  gen->add_option("--radius", gp.radius)->capture_default_str();
  gen->add_option("--pitch", gp.pitch)->capture_default_str();
  gen->add_option("--turns", gp.turns)->capture_default_str();
  gen->add_option("--max-step-t", gp.max_step_t)->capture_default_str();
  gen->add_option("--max-step-r", gp.max_step_r)->capture_default_str();
  gen->add_option("--out", out_path, "trace path");

  ServeOptions so;
  auto* serve = app.add_subcommand("serve", "run the session protocol");
  add_mapping_flags(*serve, flags[3]);
  serve->add_option("--tol", tol, "tolerance for compliance flags")->capture_default_str();
  serve->add_option("--listen", so.listen, "host:port")->capture_default_str();
  serve->add_flag("--stdio", so.stdio, "speak the protocol on stdin/stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::array<CLI::App*, 4> mapped = {run, check, cls, serve};
  MappingFlags mflags;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    if (mapped[i]->parsed()) {
      mflags = flags[i];
      mflags.mapping_given = mapped[i]->count("--mapping") > 0;
    }
  }

  try {
    if (run->parsed()) {
      const MappingConfig config = build_mapping(mflags);
      const ParsedTrace parsed = load_trace(trace_path, in, err);
      const ReplayResult result = replay(parsed.trace, config);
      const std::string objects = serialize_object_trace(result, config);
      const std::string metrics = serialize_metrics(result.metrics);
      if (out_path.empty()) {
        out << objects;
        err << metrics;
      } else {
        write_text_file(out_path, objects);
        write_text_file(out_path + ".metrics", metrics);
      }
      return kExitOk;
    }

    if (check->parsed()) {
      const MappingConfig config = build_mapping(mflags);
      RunConfig rc;
      rc.mapping = config;
      rc.tol = tol;
      validate(rc);
      const ParsedTrace parsed = load_trace(trace_path, in, err);
      const auto checks = check_trace(parsed.trace, config, tol);
      emit(out_path, format_check(checks, config, tol, parsed.trace.samples.size()), out);
      return kExitOk;
    }

    if (cls->parsed()) {
      std::vector<MappingConfig> configs;
      if (mflags.mapping_given) {
        configs.push_back(build_mapping(mflags));
      } else {
        for (MappingKind k : {MappingKind::absolute, MappingKind::relative, MappingKind::rate}) {
          MappingFlags f = mflags;
          f.mapping = to_string(k);
          configs.push_back(build_mapping(f));
        }
      }
      RunConfig rc;
      rc.tol = tol;
      rc.seed = seed;
      rc.trials = trials;
      for (const auto& c : configs) {
        rc.mapping = c;
        validate(rc);
      }
      std::vector<ComplianceReport> reports;
      for (const auto& c : configs) reports.push_back(classify(c, seed, trials, tol));
      std::string text = render_table(reports);
      for (const auto& r : reports) text += "\n" + format_report(r);
      emit(out_path, text, out);
      return kExitOk;
    }

    if (gen->parsed()) {
      gp.displacement = parse_vec(displacement, "--displacement");
      gp.axis = parse_vec(axis, "--axis");
      TrajectoryKind kind{};
      try {
        kind = parse_trajectory_kind(gen_kind);
        emit(out_path, serialize_trace(gen_trajectory(kind, gp, seed)), out);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      return kExitOk;
    }

    if (serve->parsed()) {
      const MappingConfig config = build_mapping(mflags);
      if (!(tol > 0.0)) throw ConfigError("tolerance must be > 0");
      if (so.stdio) {
        serve_stream(in, out, config, tol);
        return kExitOk;
      }
      const auto [host, port] = parse_address(so.listen);
      Server server(config, tol);
      const std::uint16_t bound = server.start(host, port);
      err << "listening on " << host << ':' << bound << '\n';
      server.wait();
      return kExitOk;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const EngineError& e) {
    err << "engine error: " << e.what() << '\n';
    return kExitEngine;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitEngine;
  }
  return kExitOk;
}

}  // namespace manip
