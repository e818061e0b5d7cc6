#include <doctest.h>

#include <cmath>
#include <numbers>

#include "manip/compliance.hpp"
#include "manip/errors.hpp"
#include "manip/random.hpp"
#include "manip/report.hpp"

using namespace manip;

namespace {

MappingConfig allo(MappingKind kind, GainSpec t = ConstantGain{1.0}, GainSpec r = ConstantGain{1.0}) {
  MappingConfig c;
  c.kind = kind;
  c.translation.law = std::move(t);
  c.rotation.law = std::move(r);
  return c;
}

std::vector<Pose> positions(std::initializer_list<Vec3> ps) {
  std::vector<Pose> out;
  for (const auto& p : ps) out.push_back({p, {}});
  return out;
}

}  // namespace

TEST_CASE("step verdict") {
  const UnitQuat z90 = UnitQuat::from_axis_angle({0, 0, 1}, std::numbers::pi / 2);
  SUBCASE("screen-space collinear motion is compliant with signed alpha") {
    // Device turned 90 deg about z moves along tracker +y, i.e. screen +x.
    const StepVerdict v = step_verdict({{0, 0, 0}, z90}, {{0, 1, 0}, z90}, {{5, 5, 5}, {}}, {{3, 5, 5}, {}}, 1e-9);
    CHECK(v.translation_compliant);
    CHECK(v.alpha == -2.0);
    CHECK(v.vacuous_r);
  }
  SUBCASE("tracker-space collinear motion is not compliant under rotation") {
    const StepVerdict v = step_verdict({{0, 0, 0}, z90}, {{0, 1, 0}, z90}, {{0, 0, 0}, {}}, {{0, 1, 0}, {}}, 1e-9);
    CHECK_FALSE(v.translation_compliant);
    CHECK(v.residual_t == doctest::Approx(1.0));
  }
  SUBCASE("rotation axis and beta") {
    const UnitQuat x10 = UnitQuat::from_axis_angle({1, 0, 0}, 0.1);
    const UnitQuat x_minus30 = UnitQuat::from_axis_angle({1, 0, 0}, -0.3);
    const StepVerdict v = step_verdict({{}, {}}, {{}, x10}, {{}, {}}, {{}, x_minus30}, 1e-9);
    CHECK(v.rotation_compliant);
    CHECK(v.beta == doctest::Approx(-3.0).epsilon(1e-12));
    const StepVerdict w =
        step_verdict({{}, {}}, {{}, x10}, {{}, {}}, {{}, UnitQuat::from_axis_angle({0, 1, 0}, 0.1)}, 1e-9);
    CHECK_FALSE(w.rotation_compliant);
  }
  SUBCASE("zero motion is vacuously compliant") {
    const StepVerdict v = step_verdict({{1, 2, 3}, z90}, {{1, 2, 3}, z90}, {{}, {}}, {{}, {}}, 1e-9);
    CHECK(v.translation_compliant);
    CHECK(v.rotation_compliant);
    CHECK(v.vacuous_t);
    CHECK(v.alpha == 0.0);
    CHECK(v.residual_t == 0.0);
  }
}

TEST_CASE("directional verdicts") {
  SUBCASE("relative mapping with random per-step gains") {
    Rng rng(17);
    std::vector<double> kt, kr;
    for (int i = 0; i < 64; ++i) {
      kt.push_back(rng.uniform(-3, 3));
      kr.push_back(rng.uniform(-3, 3));
    }
    const MappingConfig c = allo(MappingKind::relative, ScheduledGain{kt}, ScheduledGain{kr});
    std::vector<Pose> device{{rng.in_cube(0.5), rng.orientation()}};
    for (int i = 0; i < 2000; ++i) {
      device.push_back({rng.in_cube(0.5), compose(rng.small_rotation(0.3), device.back().q)});
    }
    const auto object = drive(c, device);
    for (const auto& v : directional_verdicts(device, object, 1e-9)) {
      CHECK(v.translation_compliant);
      CHECK(v.rotation_compliant);
    }
  }
  SUBCASE("rate mapping: change of direction breaks compliance") {
    const auto device = positions({{0, 0, 0}, {0.1, 0, 0}, {0.2, 0, 0}, {0.2, 0.1, 0}, {0.2, 0.2, 0}});
    const auto v = directional_verdicts(device, drive(allo(MappingKind::rate), device), 1e-9);
    CHECK(v[0].translation_compliant);
    CHECK(v[1].translation_compliant);
    CHECK_FALSE(v[2].translation_compliant);
    CHECK(v[2].tick == 3);
  }
  SUBCASE("rate mapping along one axis stays compliant") {
    const auto device = positions({{0, 0, 0}, {0.1, 0, 0}, {0.3, 0, 0}, {0.2, 0, 0}, {0.25, 0, 0}});
    for (const auto& v : directional_verdicts(device, drive(allo(MappingKind::rate), device), 1e-9)) {
      CHECK(v.translation_compliant);
    }
  }
  SUBCASE("absolute translations with orientation held") {
    Rng rng(19);
    const UnitQuat q0 = rng.orientation();
    std::vector<Pose> device;
    for (int i = 0; i < 100; ++i) device.push_back({rng.in_cube(0.5), q0});
    const auto object = drive(allo(MappingKind::absolute, ConstantGain{2.5}), device);
    for (const auto& v : directional_verdicts(device, object, 1e-9)) CHECK(v.translation_compliant);
  }
  SUBCASE("length mismatch") {
    const auto a = positions({{0, 0, 0}, {1, 0, 0}});
    const auto b = positions({{0, 0, 0}});
    CHECK_THROWS_AS(directional_verdicts(a, b, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(directional_verdicts(b, b, 1e-9), std::invalid_argument);
  }
}

TEST_CASE("transitivity") {
  Rng rng(23);
  SUBCASE("absolute with constant gain") {
    for (int i = 0; i < 100; ++i) {
      std::vector<Pose> w;
      for (int j = 0; j < 4; ++j) w.push_back({rng.in_cube(0.5), rng.orientation()});
      const auto r = transitivity_check(allo(MappingKind::absolute, ConstantGain{1.7}, ConstantGain{-0.6}), w, 1e-10);
      CHECK(r.transitive());
    }
  }
  SUBCASE("rate with differing dwell times") {
    const auto w = positions({{0, 0, 0}, {0.1, 0, 0}, {0.1, 0, 0}, {0.3, 0, 0}});
    const auto r = transitivity_check(allo(MappingKind::rate), w, 1e-10);
    CHECK_FALSE(r.transitive_t);
    CHECK(r.error_t > 0.1);
  }
  SUBCASE("relative, k = -1, rotation only") {
    for (int i = 0; i < 100; ++i) {
      std::vector<Pose> w;
      for (int j = 0; j < 5; ++j) w.push_back({{}, rng.orientation()});
      CHECK(transitivity_check(allo(MappingKind::relative, ConstantGain{1}, ConstantGain{-1}), w, 1e-10).transitive_r);
    }
  }
  SUBCASE("too few waypoints") {
    CHECK_THROWS_AS(transitivity_check(allo(MappingKind::absolute), positions({{0, 0, 0}, {1, 0, 0}}), 1e-9),
                    std::invalid_argument);
  }
}

TEST_CASE("nulling") {
  const auto out_and_back = positions({{0, 0, 0}, {0.1, 0, 0}, {0.2, 0.1, 0}, {0.1, 0, 0}, {0, 0, 0}});
  CHECK(nulling_check(allo(MappingKind::absolute, ScheduledGain{{3, -1, 0.2, 5}}), out_and_back, 1e-12).nulling);
  const NullingResult rate = nulling_check(allo(MappingKind::rate), out_and_back, 1e-9);
  CHECK_FALSE(rate.nulling);
  CHECK(rate.error_t > 0.0);
  const auto still = positions({{0.3, 0, 0}, {0.3, 0, 0}, {0.3, 0, 0}});
  for (MappingKind k : {MappingKind::absolute, MappingKind::relative, MappingKind::rate}) {
    CHECK(nulling_check(allo(k), still, 1e-12).nulling);
  }
  CHECK_THROWS_AS(nulling_check(allo(MappingKind::absolute), positions({{0, 0, 0}, {1e-11, 0, 0}}), 1e-9),
                  std::invalid_argument);
}

TEST_CASE("k = -1 equivalence") {
  Rng rng(29);
  SUBCASE("single axis") {
    const Vec3 axis = rng.unit_vector();
    std::vector<UnitQuat> traj;
    double a = 0;
    for (int i = 0; i < 500; ++i) {
      a += rng.uniform(-0.3, 0.3);
      traj.push_back(UnitQuat::from_axis_angle(axis, a));
    }
    CHECK(k_minus1_equivalence(traj, rng.orientation()).max_residual() <= 1e-10);
  }
  SUBCASE("zero motion") {
    const std::vector<UnitQuat> traj(50, UnitQuat::from_axis_angle({1, 0, 0}, 0.4));
    CHECK(k_minus1_equivalence(traj).max_residual() == 0.0);
  }
}

TEST_CASE("classifier") {
  const MappingConfig relative = default_config(MappingKind::relative);
  SUBCASE("minimum trial count") {
    CHECK_THROWS_AS(classify(relative, 1, 1), ConfigError);
    CHECK_THROWS_AS(classify_serial(relative, 1, 99), ConfigError);
  }
  SUBCASE("parallel equals serial") {
    for (MappingKind k : {MappingKind::absolute, MappingKind::relative, MappingKind::rate}) {
      const MappingConfig c = default_config(k);
      CHECK(format_report(classify(c, 7, 150)) == format_report(classify_serial(c, 7, 150)));
    }
  }
  SUBCASE("relative row") {
    const ComplianceReport r = classify(relative, 42, 200);
    CHECK(r.cell(Property::directional_t).verdict == Verdict::always);
    CHECK(r.cell(Property::directional_r).verdict == Verdict::always);
    const CellReport& tt = r.cell(Property::transitive_t);
    CHECK(tt.verdict == Verdict::conditional);
    REQUIRE(tt.counterexample);
    // The counterexample for translation transitivity involves device rotation.
    const auto& s = tt.counterexample->trace.samples;
    bool rotates = false;
    for (std::size_t i = 1; i < s.size(); ++i) rotates = rotates || !(s[i].pose.q == s[0].pose.q);
    CHECK(rotates);
  }
  SUBCASE("verdicts are seed-stable, counterexamples are not") {
    for (MappingKind k : {MappingKind::absolute, MappingKind::relative, MappingKind::rate}) {
      const MappingConfig c = default_config(k);
      const ComplianceReport base = classify(c, 1, 200);
      for (std::uint64_t seed = 2; seed <= 5; ++seed) {
        const ComplianceReport other = classify(c, seed, 200);
        for (Property p : kProperties) {
          CAPTURE(to_string(p));
          CHECK(other.cell(p).verdict == base.cell(p).verdict);
          CHECK(other.cell(p).holding_conditions() == base.cell(p).holding_conditions());
          if (base.cell(p).counterexample) {
            CHECK_FALSE(other.cell(p).counterexample->trace == base.cell(p).counterexample->trace);
          }
        }
      }
    }
  }
  SUBCASE("every non-always cell carries a counterexample that replays") {
    for (MappingKind k : {MappingKind::absolute, MappingKind::relative, MappingKind::rate}) {
      const ComplianceReport r = classify(default_config(k), 42, 150);
      const std::string text = format_report(r);
      const auto parsed = parse_counterexamples(text);
      std::size_t expected = 0;
      for (const auto& cell : r.cells) {
        if (cell.verdict == Verdict::always) continue;
        ++expected;
        REQUIRE(cell.counterexample);
        CHECK(counterexample_fails(*cell.counterexample, r.tol));
      }
      REQUIRE(parsed.size() == expected);
      for (const auto& cx : parsed) {
        CHECK(counterexample_fails(cx, r.tol));
        // Written to a trace file and read back, it still fails.
        const Trace back = parse_trace(serialize_trace(cx.trace)).trace;
        CHECK(counterexample_fails({cx.property, cx.config, back}, r.tol));
      }
    }
  }
}

TEST_CASE("check_trace") {
  Rng rng(31);
  SUBCASE("relative mapping is directionally compliant") {
    TrajectoryParams p;
    p.steps = 200;
    const Trace t = gen_trajectory(TrajectoryKind::random_walk, p, 3);
    const auto checks = check_trace(t, default_config(MappingKind::relative), 1e-9);
    CHECK(checks[0].verdict == "always");
    CHECK(checks[1].verdict == "always");
    const std::string report = format_check(checks, default_config(MappingKind::relative), 1e-9, t.samples.size());
    CHECK(report.find("directional: always\n") != std::string::npos);
  }
  SUBCASE("rate out and back is not nulling compliant") {
    const auto poses = positions({{0, 0, 0}, {0.1, 0, 0}, {0.2, 0, 0}, {0.1, 0, 0}, {0, 0, 0}});
    const MappingConfig rate = default_config(MappingKind::rate);
    const auto checks = check_trace(trace_from_poses(poses, 0.01), rate, 1e-9);
    const TraceCheck& n = checks[static_cast<std::size_t>(Property::nulling)];
    CHECK(n.verdict == "never");
    REQUIRE(n.counterexample);
    CHECK(counterexample_fails(*n.counterexample, 1e-9));
    const std::string report = format_check(checks, rate, 1e-9, poses.size());
    CHECK(report.find("nulling: never\n") != std::string::npos);
    CHECK(report.find("begin counterexample nulling\n") != std::string::npos);
  }
  SUBCASE("identity trace passes everything") {
    const std::vector<Pose> poses(6, Pose{{0.1, 0.2, 0.3}, rng.orientation()});
    for (MappingKind k : {MappingKind::absolute, MappingKind::relative, MappingKind::rate}) {
      for (const auto& c : check_trace(trace_from_poses(poses), default_config(k), 1e-9)) {
        CAPTURE(to_string(c.property));
        CHECK(c.verdict == "always");
      }
    }
  }
  SUBCASE("no engaged steps") {
    const auto checks = check_trace(Trace{}, default_config(MappingKind::absolute), 1e-9);
    for (const auto& c : checks) CHECK(c.verdict == "n/a");
  }
}

TEST_CASE("table rendering") {
  CellReport cell;
  cell.verdict = Verdict::always;
  CHECK(table_cell(cell) == "yes");
  cell.verdict = Verdict::never;
  CHECK(table_cell(cell) == "no");
  cell.verdict = Verdict::conditional;
  cell.restricted.push_back({{Family::fixed_orientation, false, "no device rotation"}, 100, 0});
  cell.restricted.push_back({{Family::rotation_only, true, "other"}, 100, 3});
  CHECK(table_cell(cell) == "if no device rotation");
}

TEST_CASE("malformed counterexample blocks") {
  CHECK_THROWS_AS(parse_counterexamples("begin counterexample nulling\nmapping: rate\n"), ParseError);
  CHECK_THROWS_AS(parse_counterexamples("begin counterexample sideways\nmapping: rate\ngain_t: 1 ego\ngain_r: 1 "
                                        "allo\nend counterexample\n"),
                  ParseError);
  CHECK(parse_counterexamples("#! manip-report 1\nkind: classify\n").empty());
}
