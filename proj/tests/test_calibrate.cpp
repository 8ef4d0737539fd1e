#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "squidsim/calibrate.hpp"

using namespace squidsim;

namespace {

const std::string kData = SQUIDSIM_DATA_DIR;

const char* kHeadingOnly =
    "heading.scenario = scenarios/heading_step.scn\n"
    "heading.step = 20, 90, 180\n"
    "bound heading.rise 1.5 2.5\n"
    "bound heading.overshoot - 7\n"
    "bound heading.settling - 5\n"
    "bound heading.sse - 2\n";

CalibrationTargets heading_targets(const std::string& sweep)
{
  return parse_targets(std::string(kHeadingOnly) + sweep, kData);
}

}  // namespace

TEST_CASE("shipped targets parse and the defaults already pass them")
{
  const CalibrationTargets t = load_targets(kData + "/targets.txt");
  CHECK(t.heading);
  CHECK(t.depth);
  CHECK(t.yaw);
  CHECK(t.bounds.size() == 10);
  CHECK(t.grid_size() == 4u * 3u * 3u * 3u);

  const CalibrationResult r = calibrate_serial(SimConfig{}, t);
  CHECK(r.success);
  CHECK_FALSE(r.index);
  CHECK(r.evaluated == 1u);
  CHECK(r.margin >= 0.0);
  CHECK(format_report(r, t).rfind("PASS", 0) == 0);
}

TEST_CASE("detuned heading gains are recovered by the sweep, serial and parallel agree")
{
  const CalibrationTargets t =
      heading_targets("sweep control.heading.kp 0.005 0.01 0.05\nsweep control.heading.kd 0.01\n");
  SimConfig seed;
  seed.control.heading.kp = 0.005;

  const auto before = measure(seed, t);
  CHECK(worst_margin(before, t) < 0.0);

  const CalibrationResult s = calibrate_serial(seed, t);
  const CalibrationResult p = calibrate_parallel(seed, t);
  REQUIRE(s.success);
  REQUIRE(p.success);
  CHECK(s.index == p.index);
  CHECK(format_config(s.config) == format_config(p.config));
  CHECK(s.config.control.heading.kp == 0.05);
  CHECK(s.measured.at("heading.rise") >= 1.5);
  CHECK(s.measured.at("heading.rise") <= 2.5);
}

TEST_CASE("exhausted search reports the nearest miss")
{
  const CalibrationTargets t =
      heading_targets("sweep control.heading.kp 0.002 0.005 0.01\n");
  SimConfig seed;
  seed.control.heading.kp = 0.001;
  const CalibrationResult r = calibrate_serial(seed, t);
  CHECK_FALSE(r.success);
  CHECK(r.evaluated == 4u);
  REQUIRE(r.index);
  CHECK(*r.index == 2u);  // largest gain comes closest
  const std::string report = format_report(r, t);
  CHECK(report.rfind("FAIL: search exhausted, nearest miss below", 0) == 0);
  CHECK(report.find("VIOLATED") != std::string::npos);

  const CalibrationResult p = calibrate_parallel(seed, t);
  CHECK_FALSE(p.success);
  CHECK(p.index == r.index);
}

TEST_CASE("infeasible targets are rejected before any run")
{
  CalibrationTargets t = parse_targets(
      "heading.scenario = scenarios/heading_step.scn\nheading.step = 20, 90, 180\n"
      "bound heading.rise - 0.001\nsweep control.heading.kp 0.05\n",
      kData);
  CHECK_THROWS_WITH_AS(check_feasible(t, SimConfig{}),
                       doctest::Contains("below the physics step"), CalibrationError);
  CHECK_THROWS_AS(calibrate_serial(SimConfig{}, t), CalibrationError);

  t.bounds = {{"heading.overshoot", Bound{3.0, 1.0}}};
  CHECK_THROWS_AS(check_feasible(t, SimConfig{}), CalibrationError);
  t.bounds.clear();
  CHECK_THROWS_AS(check_feasible(t, SimConfig{}), CalibrationError);
}

TEST_CASE("targets file errors")
{
  CHECK_THROWS_AS(parse_targets("bound heading.nope 0 1\n"), CalibrationError);
  CHECK_THROWS_AS(parse_targets("bound heading.rise 0 1\n"), CalibrationError);  // no probe
  CHECK_THROWS_AS(parse_targets("sweep not.a.key 1 2\n"), CalibrationError);
  CHECK_THROWS_AS(parse_targets("sweep control.heading.kp x\n"), CalibrationError);
  CHECK_THROWS_AS(parse_targets("heading.scenario = scenarios/heading_step.scn\n", kData),
                  CalibrationError);
  CHECK_THROWS_AS(parse_targets("what = 1\n"), CalibrationError);
}

TEST_CASE("grid indexing is mixed radix with the first key slowest")
{
  const CalibrationTargets t = heading_targets(
      "sweep control.heading.kp 1 2 3\nsweep control.heading.kd 10 20\n");
  CHECK(t.grid_size() == 6u);
  const SimConfig c = grid_config(SimConfig{}, t, 3);
  CHECK(c.control.heading.kp == 2.0);
  CHECK(c.control.heading.kd == 20.0);
  const SimConfig last = grid_config(SimConfig{}, t, 5);
  CHECK(last.control.heading.kp == 3.0);
  CHECK(last.control.heading.kd == 20.0);
}

TEST_CASE("margins")
{
  CalibrationTargets t;
  t.bounds = {{"heading.rise", Bound{1.0, 3.0}}, {"heading.overshoot", Bound{-INFINITY, 5.0}}};
  CHECK(worst_margin({{"heading.rise", 2.0}, {"heading.overshoot", 0.0}}, t) ==
        doctest::Approx(0.5));
  CHECK(worst_margin({{"heading.rise", 3.5}, {"heading.overshoot", 0.0}}, t) ==
        doctest::Approx(-0.25));
  CHECK(worst_margin({{"heading.rise", 2.0}, {"heading.overshoot", 10.0}}, t) ==
        doctest::Approx(-1.0));
}
