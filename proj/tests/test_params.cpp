#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "squidsim/params.hpp"
#include "squidsim/scenario.hpp"

using namespace squidsim;

namespace {

const std::string kData = SQUIDSIM_DATA_DIR;

bool same(const SimConfig& a, const SimConfig& b)
{
  for (const auto& k : param_keys())
    if (get_param(a, k) != get_param(b, k)) return false;
  return true;
}

}  // namespace

TEST_CASE("shipped parameter file matches the built-in defaults")
{
  const SimConfig file = load_config(kData + "/default.params");
  CHECK(same(file, SimConfig{}));
  CHECK_NOTHROW(file.validate());
}

TEST_CASE("format and parse round trip every key exactly")
{
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  SimConfig c;
  for (const auto& k : param_keys()) set_param(c, k, get_param(c, k) * scale(gen));
  CHECK(same(parse_config(format_config(c)), c));
  CHECK(format_config(parse_config(format_config(c))) == format_config(c));
}

TEST_CASE("format_double is shortest round trip")
{
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2e-5) == "2e-05");
  for (double v : {1.0 / 3.0, 9.049e-5, -1e-300, 123456789.125})
    CHECK(*parse_double(format_double(v)) == v);
}

TEST_CASE("parse_double is strict")
{
  CHECK(parse_double("1.5") == 1.5);
  CHECK(parse_double(" 2") == 2.0);
  CHECK_FALSE(parse_double("1.5x"));
  CHECK_FALSE(parse_double(""));
  CHECK_FALSE(parse_double("abc"));
}

TEST_CASE("parameter file errors")
{
  CHECK_THROWS_WITH_AS(parse_config("vehicle.m_u = 2\nvehicle.bogus = 1\n"),
                       "line 2: unknown parameter 'vehicle.bogus'", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("vehicle.m_u 2\n"), "line 1: expected 'name = value'",
                       ConfigError);
  CHECK_THROWS_AS(parse_config("vehicle.m_u = two\n"), ConfigError);
  CHECK_THROWS_AS(load_config(kData + "/does_not_exist.params"), ConfigError);

  const SimConfig c = parse_config("# comment\n\n  vehicle.m_u = 3.5  # trailing\n");
  CHECK(c.vehicle.m_u == 3.5);
}

TEST_CASE("overrides")
{
  SimConfig c;
  apply_override(c, "control.heading.kp=0.02");
  CHECK(c.control.heading.kp == 0.02);
  CHECK_THROWS_AS(apply_override(c, "control.heading.kp"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "nope=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "control.heading.kp=x"), ConfigError);
}

TEST_CASE("validation names the offending setting")
{
  SimConfig c;
  c.control.dt = 0.015;
  CHECK_THROWS_WITH_AS(c.validate(), "control.dt must be an integer multiple of sim.physics_dt",
                       ConfigError);
  c = {};
  c.link.telemetry_period = 0.03;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.noise.gps_sigma = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.actuation.capacity = 5e-5;
  CHECK_THROWS_WITH_AS(c.validate(), "neutral fill exceeds ballast cylinder capacity",
                       ConfigError);
  c = {};
  c.physics_dt = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("scenario parsing")
{
  const Scenario sc = parse_scenario(
      "name = demo\nduration = 12\nseed = 9\ninitial.heading = 45\n"
      "param.control.heading.kp = 0.03\nevent 1 HDG:90\nevent 2 M2:forward\n"
      "ramp heading 3 5 90 180\nmission.target_ne = 10, 0\nmission.sample_depth = 0.2\n");
  CHECK(sc.name == "demo");
  CHECK(sc.duration == 12.0);
  CHECK(sc.seed == 9u);
  CHECK(sc.initial.heading == 45.0);
  REQUIRE(sc.events.size() == 2);
  CHECK(sc.events[1].command == "M2:forward");
  REQUIRE(sc.ramps.size() == 1);
  CHECK(sc.ramps[0].to == 180.0);
  REQUIRE(sc.mission);
  CHECK(sc.mission->sample_depth == 0.2);
  double n = 0.0, e = 0.0;
  geo_to_local(GeoRef{}, sc.mission->target, n, e);
  CHECK(n == doctest::Approx(10.0));
  CHECK(sc.resolve({}).control.heading.kp == 0.03);
}

TEST_CASE("scenario errors carry the line number")
{
  CHECK_THROWS_WITH_AS(parse_scenario("duration = 5\nevent 1 HDG:abc\n"),
                       doctest::Contains("line 2: bad event command"), ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("wat = 1\n"), "line 1: unknown key 'wat'", ScenarioError);
  CHECK_THROWS_WITH_AS(parse_scenario("param.bogus = 1\n"),
                       "line 1: unknown parameter 'bogus'", ScenarioError);
  CHECK_THROWS_AS(parse_scenario("ramp heading 5 3 0 10\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("seed = -1\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("initial.bogus = 1\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("mission.target_ne = 3\n"), ScenarioError);
}

TEST_CASE("scenario consistency is checked before running")
{
  Scenario sc = parse_scenario("duration = 5\nevent 6 HDG:10\n");
  CHECK_THROWS_AS(sc.resolve({}), ScenarioError);
  sc = parse_scenario("duration = 5\ninitial.fill_offset = 1\n");
  CHECK_THROWS_AS(sc.resolve({}), ScenarioError);
  sc = parse_scenario("duration = 5\nmission.sample_volume = 1\n");
  CHECK_THROWS_AS(sc.resolve({}), ScenarioError);
  sc = parse_scenario("duration = 5\ncontrol_dt = 0.015\n");
  CHECK_THROWS_AS(sc.resolve({}), ConfigError);
}

TEST_CASE("shipped scenarios load and resolve")
{
  for (const char* name : {"yaw_360", "heading_step", "depth_step", "sampling_mission"}) {
    CAPTURE(name);
    const Scenario sc = load_scenario(kData + "/scenarios/" + name + ".scn");
    CHECK_NOTHROW(sc.resolve({}));
  }
}
