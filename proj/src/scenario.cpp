#include "squidsim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "squidsim/protocol.hpp"

namespace squidsim {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg)
{
  throw ScenarioError("line " + std::to_string(line) + ": " + msg);
}

double number(std::string_view token, std::size_t line, std::string_view what)
{
  const auto v = parse_double(token);
  if (!v) fail(line, "bad number for " + std::string(what) + ": '" + std::string(token) + "'");
  return *v;
}

std::pair<double, double> pair_of(std::string_view value, std::size_t line, std::string_view what)
{
  const auto comma = value.find(',');
  if (comma == std::string_view::npos) fail(line, std::string(what) + " expects 'a, b'");
  return {number(value.substr(0, comma), line, what), number(value.substr(comma + 1), line, what)};
}

std::vector<std::string_view> words(std::string_view s)
{
  std::vector<std::string_view> out;
  while (true) {
    s = trim(s);
    if (s.empty()) break;
    const auto sp = s.find_first_of(" \t");
    out.push_back(s.substr(0, sp));
    if (sp == std::string_view::npos) break;
    s = s.substr(sp);
  }
  return out;
}

bool set_state_field(VehicleState& s, std::string_view field, double v)
{
  if (field == "x") s.x = v;
  else if (field == "y") s.y = v;
  else if (field == "depth") s.depth = v;
  else if (field == "heading") s.heading = v;
  else if (field == "pitch") s.pitch = v;
  else if (field == "roll") s.roll = v;
  else if (field == "u") s.u = v;
  else if (field == "r") s.r = v;
  else if (field == "w") s.w = v;
  else if (field == "q") s.q = v;
  else if (field == "p") s.p = v;
  else return false;
  return true;
}

bool set_plan_field(MissionPlan& p, std::string_view field, double v)
{
  if (field == "sample_depth") p.sample_depth = v;
  else if (field == "sample_volume") p.sample_volume = v;
  else if (field == "capture_radius") p.capture_radius = v;
  else if (field == "surge") p.surge = v;
  else if (field == "depth_tolerance") p.depth_tolerance = v;
  else if (field == "depth_hold_time") p.depth_hold_time = v;
  else if (field == "surface_depth") p.surface_depth = v;
  else if (field == "fix_timeout") p.fix_timeout = v;
  else if (field == "ascent_timeout") p.ascent_timeout = v;
  else return false;
  return true;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const GeoRef& ref)
{
  Scenario sc;
  std::size_t line_no = 0;
  auto plan = [&]() -> MissionPlan& {
    if (!sc.mission) {
      sc.mission = MissionPlan{};
      sc.mission->home = {ref.lat0, ref.lon0};
      sc.mission->target = sc.mission->home;
    }
    return *sc.mission;
  };

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto w = words(line);
    if (w[0] == "event") {
      if (w.size() != 3) fail(line_no, "expected 'event <t> <command>'");
      ScenarioEvent ev{number(w[1], line_no, "event time"), std::string(w[2])};
      try {
        parse_command(ev.command);
      } catch (const ParseError& e) {
        fail(line_no, std::string("bad event command: ") + e.what());
      }
      sc.events.push_back(std::move(ev));
      continue;
    }
    if (w[0] == "ramp") {
      if (w.size() != 6 || w[1] != "heading")
        fail(line_no, "expected 'ramp heading <t0> <t1> <from> <to>'");
      HeadingRamp r{number(w[2], line_no, "ramp"), number(w[3], line_no, "ramp"),
                    number(w[4], line_no, "ramp"), number(w[5], line_no, "ramp")};
      if (!(r.t_end > r.t_start)) fail(line_no, "ramp must end after it starts");
      sc.ramps.push_back(r);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (key == "name") {
      sc.name = std::string(value);
    } else if (key == "duration") {
      sc.duration = number(value, line_no, key);
    } else if (key == "physics_dt") {
      sc.physics_dt = number(value, line_no, key);
    } else if (key == "control_dt") {
      sc.control_dt = number(value, line_no, key);
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || ptr != value.data() + value.size()) fail(line_no, "bad seed");
      sc.seed = seed;
    } else if (key == "initial.fill_offset") {
      sc.initial_fill_offset = number(value, line_no, key);
    } else if (key.starts_with("initial.")) {
      if (!set_state_field(sc.initial, key.substr(8), number(value, line_no, key)))
        fail(line_no, "unknown state field '" + std::string(key) + "'");
    } else if (key.starts_with("param.")) {
      const std::string assignment = std::string(key.substr(6)) + "=" + std::string(value);
      try {
        SimConfig probe;
        apply_override(probe, assignment);
      } catch (const ConfigError& e) {
        fail(line_no, e.what());
      }
      sc.overrides.push_back(assignment);
    } else if (key == "mission.target" || key == "mission.home") {
      const auto [lat, lon] = pair_of(value, line_no, key);
      (key == "mission.target" ? plan().target : plan().home) = GeoPoint{lat, lon};
    } else if (key == "mission.target_ne" || key == "mission.home_ne") {
      const auto [n, e] = pair_of(value, line_no, key);
      (key == "mission.target_ne" ? plan().target : plan().home) = local_to_geo(ref, n, e);
    } else if (key.starts_with("mission.")) {
      if (!set_plan_field(plan(), key.substr(8), number(value, line_no, key)))
        fail(line_no, "unknown mission field '" + std::string(key) + "'");
    } else {
      fail(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, const GeoRef& ref)
{
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str(), ref);
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

SimConfig Scenario::resolve(const SimConfig& base) const
{
  SimConfig c = base;
  for (const auto& o : overrides) apply_override(c, o);
  if (physics_dt) c.physics_dt = *physics_dt;
  if (control_dt) c.control.dt = *control_dt;
  c.validate();
  validate(c);
  return c;
}

void Scenario::validate(const SimConfig& c) const
{
  if (!(duration > 0.0)) throw ScenarioError("scenario duration must be > 0");
  for (const auto& ev : events)
    if (ev.t < 0.0 || ev.t > duration) throw ScenarioError("event outside [0, duration]");
  if (initial.depth < 0.0) throw ScenarioError("initial depth must be >= 0");
  const double neutral = neutral_fill(c.vehicle);
  const double fill = neutral + initial_fill_offset;
  if (fill < 0.0 || fill > c.actuation.capacity)
    throw ScenarioError("initial fill outside cylinder capacity");
  if (mission) {
    try {
      mission->validate(2.0 * (c.actuation.capacity - neutral));
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(e.what());
    }
  }
}

}  // namespace squidsim
