#include "squidsim/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace squidsim {

namespace {

using Accessor = double& (*)(SimConfig&);

struct Entry {
  const char* key;
  Accessor get;
};

#define SQ_PARAM(name, member) \
  Entry { name, [](SimConfig& c) -> double& { return c.member; } }

const std::vector<Entry>& registry()
{
  static const std::vector<Entry> entries = {
      SQ_PARAM("vehicle.m_u", vehicle.m_u),
      SQ_PARAM("vehicle.m_w", vehicle.m_w),
      SQ_PARAM("vehicle.I_z", vehicle.I_z),
      SQ_PARAM("vehicle.I_y", vehicle.I_y),
      SQ_PARAM("vehicle.d_u", vehicle.d_u),
      SQ_PARAM("vehicle.d_r", vehicle.d_r),
      SQ_PARAM("vehicle.d_w", vehicle.d_w),
      SQ_PARAM("vehicle.d_q", vehicle.d_q),
      SQ_PARAM("vehicle.k_p", vehicle.k_p),
      SQ_PARAM("vehicle.k_s", vehicle.k_s),
      SQ_PARAM("vehicle.l_b", vehicle.l_b),
      SQ_PARAM("vehicle.k_theta", vehicle.k_theta),
      SQ_PARAM("vehicle.rho", vehicle.rho),
      SQ_PARAM("vehicle.g", vehicle.g),
      SQ_PARAM("vehicle.V_hull", vehicle.V_hull),
      SQ_PARAM("vehicle.m_dry", vehicle.m_dry),
      SQ_PARAM("vehicle.I_x", vehicle.I_x),
      SQ_PARAM("vehicle.roll_stiffness", vehicle.roll_stiffness),
      SQ_PARAM("vehicle.roll_damping", vehicle.roll_damping),
      SQ_PARAM("vehicle.roll_steer_gain", vehicle.roll_steer_gain),
      SQ_PARAM("actuation.capacity", actuation.capacity),
      SQ_PARAM("actuation.rate_front", actuation.rate_front),
      SQ_PARAM("actuation.rate_rear", actuation.rate_rear),
      SQ_PARAM("sensing.euler_sigma", noise.euler_sigma),
      SQ_PARAM("sensing.gyro_sigma", noise.gyro_sigma),
      SQ_PARAM("sensing.accel_sigma", noise.accel_sigma),
      SQ_PARAM("sensing.gps_sigma", noise.gps_sigma),
      SQ_PARAM("sensing.pressure_sigma_kpa", noise.pressure_sigma_kpa),
      SQ_PARAM("sensing.v0", sensor.v0),
      SQ_PARAM("sensing.slope", sensor.slope),
      SQ_PARAM("sensing.vref", sensor.vref),
      SQ_PARAM("sensing.gps_surface_threshold", sensor.gps_surface_threshold),
      SQ_PARAM("sensing.gps_period", sensor.gps_period),
      SQ_PARAM("control.dt", control.dt),
      SQ_PARAM("control.heading.kp", control.heading.kp),
      SQ_PARAM("control.heading.ki", control.heading.ki),
      SQ_PARAM("control.heading.kd", control.heading.kd),
      SQ_PARAM("control.heading.i_limit", control.heading.i_limit),
      SQ_PARAM("control.heading.out_limit", control.heading.out_limit),
      SQ_PARAM("control.heading.d_tau", control.heading.d_tau),
      SQ_PARAM("control.depth.kp", control.depth.kp),
      SQ_PARAM("control.depth.ki", control.depth.ki),
      SQ_PARAM("control.depth.kd", control.depth.kd),
      SQ_PARAM("control.depth.i_limit", control.depth.i_limit),
      SQ_PARAM("control.depth.out_limit", control.depth.out_limit),
      SQ_PARAM("control.depth.d_tau", control.depth.d_tau),
      SQ_PARAM("control.pitch.kp", control.pitch.kp),
      SQ_PARAM("control.pitch.ki", control.pitch.ki),
      SQ_PARAM("control.pitch.kd", control.pitch.kd),
      SQ_PARAM("control.pitch.i_limit", control.pitch.i_limit),
      SQ_PARAM("control.pitch.out_limit", control.pitch.out_limit),
      SQ_PARAM("control.pitch.d_tau", control.pitch.d_tau),
      SQ_PARAM("control.servo_tau", control.servo_tau),
      SQ_PARAM("control.deadband", control.deadband),
      SQ_PARAM("control.surface_trim", control.surface_trim),
      SQ_PARAM("link.rssi0", link.rssi0),
      SQ_PARAM("link.r0", link.r0),
      SQ_PARAM("link.alpha", link.alpha),
      SQ_PARAM("link.sensitivity", link.sensitivity),
      SQ_PARAM("link.shadow_sigma", link.shadow_sigma),
      SQ_PARAM("link.p_loss_floor", link.p_loss_floor),
      SQ_PARAM("link.telemetry_period", link.telemetry_period),
      SQ_PARAM("link.station_north", link.station_north),
      SQ_PARAM("link.station_east", link.station_east),
      SQ_PARAM("disturbance.roll_torque_sigma", disturbance.roll_torque_sigma),
      SQ_PARAM("disturbance.pitch_torque_sigma", disturbance.pitch_torque_sigma),
      SQ_PARAM("geo.lat0", geo.lat0),
      SQ_PARAM("geo.lon0", geo.lon0),
      SQ_PARAM("sim.physics_dt", physics_dt),
  };
  return entries;
}

#undef SQ_PARAM

const Entry& find(std::string_view key)
{
  for (const auto& e : registry())
    if (key == e.key) return e;
  throw ConfigError("unknown parameter '" + std::string(key) + "'");
}

bool is_multiple(double big, double small)
{
  const double ratio = big / small;
  return std::abs(ratio - std::round(ratio)) < 1e-9 * std::max(1.0, ratio);
}

}  // namespace

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view token)
{
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::string format_double(double value)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

const std::vector<std::string>& param_keys()
{
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : registry()) k.emplace_back(e.key);
    return k;
  }();
  return keys;
}

void set_param(SimConfig& config, std::string_view key, double value)
{
  find(key).get(config) = value;
}

double get_param(const SimConfig& config, std::string_view key)
{
  return find(key).get(const_cast<SimConfig&>(config));
}

void apply_override(SimConfig& config, std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override must be key=value: '" + std::string(assignment) + "'");
  const auto key = trim(assignment.substr(0, eq));
  const auto value = parse_double(assignment.substr(eq + 1));
  if (!value) throw ConfigError("bad number for '" + std::string(key) + "'");
  set_param(config, key, *value);
}

SimConfig parse_config(std::string_view text, SimConfig base)
{
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'name = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = parse_double(line.substr(eq + 1));
    if (!value)
      throw ConfigError("line " + std::to_string(line_no) + ": bad number for '" +
                        std::string(key) + "'");
    try {
      set_param(base, key, *value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameter file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), base);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_config(const SimConfig& config)
{
  std::string out;
  std::string_view section;
  for (const auto& e : registry()) {
    const std::string_view key = e.key;
    const auto prefix = key.substr(0, key.find('.'));
    if (prefix != section) {
      if (!section.empty()) out += '\n';
      section = prefix;
    }
    out += key;
    out += " = ";
    out += format_double(e.get(const_cast<SimConfig&>(config)));
    out += '\n';
  }
  return out;
}

void SimConfig::validate() const
{
  try {
    vehicle.validate();
    control.heading.validate();
    control.depth.validate();
    control.pitch.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(physics_dt > 0.0 && physics_dt <= 0.1))
    throw ConfigError("sim.physics_dt must be in (0, 0.1]");
  if (!(control.dt >= physics_dt) || !is_multiple(control.dt, physics_dt))
    throw ConfigError("control.dt must be an integer multiple of sim.physics_dt");
  if (!(link.telemetry_period > 0.0) || !is_multiple(link.telemetry_period, control.dt))
    throw ConfigError("link.telemetry_period must be a positive multiple of control.dt");
  if (!(sensor.gps_period > 0.0)) throw ConfigError("sensing.gps_period must be > 0");
  if (!(actuation.capacity > 0.0)) throw ConfigError("actuation.capacity must be > 0");
  if (!(actuation.rate_front > 0.0) || !(actuation.rate_rear > 0.0))
    throw ConfigError("ballast rates must be > 0");
  if (noise.euler_sigma < 0.0 || noise.gyro_sigma < 0.0 || noise.accel_sigma < 0.0 ||
      noise.gps_sigma < 0.0 || noise.pressure_sigma_kpa < 0.0)
    throw ConfigError("noise standard deviations must be >= 0");
  if (!(sensor.slope > 0.0) || !(sensor.vref > 0.0))
    throw ConfigError("pressure sensor slope and vref must be > 0");
  if (!(control.servo_tau > 0.0)) throw ConfigError("control.servo_tau must be > 0");
  if (control.deadband < 0.0) throw ConfigError("control.deadband must be >= 0");
  if (link.shadow_sigma < 0.0 || link.p_loss_floor < 0.0 || link.p_loss_floor > 1.0 ||
      !(link.r0 > 0.0) || link.alpha < 0.0)
    throw ConfigError("link parameters out of range");
  if (disturbance.roll_torque_sigma < 0.0 || disturbance.pitch_torque_sigma < 0.0)
    throw ConfigError("disturbance sigmas must be >= 0");

  double neutral = 0.0;
  try {
    neutral = neutral_fill(vehicle);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (neutral > actuation.capacity)
    throw ConfigError("neutral fill exceeds ballast cylinder capacity");
}

}  // namespace squidsim
