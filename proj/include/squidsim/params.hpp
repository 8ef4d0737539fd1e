#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "squidsim/actuation.hpp"
#include "squidsim/control.hpp"
#include "squidsim/dynamics.hpp"
#include "squidsim/geo.hpp"
#include "squidsim/link.hpp"
#include "squidsim/sensing.hpp"

namespace squidsim {

// Torque noise held for one control period, N m standard deviation.
struct DisturbanceParams {
  double roll_torque_sigma = 0.004;
  double pitch_torque_sigma = 0.004;
};

struct SimConfig {
  VehicleParams vehicle;
  ActuationParams actuation;
  NoiseSpec noise;
  SensorSpec sensor;
  ControlParams control;
  LinkParams link;
  DisturbanceParams disturbance;
  GeoRef geo;
  double physics_dt = 0.01;

  /// Throws ConfigError describing the first inconsistency.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every recognised key, in canonical file order.
const std::vector<std::string>& param_keys();

void set_param(SimConfig& config, std::string_view key, double value);
double get_param(const SimConfig& config, std::string_view key);

/// Applies a `key=value` override.
void apply_override(SimConfig& config, std::string_view assignment);

/// Parses `name = value` lines on top of `base`. Blank lines and `#`
/// comments are ignored; unknown keys and malformed lines are errors.
SimConfig parse_config(std::string_view text, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path, SimConfig base = {});

/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const SimConfig& config);

/// Shortest text that reads back to the same double.
std::string format_double(double value);

/// Strict double parse of the whole token; nullopt on failure.
std::optional<double> parse_double(std::string_view token);

std::string_view trim(std::string_view s);

}  // namespace squidsim
