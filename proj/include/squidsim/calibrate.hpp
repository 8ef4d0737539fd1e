#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "squidsim/params.hpp"
#include "squidsim/scenario.hpp"

namespace squidsim {

struct Bound {
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
};

struct HeadingStepProbe {
  Scenario scenario;
  double step_time = 0.0;
  double from = 0.0;
  double to = 0.0;
};

struct DepthStepProbe {
  Scenario scenario;
  double step_time = 0.0;
  double target = 0.0;
  double reach_band = 0.1;    // m
  double final_window = 10.0; // s
};

struct YawProbe {
  Scenario scenario;
  double start = 0.0;  // s, when the sweep begins
};

// Targets file, line oriented:
//
//   heading.scenario = scenarios/heading_step.scn   # relative to the file
//   heading.step = 20, 90, 180                      # time, from, to
//   depth.scenario = ...    depth.step = 5, 2.5
//   yaw.scenario = ...      yaw.start = 0
//   bound <metric> <min> <max>                      # '-' for open
//   sweep <param key> <v1> <v2> ...
//
// Metrics: heading.rise heading.overshoot heading.settling heading.sse
//          depth.reach depth.final_error depth.pitch
//          yaw.time yaw.roll yaw.pitch
struct CalibrationTargets {
  std::optional<HeadingStepProbe> heading;
  std::optional<DepthStepProbe> depth;
  std::optional<YawProbe> yaw;
  std::vector<std::pair<std::string, Bound>> bounds;
  std::vector<std::pair<std::string, std::vector<double>>> sweep;

  std::size_t grid_size() const;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CalibrationTargets parse_targets(std::string_view text,
                                 const std::filesystem::path& base_dir = {});
CalibrationTargets load_targets(const std::filesystem::path& path);

const std::vector<std::string>& metric_names();

/// Runs the probes named by the bounds and returns every metric they yield.
/// A run that blows up yields +inf for all of its metrics.
std::map<std::string, double> measure(const SimConfig& config, const CalibrationTargets& targets);

/// Smallest signed distance to a bound edge, scaled by the bound width
/// (or by |edge| for one-sided bounds). Negative means violated.
double worst_margin(const std::map<std::string, double>& measured,
                    const CalibrationTargets& targets);

/// Throws CalibrationError for targets no configuration can meet.
void check_feasible(const CalibrationTargets& targets, const SimConfig& seed);

/// Grid point `index` applied on top of `seed`; the first sweep key varies slowest.
SimConfig grid_config(const SimConfig& seed, const CalibrationTargets& targets,
                      std::size_t index);

struct CalibrationResult {
  bool success = false;
  SimConfig config;                  // passing config, or the nearest miss
  std::optional<std::size_t> index;  // grid index; empty for the seed config
  std::map<std::string, double> measured;
  double margin = 0.0;
  std::size_t evaluated = 0;
};

/// Seed config first, then the grid in index order; returns the first pass.
CalibrationResult calibrate_serial(const SimConfig& seed, const CalibrationTargets& targets);

/// Same search with grid points evaluated in parallel batches; returns the
/// same configuration as calibrate_serial.
CalibrationResult calibrate_parallel(const SimConfig& seed, const CalibrationTargets& targets);

std::string format_report(const CalibrationResult& result, const CalibrationTargets& targets);

}  // namespace squidsim
