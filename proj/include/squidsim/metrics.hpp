#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace squidsim {

struct StepMetrics {
  double rise_time_10_90 = 0.0;  // s
  double overshoot = 0.0;        // units of the stepped variable
  double settling_time = 0.0;    // s after the step
  double steady_state_error = 0.0;
  bool reachable = true;  // false if the response never reaches 90%
  bool settled = true;    // false if the trace ends outside the band
};

struct StepSpec {
  double step_time = 0.0;
  double sp_before = 0.0;
  double sp_after = 0.0;
  bool heading = false;       // angles in degrees, compared on the shortest arc
  double band = -1.0;         // settling band; <0 picks 2 deg (heading) or 2% of the step
  double final_window = 5.0;  // s averaged at the end of the trace for the steady-state error
};

/// Step-response metrics of `values` sampled at `times` (ascending).
/// Throws std::invalid_argument on mismatched or too-short series.
StepMetrics step_metrics(const std::vector<double>& times, const std::vector<double>& values,
                         const StepSpec& spec);

/// Numeric columns of a CSV with a header row. Columns holding any
/// non-numeric cell are omitted.
std::map<std::string, std::vector<double>> read_csv_numeric(std::istream& in);
std::map<std::string, std::vector<double>> read_csv_numeric(const std::filesystem::path& path);

}  // namespace squidsim
