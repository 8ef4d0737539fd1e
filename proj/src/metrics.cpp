#include "squidsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "squidsim/angles.hpp"
#include "squidsim/params.hpp"

namespace squidsim {

namespace {

// Time at which the segment [i-1, i] crosses `level`, by linear interpolation.
double crossing(const std::vector<double>& t, const std::vector<double>& y, std::size_t i,
                double level)
{
  if (i == 0) return t[0];
  const double dy = y[i] - y[i - 1];
  if (dy == 0.0) return t[i];
  return t[i - 1] + (level - y[i - 1]) / dy * (t[i] - t[i - 1]);
}

}  // namespace

StepMetrics step_metrics(const std::vector<double>& times, const std::vector<double>& values,
                         const StepSpec& spec)
{
  if (times.size() != values.size()) throw std::invalid_argument("step_metrics: length mismatch");
  if (times.size() < 2) throw std::invalid_argument("step_metrics: need at least two samples");

  // Express the response as progress along the step, so heading wrap and
  // step direction drop out: 0 at sp_before, 1 at sp_after.
  std::vector<double> y(values.size());
  double size = spec.sp_after - spec.sp_before;
  if (spec.heading) {
    size = shortest_arc(spec.sp_after, spec.sp_before);
    double prev = shortest_arc(values[0], spec.sp_before);
    y[0] = prev;
    for (std::size_t i = 1; i < values.size(); ++i) {
      prev += shortest_arc(values[i], values[i - 1]);
      y[i] = prev;
    }
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) y[i] = values[i] - spec.sp_before;
  }
  if (size == 0.0) throw std::invalid_argument("step_metrics: zero step");
  const double sgn = size > 0 ? 1.0 : -1.0;
  const double mag = std::abs(size);
  for (auto& v : y) v *= sgn;  // now a positive step of height `mag`

  const double band = spec.band >= 0 ? spec.band : (spec.heading ? 2.0 : 0.02 * mag);

  std::size_t first = 0;
  while (first < times.size() && times[first] < spec.step_time) ++first;
  if (first == times.size()) throw std::invalid_argument("step_metrics: step after end of log");

  StepMetrics m;
  const double lo = 0.1 * mag;
  const double hi = 0.9 * mag;
  double t10 = std::numeric_limits<double>::quiet_NaN();
  double t90 = t10;
  for (std::size_t i = first; i < y.size(); ++i) {
    if (std::isnan(t10) && y[i] >= lo) t10 = i == first ? times[i] : crossing(times, y, i, lo);
    if (y[i] >= hi) {
      t90 = i == first ? times[i] : crossing(times, y, i, hi);
      break;
    }
  }
  if (std::isnan(t90)) {
    m.reachable = false;
    m.settled = false;
    m.rise_time_10_90 = std::numeric_limits<double>::infinity();
    m.settling_time = std::numeric_limits<double>::infinity();
  } else {
    m.rise_time_10_90 = t90 - t10;
  }

  double peak = 0.0;
  for (std::size_t i = first; i < y.size(); ++i) peak = std::max(peak, y[i] - mag);
  m.overshoot = peak;

  if (m.reachable) {
    double last_exit = spec.step_time;
    for (std::size_t i = first; i < y.size(); ++i) {
      if (std::abs(y[i] - mag) > band) {
        last_exit = i + 1 < y.size() ? times[i + 1] : times[i];
        if (i + 1 == y.size()) m.settled = false;
      }
    }
    m.settling_time = std::max(last_exit, t90) - spec.step_time;
    if (!m.settled) m.settling_time = std::numeric_limits<double>::infinity();
  }

  const double t_end = times.back();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = first; i < y.size(); ++i) {
    if (times[i] >= t_end - spec.final_window) {
      sum += y[i];
      ++n;
    }
  }
  m.steady_state_error = n ? std::abs(sum / static_cast<double>(n) - mag) : 0.0;
  return m;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

}  // namespace

std::map<std::string, std::vector<double>> read_csv_numeric(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header row");
  const auto header = split_csv_line(line);
  std::vector<std::vector<double>> data(header.size());
  std::vector<bool> numeric(header.size(), true);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("csv: row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(header.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!numeric[i]) continue;
      const auto v = parse_double(cells[i]);
      if (v) data[i].push_back(*v);
      else numeric[i] = false;
    }
  }
  std::map<std::string, std::vector<double>> out;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (numeric[i]) out.emplace(header[i], std::move(data[i]));
  return out;
}

std::map<std::string, std::vector<double>> read_csv_numeric(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv_numeric(in);
}

}  // namespace squidsim
