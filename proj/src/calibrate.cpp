#include "squidsim/calibrate.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "squidsim/angles.hpp"
#include "squidsim/metrics.hpp"
#include "squidsim/simulator.hpp"

namespace squidsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string_view> words(std::string_view s)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t j = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > j) out.push_back(s.substr(j, i - j));
  }
  return out;
}

std::vector<double> number_list(std::string_view s, std::size_t line_no)
{
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = std::min(s.find(',', start), s.size());
    const auto v = parse_double(s.substr(start, comma - start));
    if (!v) throw CalibrationError("targets line " + std::to_string(line_no) + ": bad number");
    out.push_back(*v);
    start = comma + 1;
  }
  return out;
}

double edge(std::string_view w, std::size_t line_no, double open)
{
  if (w == "-") return open;
  const auto v = parse_double(w);
  if (!v) throw CalibrationError("targets line " + std::to_string(line_no) + ": bad bound");
  return *v;
}

bool has_group(const CalibrationTargets& t, std::string_view group)
{
  return std::any_of(t.bounds.begin(), t.bounds.end(),
                     [&](const auto& b) { return b.first.starts_with(group); });
}

void measure_heading(const SimConfig& cfg, const HeadingStepProbe& p,
                     std::map<std::string, double>& out)
{
  const RunLog log = run_scenario(p.scenario, cfg);
  StepSpec spec;
  spec.step_time = p.step_time;
  spec.sp_before = p.from;
  spec.sp_after = p.to;
  spec.heading = true;
  const StepMetrics m = step_metrics(log.times(), log.column("heading"), spec);
  out["heading.rise"] = m.rise_time_10_90;
  out["heading.overshoot"] = m.overshoot;
  out["heading.settling"] = m.settling_time;
  out["heading.sse"] = m.steady_state_error;
}

void measure_depth(const SimConfig& cfg, const DepthStepProbe& p, std::map<std::string, double>& out)
{
  const RunLog log = run_scenario(p.scenario, cfg);
  double reach = kInf;
  double pitch = 0.0;
  double final_error = 0.0;
  const double t_end = log.rows.back().t;
  for (const auto& r : log.rows) {
    pitch = std::max(pitch, std::abs(r.truth.pitch));
    if (r.t < p.step_time) continue;
    const double err = std::abs(r.truth.depth - p.target);
    if (std::isinf(reach) && err <= p.reach_band) reach = r.t - p.step_time;
    if (r.t >= t_end - p.final_window) final_error = std::max(final_error, err);
  }
  out["depth.reach"] = reach;
  out["depth.final_error"] = final_error;
  out["depth.pitch"] = pitch;
}

void measure_yaw(const SimConfig& cfg, const YawProbe& p, std::map<std::string, double>& out)
{
  const RunLog log = run_scenario(p.scenario, cfg);
  double turned = 0.0;
  double done = kInf;
  double roll = 0.0;
  double pitch = 0.0;
  double prev = log.rows.front().truth.heading;
  for (const auto& r : log.rows) {
    if (r.t < p.start) {
      prev = r.truth.heading;
      continue;
    }
    turned += shortest_arc(r.truth.heading, prev);
    prev = r.truth.heading;
    if (std::isinf(done)) {
      roll = std::max(roll, std::abs(r.truth.roll));
      pitch = std::max(pitch, std::abs(r.truth.pitch));
      if (std::abs(turned) >= 360.0) done = r.t - p.start;
    }
  }
  out["yaw.time"] = done;
  out["yaw.roll"] = roll;
  out["yaw.pitch"] = pitch;
}

void fail_group(std::string_view group, std::map<std::string, double>& out)
{
  for (const auto& name : metric_names())
    if (name.starts_with(group)) out[name] = kInf;
}

double bound_margin(double v, const Bound& b)
{
  if (std::isnan(v) || std::isinf(v)) return -kInf;
  const bool lo = std::isfinite(b.min);
  const bool hi = std::isfinite(b.max);
  double scale = 1.0;
  if (lo && hi) scale = b.max - b.min;
  else if (lo) scale = std::abs(b.min);
  else if (hi) scale = std::abs(b.max);
  if (scale <= 0.0) scale = 1.0;
  double m = kInf;
  if (lo) m = std::min(m, (v - b.min) / scale);
  if (hi) m = std::min(m, (b.max - v) / scale);
  return m;
}

struct Evaluation {
  std::map<std::string, double> measured;
  double margin = -kInf;
};

Evaluation evaluate(const SimConfig& cfg, const CalibrationTargets& t)
{
  Evaluation e;
  e.measured = measure(cfg, t);
  e.margin = worst_margin(e.measured, t);
  return e;
}

CalibrationResult seed_result(const SimConfig& seed, const CalibrationTargets& t)
{
  check_feasible(t, seed);
  CalibrationResult res;
  const Evaluation e = evaluate(seed, t);
  res.config = seed;
  res.measured = e.measured;
  res.margin = e.margin;
  res.evaluated = 1;
  res.success = e.margin >= 0.0;
  return res;
}

void consider(CalibrationResult& best, const SimConfig& cfg, std::size_t index, const Evaluation& e)
{
  // Ties keep the lower index so both search orders agree.
  if (e.margin > best.margin) {
    best.config = cfg;
    best.index = index;
    best.measured = e.measured;
    best.margin = e.margin;
  }
}

}  // namespace

std::size_t CalibrationTargets::grid_size() const
{
  if (sweep.empty()) return 0;
  std::size_t n = 1;
  for (const auto& s : sweep) n *= s.second.size();
  return n;
}

const std::vector<std::string>& metric_names()
{
  static const std::vector<std::string> names = {
      "heading.rise", "heading.overshoot", "heading.settling", "heading.sse", "depth.reach",
      "depth.final_error", "depth.pitch", "yaw.time", "yaw.roll", "yaw.pitch"};
  return names;
}

CalibrationTargets parse_targets(std::string_view text, const std::filesystem::path& base_dir)
{
  CalibrationTargets t;
  std::optional<Scenario> heading_sc, depth_sc, yaw_sc;
  std::optional<std::vector<double>> heading_step, depth_step;
  double yaw_start = 0.0;

  const auto scenario_at = [&](std::string_view rel) {
    std::filesystem::path p(std::string(trim(rel)));
    if (p.is_relative()) p = base_dir / p;
    return load_scenario(p);
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "targets line " + std::to_string(line_no) + ": ";

    const auto w = words(line);
    if (w[0] == "bound") {
      if (w.size() != 4) throw CalibrationError(where + "expected 'bound <metric> <min> <max>'");
      const std::string metric(w[1]);
      const auto& names = metric_names();
      if (std::find(names.begin(), names.end(), metric) == names.end())
        throw CalibrationError(where + "unknown metric '" + metric + "'");
      Bound b{edge(w[2], line_no, -kInf), edge(w[3], line_no, kInf)};
      t.bounds.emplace_back(metric, b);
      continue;
    }
    if (w[0] == "sweep") {
      if (w.size() < 3) throw CalibrationError(where + "expected 'sweep <key> <values...>'");
      const std::string key(w[1]);
      SimConfig probe;
      try {
        (void)get_param(probe, key);
      } catch (const ConfigError& e) {
        throw CalibrationError(where + e.what());
      }
      std::vector<double> values;
      for (std::size_t i = 2; i < w.size(); ++i) {
        const auto v = parse_double(w[i]);
        if (!v) throw CalibrationError(where + "bad sweep value '" + std::string(w[i]) + "'");
        values.push_back(*v);
      }
      t.sweep.emplace_back(key, std::move(values));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw CalibrationError(where + "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "heading.scenario") heading_sc = scenario_at(value);
    else if (key == "depth.scenario") depth_sc = scenario_at(value);
    else if (key == "yaw.scenario") yaw_sc = scenario_at(value);
    else if (key == "heading.step") heading_step = number_list(value, line_no);
    else if (key == "depth.step") depth_step = number_list(value, line_no);
    else if (key == "yaw.start") yaw_start = number_list(value, line_no).at(0);
    else throw CalibrationError(where + "unknown key '" + std::string(key) + "'");
  }

  if (heading_sc) {
    if (!heading_step || heading_step->size() != 3)
      throw CalibrationError("heading.step = <time>, <from>, <to> required");
    t.heading = HeadingStepProbe{*heading_sc, (*heading_step)[0], (*heading_step)[1],
                                 (*heading_step)[2]};
  }
  if (depth_sc) {
    if (!depth_step || depth_step->size() != 2)
      throw CalibrationError("depth.step = <time>, <target> required");
    t.depth = DepthStepProbe{*depth_sc, (*depth_step)[0], (*depth_step)[1]};
  }
  if (yaw_sc) t.yaw = YawProbe{*yaw_sc, yaw_start};

  for (const auto& [metric, b] : t.bounds) {
    const bool covered = (metric.starts_with("heading.") && t.heading) ||
                         (metric.starts_with("depth.") && t.depth) ||
                         (metric.starts_with("yaw.") && t.yaw);
    if (!covered) throw CalibrationError("bound on '" + metric + "' but no probe scenario for it");
  }
  return t;
}

CalibrationTargets load_targets(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw CalibrationError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_targets(ss.str(), path.parent_path());
}

std::map<std::string, double> measure(const SimConfig& config, const CalibrationTargets& targets)
{
  std::map<std::string, double> out;
  const auto run = [&](std::string_view group, auto&& fn) {
    try {
      fn();
    } catch (const DynamicsError&) {
      fail_group(group, out);
    }
  };
  if (targets.heading && has_group(targets, "heading."))
    run("heading.", [&] { measure_heading(config, *targets.heading, out); });
  if (targets.depth && has_group(targets, "depth."))
    run("depth.", [&] { measure_depth(config, *targets.depth, out); });
  if (targets.yaw && has_group(targets, "yaw."))
    run("yaw.", [&] { measure_yaw(config, *targets.yaw, out); });
  return out;
}

double worst_margin(const std::map<std::string, double>& measured,
                    const CalibrationTargets& targets)
{
  double m = kInf;
  for (const auto& [metric, b] : targets.bounds) {
    const auto it = measured.find(metric);
    m = std::min(m, it == measured.end() ? -kInf : bound_margin(it->second, b));
  }
  return m;
}

void check_feasible(const CalibrationTargets& targets, const SimConfig& seed)
{
  if (targets.bounds.empty()) throw CalibrationError("no bounds given");
  for (const auto& [metric, b] : targets.bounds) {
    if (b.min > b.max) throw CalibrationError("infeasible: " + metric + " min exceeds max");
    const bool is_time = metric == "heading.rise" || metric == "heading.settling" ||
                         metric == "depth.reach" || metric == "yaw.time";
    double dt = seed.physics_dt;
    if (metric == "heading.rise" && targets.heading && targets.heading->scenario.physics_dt)
      dt = *targets.heading->scenario.physics_dt;
    // A step below one integration step cannot be resolved; zero-time
    // responses only arise from an instantaneous trace.
    if (is_time && b.max < dt)
      throw CalibrationError("infeasible: " + metric + " max " + format_double(b.max) +
                             " s is below the physics step " + format_double(dt) + " s");
    if (b.max < 0.0) throw CalibrationError("infeasible: " + metric + " max is negative");
  }
  for (const auto& [key, values] : targets.sweep)
    if (values.empty()) throw CalibrationError("sweep over '" + key + "' has no values");
}

SimConfig grid_config(const SimConfig& seed, const CalibrationTargets& targets, std::size_t index)
{
  SimConfig cfg = seed;
  for (std::size_t k = targets.sweep.size(); k-- > 0;) {
    const auto& [key, values] = targets.sweep[k];
    set_param(cfg, key, values[index % values.size()]);
    index /= values.size();
  }
  return cfg;
}

CalibrationResult calibrate_serial(const SimConfig& seed, const CalibrationTargets& targets)
{
  CalibrationResult best = seed_result(seed, targets);
  if (best.success) return best;
  const std::size_t n = targets.grid_size();
  for (std::size_t i = 0; i < n; ++i) {
    const SimConfig cfg = grid_config(seed, targets, i);
    Evaluation e;
    try {
      cfg.validate();
      e = evaluate(cfg, targets);
    } catch (const ConfigError&) {
    }
    ++best.evaluated;
    consider(best, cfg, i, e);
    if (e.margin >= 0.0) {
      best.config = cfg;
      best.index = i;
      best.measured = e.measured;
      best.margin = e.margin;
      best.success = true;
      return best;
    }
  }
  return best;
}

CalibrationResult calibrate_parallel(const SimConfig& seed, const CalibrationTargets& targets)
{
  CalibrationResult best = seed_result(seed, targets);
  if (best.success) return best;
  const std::size_t n = targets.grid_size();
  const std::size_t batch = static_cast<std::size_t>(std::max(1, omp_get_max_threads())) * 4;

  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t count = std::min(batch, n - start);
    std::vector<Evaluation> evals(count);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(count); ++j) {
      const SimConfig cfg = grid_config(seed, targets, start + static_cast<std::size_t>(j));
      try {
        cfg.validate();
        evals[static_cast<std::size_t>(j)] = evaluate(cfg, targets);
      } catch (const ConfigError&) {
      }
    }
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t i = start + j;
      ++best.evaluated;
      const SimConfig cfg = grid_config(seed, targets, i);
      consider(best, cfg, i, evals[j]);
      if (evals[j].margin >= 0.0) {
        best.config = cfg;
        best.index = i;
        best.measured = evals[j].measured;
        best.margin = evals[j].margin;
        best.success = true;
        return best;
      }
    }
  }
  return best;
}

std::string format_report(const CalibrationResult& result, const CalibrationTargets& targets)
{
  std::ostringstream out;
  out << (result.success ? "PASS" : "FAIL: search exhausted, nearest miss below") << '\n';
  out << "configuration: " << (result.index ? "grid point " + std::to_string(*result.index) : "seed")
      << " (" << result.evaluated << " evaluated)\n";
  for (const auto& [key, values] : targets.sweep)
    out << "  " << key << " = " << format_double(get_param(result.config, key)) << '\n';
  out << "worst margin: " << format_double(result.margin) << '\n';
  for (const auto& [metric, b] : targets.bounds) {
    const auto it = result.measured.find(metric);
    const double v = it == result.measured.end() ? std::nan("") : it->second;
    const double m = bound_margin(v, b);
    out << "  " << metric << " = " << format_double(v) << "  in [" << format_double(b.min) << ", "
        << format_double(b.max) << "]  margin " << format_double(m) << (m >= 0 ? "" : "  VIOLATED")
        << '\n';
  }
  return out.str();
}

}  // namespace squidsim
