#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "squidsim/bridge.hpp"
#include "squidsim/calibrate.hpp"
#include "squidsim/metrics.hpp"
#include "squidsim/simulator.hpp"

using namespace squidsim;

namespace {

volatile std::sig_atomic_t g_stop = 0;

SimConfig base_config(const std::string& params_file, const std::vector<std::string>& overrides)
{
  SimConfig cfg = params_file.empty() ? SimConfig{} : load_config(params_file);
  for (const auto& o : overrides) apply_override(cfg, o);
  cfg.validate();
  return cfg;
}

int cmd_run(const std::string& scenario_path, const std::string& out_path,
            std::optional<std::uint64_t> seed, const std::string& params_file,
            const std::vector<std::string>& overrides)
{
  Scenario sc = load_scenario(scenario_path);
  if (seed) sc.seed = *seed;
  const RunLog log = run_scenario(sc, base_config(params_file, overrides));
  if (out_path == "-") {
    write_csv(log, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    write_csv(log, out);
  }
  std::cerr << sc.name << ": " << log.rows.size() << " rows, seed " << sc.seed << ", mission "
            << to_string(log.mission.phase) << '\n';
  return 0;
}

int cmd_metrics(const std::string& log_path, const std::string& channel, double step_time,
                std::optional<double> sp_before, std::optional<double> sp_after, double band,
                double window)
{
  const auto cols = read_csv_numeric(std::filesystem::path(log_path));
  const auto find = [&](const std::string& name) -> const std::vector<double>& {
    const auto it = cols.find(name);
    if (it == cols.end()) throw std::runtime_error("log has no numeric column '" + name + "'");
    return it->second;
  };
  const auto& t = find("t");
  const auto& y = find(channel);
  const bool heading = channel == "heading" || channel == "imu_heading";

  // Setpoints default to the logged setpoint column around the step.
  if (!sp_before || !sp_after) {
    std::string sp_col;
    if (heading) sp_col = "heading_sp";
    else if (channel == "depth" || channel == "depth_est") sp_col = "depth_sp";
    else throw std::runtime_error("--sp-before and --sp-after required for channel " + channel);
    const auto& sp = find(sp_col);
    std::size_t i = 0;
    while (i + 1 < t.size() && t[i + 1] < step_time) ++i;
    if (!sp_before) sp_before = sp[i];
    if (!sp_after) sp_after = sp.back();
  }

  StepSpec spec;
  spec.step_time = step_time;
  spec.sp_before = *sp_before;
  spec.sp_after = *sp_after;
  spec.heading = heading;
  spec.band = band;
  spec.final_window = window;
  const StepMetrics m = step_metrics(t, y, spec);
  std::cout << "channel=" << channel << '\n'
            << "sp_before=" << format_double(spec.sp_before) << '\n'
            << "sp_after=" << format_double(spec.sp_after) << '\n'
            << "rise_time_10_90=" << format_double(m.rise_time_10_90) << '\n'
            << "overshoot=" << format_double(m.overshoot) << '\n'
            << "settling_time=" << format_double(m.settling_time) << '\n'
            << "steady_state_error=" << format_double(m.steady_state_error) << '\n'
            << "reachable=" << (m.reachable ? "true" : "false") << '\n'
            << "settled=" << (m.settled ? "true" : "false") << '\n';
  return 0;
}

int cmd_calibrate(const std::string& targets_path, const std::string& params_file,
                  const std::string& out_path, bool serial)
{
  const CalibrationTargets targets = load_targets(targets_path);
  const SimConfig seed = base_config(params_file, {});
  const CalibrationResult res =
      serial ? calibrate_serial(seed, targets) : calibrate_parallel(seed, targets);
  std::cerr << format_report(res, targets);
  if (!res.success) return 2;
  const std::string text = format_config(res.config);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
  }
  return 0;
}

int cmd_serve(std::uint16_t port, double speed, const std::string& scenario_path,
              std::optional<std::uint64_t> seed, const std::string& params_file,
              const std::vector<std::string>& overrides, const std::string& bind)
{
  BridgeConfig bc;
  bc.sim = base_config(params_file, overrides);
  if (!scenario_path.empty()) {
    const Scenario sc = load_scenario(scenario_path);
    bc.sim = sc.resolve(bc.sim);
    bc.seed = sc.seed;
    bc.initial = sc.initial;
    bc.initial_fill_offset = sc.initial_fill_offset;
    bc.mission = sc.mission;
    bc.events = sc.events;
  }
  if (seed) bc.seed = *seed;
  bc.speed = speed;
  bc.port = port;
  bc.bind_address = bind;

  Bridge bridge(bc);
  bridge.start();
  std::cerr << "serving on " << bind << ":" << bridge.port() << " at " << speed << "x\n";
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  bridge.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"squid submarine digital twin"};
  app.require_subcommand(1);

  std::string scenario, out, params, log, channel, targets, bind = "127.0.0.1";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  double step_time = 0.0;
  std::optional<double> sp_before, sp_after;
  double band = -1.0;
  double window = 5.0;
  bool serial = false;
  std::uint16_t port = 8765;
  double speed = 1.0;

  auto* run = app.add_subcommand("run", "run a scenario and write the CSV log");
  run->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "CSV output path, '-' for stdout")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--param", overrides, "parameter override key=value (repeatable)");
  run->add_option("--params", params, "parameter file")->check(CLI::ExistingFile);

  auto* metrics = app.add_subcommand("metrics", "step-response metrics from a CSV log");
  metrics->add_option("--log", log, "CSV log")->required()->check(CLI::ExistingFile);
  metrics->add_option("--channel", channel, "column name")->required();
  metrics->add_option("--step-time", step_time, "step time, s")->required();
  metrics->add_option("--sp-before", sp_before, "setpoint before the step");
  metrics->add_option("--sp-after", sp_after, "setpoint after the step");
  metrics->add_option("--band", band, "settling band (default 2 deg or 2%)");
  metrics->add_option("--window", window, "steady-state window, s");

  auto* cal = app.add_subcommand("calibrate", "grid sweep until the transient targets pass");
  cal->add_option("--targets", targets, "targets file")->required()->check(CLI::ExistingFile);
  cal->add_option("--params", params, "seed parameter file")->check(CLI::ExistingFile);
  cal->add_option("--out", out, "output parameter file, '-' for stdout");
  cal->add_flag("--serial", serial, "use the serial reference search");

  auto* dump = app.add_subcommand("params", "print the effective parameter file");
  dump->add_option("--params", params, "parameter file")->check(CLI::ExistingFile);
  dump->add_option("--param", overrides, "parameter override key=value (repeatable)");

  auto* serve = app.add_subcommand("serve", "serve the live simulation to operator clients");
  serve->add_option("--port", port, "TCP port (0 picks a free port)");
  serve->add_option("--speed", speed, "sim seconds per wall second")->check(CLI::PositiveNumber);
  serve->add_option("--scenario", scenario, "scenario for config, initial state and mission")
      ->check(CLI::ExistingFile);
  serve->add_option("--seed", seed, "seed");
  serve->add_option("--params", params, "parameter file")->check(CLI::ExistingFile);
  serve->add_option("--param", overrides, "parameter override key=value (repeatable)");
  serve->add_option("--bind", bind, "bind address");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, out, seed, params, overrides);
    if (*metrics) return cmd_metrics(log, channel, step_time, sp_before, sp_after, band, window);
    if (*cal) return cmd_calibrate(targets, params, out, serial);
    if (*dump) {
      std::cout << format_config(base_config(params, overrides));
      return 0;
    }
    if (*serve) return cmd_serve(port, speed, scenario, seed, params, overrides, bind);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
