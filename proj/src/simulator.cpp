#include "squidsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "squidsim/angles.hpp"

namespace squidsim {

namespace {

struct Column {
  const char* name;
  double (*num)(const LogRow&);
  std::string (*text)(const LogRow&);
};

double b2d(bool b) { return b ? 1.0 : 0.0; }

#define NUM(label, expr) \
  Column { label, [](const LogRow& r) -> double { return (expr); }, nullptr }
#define TXT(label, expr) \
  Column { label, nullptr, [](const LogRow& r) -> std::string { return std::string(expr); } }

const std::vector<Column>& columns()
{
  static const std::vector<Column> cols = {
      NUM("t", r.t),
      NUM("x", r.truth.x),
      NUM("y", r.truth.y),
      NUM("depth", r.truth.depth),
      NUM("heading", r.truth.heading),
      NUM("pitch", r.truth.pitch),
      NUM("roll", r.truth.roll),
      NUM("u", r.truth.u),
      NUM("r", r.truth.r),
      NUM("w", r.truth.w),
      NUM("q", r.truth.q),
      NUM("p", r.truth.p),
      NUM("imu_heading", r.imu.euler.heading),
      NUM("imu_roll", r.imu.euler.roll),
      NUM("imu_pitch", r.imu.euler.pitch),
      NUM("gyro_x", r.imu.gyro[0]),
      NUM("gyro_y", r.imu.gyro[1]),
      NUM("gyro_z", r.imu.gyro[2]),
      NUM("acc_x", r.imu.accel[0]),
      NUM("acc_y", r.imu.accel[1]),
      NUM("acc_z", r.imu.accel[2]),
      NUM("kpa", r.pressure.kpa),
      NUM("adc_counts", r.pressure.adc_counts),
      NUM("depth_est", r.pressure.depth_est),
      NUM("gps_valid", b2d(r.gps.has_value())),
      NUM("gps_lat", r.gps ? r.gps->lat : 0.0),
      NUM("gps_lon", r.gps ? r.gps->lon : 0.0),
      NUM("drive_p1", r.actuators.pump[0]),
      NUM("drive_p2", r.actuators.pump[1]),
      NUM("drive_sL", r.actuators.pump[2]),
      NUM("drive_sR", r.actuators.pump[3]),
      NUM("fill1", r.actuators.ballast[0].fill),
      NUM("fill2", r.actuators.ballast[1].fill),
      TXT("motor5", to_string(r.actuators.ballast[0].motor)),
      TXT("motor6", to_string(r.actuators.ballast[1].motor)),
      TXT("limit5", to_string(r.actuators.ballast[0].limit)),
      TXT("limit6", to_string(r.actuators.ballast[1].limit)),
      NUM("heading_hold", b2d(r.heading_hold)),
      NUM("depth_hold", b2d(r.depth_hold)),
      NUM("heading_sp", r.setpoints.heading),
      NUM("depth_sp", r.setpoints.depth),
      NUM("pitch_sp", r.setpoints.pitch),
      NUM("surge_sp", r.setpoints.surge),
      NUM("steer_cmd", r.steer_cmd),
      NUM("total_dv_target", r.total_target),
      NUM("diff_dv_target", r.diff_target),
      TXT("mission_phase", to_string(r.phase)),
      NUM("sampled", r.sampled),
      NUM("tlm_emitted", b2d(r.tlm_emitted)),
      NUM("link_delivered", b2d(r.tlm_emitted && r.link.delivered)),
      NUM("rssi", r.tlm_emitted ? r.link.rssi_dbm : 0),
      TXT("payload", r.payload),
  };
  return cols;
}

#undef NUM
#undef TXT

std::uint64_t ratio_ticks(double big, double small)
{
  return static_cast<std::uint64_t>(std::max(1.0, std::round(big / small)));
}

}  // namespace

const std::vector<std::string>& csv_columns()
{
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : columns()) n.emplace_back(c.name);
    return n;
  }();
  return names;
}

std::vector<double> RunLog::column(std::string_view name) const
{
  for (const auto& c : columns()) {
    if (name != c.name) continue;
    if (!c.num) throw std::out_of_range("column '" + std::string(name) + "' is not numeric");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(c.num(r));
    return out;
  }
  throw std::out_of_range("unknown log column '" + std::string(name) + "'");
}

std::vector<double> RunLog::times() const { return column("t"); }

void write_csv(const RunLog& log, std::ostream& out)
{
  const auto& cols = columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
  out << '\n';
  for (const auto& r : log.rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ',';
      if (cols[i].num) {
        out << format_double(cols[i].num(r));
      } else {
        const std::string s = cols[i].text(r);
        // payloads carry commas
        if (s.find(',') != std::string::npos) out << '"' << s << '"';
        else out << s;
      }
    }
    out << '\n';
  }
}

std::string to_csv(const RunLog& log)
{
  std::ostringstream ss;
  write_csv(log, ss);
  return ss.str();
}

Simulator::Simulator(SimConfig config, std::uint64_t seed, const VehicleState& initial,
                     double initial_fill_offset)
    : config_(std::move(config)),
      imu_rng_(trial_rng(seed, 1)),
      gps_rng_(trial_rng(seed, 2)),
      pressure_rng_(trial_rng(seed, 3)),
      link_rng_(trial_rng(seed, 4)),
      disturbance_rng_(trial_rng(seed, 5))
{
  config_.validate();
  neutral_ = neutral_fill(config_.vehicle);
  substeps_ = ratio_ticks(config_.control.dt, config_.physics_dt);
  gps_ticks_ = ratio_ticks(config_.sensor.gps_period, config_.control.dt);
  tlm_ticks_ = ratio_ticks(config_.link.telemetry_period, config_.control.dt);

  state_ = initial;
  state_.heading = wrap_360(state_.heading);
  state_.t = 0.0;
  prev_state_ = state_;
  actuators_ = make_actuators(config_.actuation, neutral_ + initial_fill_offset);
  setpoints_.heading = state_.heading;
}

void Simulator::set_mission_plan(const MissionPlan& plan)
{
  plan.validate(2.0 * (config_.actuation.capacity - neutral_));
  plan_ = plan;
}

void Simulator::enqueue(const Command& cmd) { queue_.push_back(cmd); }

namespace {

bool mission_in_flight(MissionPhase p)
{
  return p != MissionPhase::idle && p != MissionPhase::done && p != MissionPhase::aborted;
}

}  // namespace

void Simulator::apply(const Command& cmd)
{
  if (const auto* m = std::get_if<MotorCommand>(&cmd)) {
    if (m->motor_id == 3 || m->motor_id == 4) heading_hold_ = false;
    if (m->motor_id == 5 || m->motor_id == 6) depth_hold_ = false;
    actuators_ = apply_command(actuators_, *m);
  } else if (const auto* sp = std::get_if<SetpointCommand>(&cmd)) {
    if (sp->axis == SetpointCommand::Axis::heading) {
      if (!heading_hold_) heading_pid_ = {};
      heading_hold_ = true;
      setpoints_.heading = wrap_360(sp->value);
    } else {
      if (!depth_hold_) {
        depth_pid_ = {};
        pitch_pid_ = {};
      }
      depth_hold_ = true;
      setpoints_.depth = std::max(0.0, sp->value);
    }
  } else if (const auto* mc = std::get_if<MissionCommand>(&cmd)) {
    if (mc->action == MissionCommand::Action::start) {
      if (plan_) mission_ = mission_start(mission_, state_.t);
    } else {
      const bool was_flying = mission_in_flight(mission_.phase);
      mission_ = mission_abort(mission_, state_.t, "operator abort");
      if (was_flying) {
        // Same end state as a mission-internal abort: stop and surface.
        setpoints_.surge = 0.0;
        setpoints_.depth = 0.0;
        actuators_.pump[0] = 0.0;
        actuators_.pump[1] = 0.0;
      }
    }
  }
}

LogRow Simulator::tick()
{
  const double cdt = config_.control.dt;
  const double pdt = config_.physics_dt;
  const VehicleParams& vp = config_.vehicle;
  state_.t = static_cast<double>(tick_) * cdt;

  while (!queue_.empty()) {
    apply(queue_.front());
    queue_.pop_front();
  }

  LogRow row;
  row.t = state_.t;
  row.truth = state_;

  // Sensors
  row.imu = read_imu(state_, prev_state_, tick_ == 0 ? 0.0 : cdt, config_.noise, imu_rng_);
  row.pressure = pressure_chain(state_.depth, vp.rho, vp.g, config_.sensor,
                                gaussian(pressure_rng_, config_.noise.pressure_sigma_kpa));
  std::optional<GeoPoint> fresh_fix;
  if (tick_ % gps_ticks_ == 0) {
    fresh_fix = gps_fix(state_, config_.geo, config_.sensor, config_.noise, gps_rng_);
    if (fresh_fix) last_fix_ = fresh_fix;
  }
  row.gps = fresh_fix;
  if (tick_ > 0) dead_reckon_ = dead_reckon(dead_reckon_, row.imu.accel, cdt);

  // Mission
  BallastDirective directive = BallastDirective::depth_control;
  if (plan_ && mission_.phase != MissionPhase::idle) {
    const MissionPhase before = mission_.phase;
    MissionNav nav;
    nav.t = state_.t;
    nav.fix = fresh_fix;
    nav.depth = row.pressure.depth_est;
    for (std::size_t i = 0; i < 2; ++i) {
      nav.fill[i] = actuators_.ballast[i].fill;
      nav.capacity[i] = actuators_.ballast[i].capacity;
    }
    const MissionOutput out = mission_step(mission_, *plan_, nav);
    mission_ = out.status;
    directive = out.directive;
    if (mission_in_flight(mission_.phase) || mission_in_flight(before)) {
      if (!heading_hold_) heading_pid_ = {};
      if (!depth_hold_) {
        depth_pid_ = {};
        pitch_pid_ = {};
      }
      heading_hold_ = true;
      depth_hold_ = true;
      setpoints_.heading = out.setpoints.heading;
      setpoints_.depth = out.setpoints.depth;
      setpoints_.surge = out.setpoints.surge;
      actuators_.pump[0] = out.setpoints.surge;
      actuators_.pump[1] = out.setpoints.surge;
    }
  }

  // Heading loop
  if (heading_hold_) {
    const HeadingOutput h =
        heading_control(config_.control.heading, setpoints_.heading, row.imu.euler.heading,
                        row.imu.gyro[2], cdt, heading_pid_);
    heading_pid_ = h.state;
    const SteeringDrive d = steering_from_differential(h.differential);
    actuators_.pump[2] = d.w_sL;
    actuators_.pump[3] = d.w_sR;
    row.steer_cmd = h.differential;
  }

  // Depth and pitch loops through the ballast allocator
  if (depth_hold_) {
    const BallastCylinder& front = actuators_.ballast[0];
    const BallastCylinder& rear = actuators_.ballast[1];
    const double current_total = (front.fill - neutral_) + (rear.fill - neutral_);
    const double current_diff = front.fill - rear.fill;
    const ControlParams& cp = config_.control;

    double total_rate = 0.0;
    if (setpoints_.depth <= 0.0) {
      depth_pid_ = {};
      row.total_target = cp.surface_trim;
      total_rate = (cp.surface_trim - current_total) / cp.servo_tau;
    } else {
      const BallastDemand d = depth_control(cp.depth, setpoints_.depth, row.pressure.depth_est,
                                            current_total, cp.servo_tau, cdt, depth_pid_);
      depth_pid_ = d.state;
      row.total_target = d.target;
      total_rate = d.rate;
    }
    const BallastDemand pd = pitch_control(cp.pitch, setpoints_.pitch, row.imu.euler.pitch,
                                           row.imu.gyro[1], current_diff, cp.servo_tau, cdt,
                                           pitch_pid_);
    pitch_pid_ = pd.state;
    row.diff_target = pd.target;

    auto [c5, c6] = allocate(total_rate, pd.rate, front, rear, cp.deadband);
    if (directive == BallastDirective::intake_sample) {
      c5 = MotorCommand{5, MotorAction::forward, 1.0};
      c6 = MotorCommand{6, MotorAction::forward, 1.0};
    } else if (directive == BallastDirective::retain_sample) {
      c5 = enforce_sample_floor(c5, front, mission_.sample_floor[0], cdt);
      c6 = enforce_sample_floor(c6, rear, mission_.sample_floor[1], cdt);
    }
    actuators_ = apply_command(actuators_, c5);
    actuators_ = apply_command(actuators_, c6);
  }

  row.actuators = actuators_;
  row.heading_hold = heading_hold_;
  row.depth_hold = depth_hold_;
  row.setpoints = setpoints_;
  row.phase = mission_.phase;
  row.sampled = mission_.sampled;

  // Telemetry on a fixed sim-time cadence
  if (tick_ % tlm_ticks_ == 0) {
    TelemetryPacket pkt;
    const GeoPoint pos = last_fix_.value_or(GeoPoint{config_.geo.lat0, config_.geo.lon0});
    pkt.lat = pos.lat;
    pkt.lon = pos.lon;
    pkt.acc = row.imu.accel;
    pkt.eul = {row.imu.euler.heading, row.imu.euler.roll, row.imu.euler.pitch};
    pkt.gyr = row.imu.gyro;
    pkt.quat = {row.imu.quat.x, row.imu.quat.y, row.imu.quat.z, row.imu.quat.w};
    pkt.vel = dead_reckon_.vel;
    pkt.dis = dead_reckon_.disp;
    row.payload = encode_telemetry(pkt);
    const double range = std::hypot(state_.x - config_.link.station_north,
                                    state_.y - config_.link.station_east);
    row.link = link_transmit(config_.link, state_.depth, range, link_rng_);
    row.tlm_emitted = true;
  }

  // Physics
  const Disturbance dist{gaussian(disturbance_rng_, config_.disturbance.roll_torque_sigma),
                         gaussian(disturbance_rng_, config_.disturbance.pitch_torque_sigma)};
  prev_state_ = state_;
  for (std::uint64_t k = 0; k < substeps_; ++k) {
    const ControlInputs in = control_inputs(actuators_, neutral_);
    state_ = step(state_, vp, in, pdt, dist);
    actuators_ = actuators_step(actuators_, pdt);
  }
  ++tick_;
  state_.t = static_cast<double>(tick_) * cdt;
  return row;
}

RunLog run_scenario(const Scenario& sc, const SimConfig& base)
{
  const SimConfig cfg = sc.resolve(base);

  std::vector<std::pair<double, Command>> events;
  for (const auto& ev : sc.events) events.emplace_back(ev.t, parse_command(ev.command));
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  Simulator sim(cfg, sc.seed, sc.initial, sc.initial_fill_offset);
  if (sc.mission) sim.set_mission_plan(*sc.mission);

  RunLog log;
  log.scenario = sc.name;
  log.seed = sc.seed;
  const double cdt = cfg.control.dt;
  const auto n = static_cast<std::uint64_t>(std::llround(sc.duration / cdt));
  log.rows.reserve(n);

  std::size_t next = 0;
  std::vector<bool> ramp_done(sc.ramps.size(), false);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cdt;
    while (next < events.size() && events[next].first <= t + 1e-9) sim.enqueue(events[next++].second);
    for (std::size_t i = 0; i < sc.ramps.size(); ++i) {
      const HeadingRamp& r = sc.ramps[i];
      if (ramp_done[i] || t + 1e-9 < r.t_start) continue;
      const double frac = std::min(1.0, (t - r.t_start) / (r.t_end - r.t_start));
      sim.enqueue(SetpointCommand{SetpointCommand::Axis::heading, r.from + frac * (r.to - r.from)});
      if (frac >= 1.0) ramp_done[i] = true;
    }
    try {
      log.rows.push_back(sim.tick());
    } catch (const DynamicsError& e) {
      throw DynamicsError(std::string(e.what()) + " at t=" + format_double(t) + " in scenario '" +
                              sc.name + "'",
                          e.variable());
    }
  }
  log.mission = sim.mission();
  return log;
}

}  // namespace squidsim
