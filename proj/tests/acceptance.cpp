// Headless acceptance run: one PASS/FAIL line per criterion, nonzero exit
// if any fails. Tolerances are fixed here, not read from data files.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "squidsim/actuation.hpp"
#include "squidsim/calibrate.hpp"
#include "squidsim/dynamics.hpp"
#include "squidsim/link.hpp"
#include "squidsim/protocol.hpp"
#include "squidsim/simulator.hpp"

using namespace squidsim;

namespace {

const std::string kData = SQUIDSIM_DATA_DIR;

Scenario scenario(const char* name) { return load_scenario(kData + "/scenarios/" + name + ".scn"); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what)
  {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [miss]");
  }
};

std::string num(double v, int digits = 3)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// 1. Full turn on a ramped heading setpoint.
Verdict yaw_360()
{
  Verdict v;
  CalibrationTargets t;
  t.yaw = YawProbe{scenario("yaw_360"), 0.0};
  t.bounds = {{"yaw.time", {}}};
  const auto m = measure(SimConfig{}, t);
  const double time = m.at("yaw.time");
  const double rate = 360.0 / time;
  v.require(time >= 36.0 && time <= 44.0, "time " + num(time, 2) + " s in [36, 44]");
  v.require(std::abs(rate - 9.0) <= 0.9, "mean rate " + num(rate, 2) + " deg/s in 9 +/- 10%");
  v.require(m.at("yaw.roll") <= 2.0, "max |roll| " + num(m.at("yaw.roll")) + " <= 2");
  v.require(m.at("yaw.pitch") <= 1.5, "max |pitch| " + num(m.at("yaw.pitch")) + " <= 1.5");
  return v;
}

// 2. Heading step 90 -> 180 at t = 20 s.
Verdict heading_step()
{
  Verdict v;
  CalibrationTargets t;
  t.heading = HeadingStepProbe{scenario("heading_step"), 20.0, 90.0, 180.0};
  t.bounds = {{"heading.rise", {}}};
  const auto m = measure(SimConfig{}, t);
  v.require(std::abs(m.at("heading.rise") - 2.0) <= 0.5,
            "rise " + num(m.at("heading.rise")) + " s in 2 +/- 0.5");
  v.require(m.at("heading.overshoot") <= 7.0,
            "overshoot " + num(m.at("heading.overshoot"), 2) + " deg <= 7");
  v.require(m.at("heading.settling") <= 5.0,
            "settling " + num(m.at("heading.settling"), 2) + " s <= 5");
  v.require(m.at("heading.sse") < 2.0, "sse " + num(m.at("heading.sse"), 4) + " deg < 2");
  return v;
}

// 3. Depth step to 2.5 m at t = 5 s.
Verdict depth_step()
{
  Verdict v;
  CalibrationTargets t;
  t.depth = DepthStepProbe{scenario("depth_step"), 5.0, 2.5};
  t.bounds = {{"depth.reach", {}}};
  const auto m = measure(SimConfig{}, t);
  v.require(m.at("depth.reach") >= 8.0 && m.at("depth.reach") <= 10.0,
            "reached in " + num(m.at("depth.reach"), 2) + " s, in [8, 10]");
  v.require(m.at("depth.final_error") <= 0.1,
            "final 10 s |error| " + num(m.at("depth.final_error"), 4) + " m <= 0.1");
  v.require(m.at("depth.pitch") <= 3.0, "max |pitch| " + num(m.at("depth.pitch")) + " <= 3");
  return v;
}

// 4. Out-and-back sampling mission.
Verdict sampling_mission()
{
  Verdict v;
  const Scenario sc = scenario("sampling_mission");
  const SimConfig cfg = sc.resolve({});
  const RunLog log = run_scenario(sc);
  double excursion = 0.0;
  double sample_depth = 0.0;
  for (const auto& r : log.rows) {
    excursion = std::max(excursion, std::hypot(r.truth.x, r.truth.y));
    if (r.phase == MissionPhase::descend || r.phase == MissionPhase::sampling)
      sample_depth = std::max(sample_depth, r.truth.depth);
  }
  // One control period of both cylinders intaking at full rate.
  const double quantum = (cfg.actuation.rate_front + cfg.actuation.rate_rear) * cfg.control.dt;
  const double err = std::abs(log.mission.sampled - sc.mission->sample_volume);
  v.require(excursion >= 36.0 && excursion <= 44.0,
            "max excursion " + num(excursion, 2) + " m in 40 +/- 4");
  v.require(std::abs(sample_depth - 0.13) <= 0.05,
            "sampling depth " + num(sample_depth, 3) + " m in 0.13 +/- 0.05");
  v.require(err <= quantum, "sample error " + num(err * 1e6, 3) + " ml <= quantum " +
                                num(quantum * 1e6, 3) + " ml");
  v.require(log.mission.phase == MissionPhase::done,
            "final phase " + std::string(to_string(log.mission.phase)));
  return v;
}

// 5. RK4 against the closed-form surge and yaw responses.
Verdict dynamics_oracle()
{
  Verdict v;
  const VehicleParams p;
  ControlInputs in;
  in.w_p1 = 1.0;
  in.w_p2 = 1.0;
  in.w_sR = 0.6;
  in.w_sL = -0.6;
  const double u_ss = p.k_p * (in.w_p1 + in.w_p2) / p.d_u;
  const double r_ss = p.k_s * (in.w_sR - in.w_sL) / p.d_r * 180.0 / M_PI;
  const double dt = 0.01;
  VehicleState s;
  double worst = 0.0;
  for (int i = 1; i <= 3000; ++i) {
    s = step(s, p, in, dt);
    const double t = i * dt;
    const double u = u_ss * (1.0 - std::exp(-p.d_u * t / p.m_u));
    const double r = r_ss * (1.0 - std::exp(-p.d_r * t / p.I_z));
    worst = std::max({worst, std::abs(s.u - u) / std::abs(u), std::abs(s.r - r) / std::abs(r)});
  }
  std::ostringstream e;
  e << "max relative error " << worst << " < 1e-4 over 30 s at dt 0.01";
  v.require(worst < 1e-4, e.str());
  return v;
}

// 6. Telemetry codec.
Verdict codec()
{
  Verdict v;
  const std::string recorded =
      "LAT:21.027252,LON:105.851954|ACC:0.00,-0.02,0.00|EUL:214.00,-33.06,-6.75|"
      "GYR:-0.00,-0.00,0.00|Q:0.28,-0.26,0.13,0.92|VEL:0.00,0.00,0.00|DIS:193.02,42.91,0.00";
  const TelemetryPacket p = parse_telemetry(recorded);
  const bool fields = p.lat == 21.027252 && p.lon == 105.851954 &&
                      p.acc == std::array<double, 3>{0.0, -0.02, 0.0} &&
                      p.eul == std::array<double, 3>{214.0, -33.06, -6.75} &&
                      p.gyr == std::array<double, 3>{0.0, 0.0, 0.0} &&
                      p.quat == std::array<double, 4>{0.28, -0.26, 0.13, 0.92} &&
                      p.vel == std::array<double, 3>{0.0, 0.0, 0.0} &&
                      p.dis == std::array<double, 3>{193.02, 42.91, 0.0};
  v.require(fields, "recorded packet fields exact");
  v.require(encode_telemetry(p) == recorded, "re-encode byte-identical");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> val(-500.0, 500.0);
  int ok = 0;
  for (int i = 0; i < 1000; ++i) {
    TelemetryPacket q;
    q.lat = val(rng) / 6.0;
    q.lon = val(rng) / 3.0;
    for (auto* arr : {&q.acc, &q.eul, &q.gyr, &q.vel, &q.dis})
      for (auto& x : *arr) x = val(rng);
    for (auto& x : q.quat) x = val(rng) / 500.0;
    const std::string a = encode_telemetry(q);
    const TelemetryPacket back = parse_telemetry(a);
    if (back == quantize(q) && encode_telemetry(back) == a) ++ok;
  }
  v.require(ok == 1000, std::to_string(ok) + "/1000 random round trips");

  double n2 = 0.0;
  for (double x : p.quat) n2 += x * x;
  const double norm = std::sqrt(n2);
  v.require(std::abs(norm - 1.0) <= 0.03, "quaternion norm " + num(norm, 4) + " within 0.03 of 1");
  return v;
}

// 7. Ballast safety under random commands.
Verdict safety_fuzz()
{
  Verdict v;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> id(5, 6);
  std::uniform_int_distribution<int> action(0, 2);
  std::uniform_real_distribution<double> mag(0.0, 1.0);
  std::uniform_real_distribution<double> dt(1e-3, 3.0);
  ActuatorState a = make_actuators({}, 7.5e-5);
  long out_of_range = 0, late_halts = 0, limit_hits = 0;
  for (int i = 0; i < 100000; ++i) {
    a = apply_command(a, {id(rng), static_cast<MotorAction>(action(rng)), mag(rng)});
    const ActuatorState before = a;
    a = actuators_step(a, dt(rng));
    for (std::size_t k = 0; k < 2; ++k) {
      const BallastCylinder& c = a.ballast[k];
      if (c.fill < 0.0 || c.fill > c.capacity) ++out_of_range;
      if (before.ballast[k].limit == LimitLatch::none && c.limit != LimitLatch::none) {
        ++limit_hits;
        if (c.motor != BallastMotor::stopped) ++late_halts;
      }
    }
  }
  v.require(out_of_range == 0, std::to_string(out_of_range) + " fills outside [0, capacity]");
  v.require(late_halts == 0, std::to_string(limit_hits) + " limit hits, " +
                                 std::to_string(late_halts) + " not halted in the same step");
  v.require(limit_hits > 0, "limits exercised");
  return v;
}

// 8. Radio link.
Verdict link()
{
  Verdict v;
  const LinkParams p;
  const double shallow = delivery_rate_parallel(p, 2.5, p.r0, 10000, 17);
  const double deep = delivery_rate_parallel(p, 5.0, p.r0, 10000, 17);
  v.require(shallow >= 0.95, "delivery at 2.5 m " + num(shallow, 4) + " >= 0.95");
  v.require(deep <= 0.05, "delivery at 5 m " + num(deep, 4) + " <= 0.05");
  bool mono = true;
  for (double d = 0.0; d < 6.0; d += 0.1)
    mono = mono && mean_rssi(p, d + 0.1, 10.0) < mean_rssi(p, d, 10.0);
  for (double r = 1.0; r < 200.0; r += 1.0)
    mono = mono && mean_rssi(p, 0.5, r + 1.0) < mean_rssi(p, 0.5, r);
  v.require(mono, "RSSI monotone in depth and range");
  const double bench = mean_rssi(p, 0.0, 25.0);
  v.require(std::abs(bench + 58.0) <= 3.0, "surface bench " + num(bench, 2) + " dBm in -58 +/- 3");
  return v;
}

// 9. Determinism of the CSV log.
Verdict determinism()
{
  Verdict v;
  for (const char* name : {"heading_step", "sampling_mission"}) {
    const Scenario sc = scenario(name);
    const bool same = to_csv(run_scenario(sc)) == to_csv(run_scenario(sc));
    v.require(same, std::string(name) + " byte-identical");
  }
  return v;
}

}  // namespace

int main()
{
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"yaw-360 manoeuvre", yaw_360},      {"heading step", heading_step},
      {"depth step", depth_step},          {"sampling mission", sampling_mission},
      {"dynamics oracle", dynamics_oracle}, {"telemetry codec", codec},
      {"ballast safety fuzz", safety_fuzz}, {"radio link", link},
      {"determinism", determinism},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    if (!v.pass) ++failed;
    std::printf("criterion %d %s: %s (%s)\n", n, v.pass ? "PASS" : "FAIL", name,
                v.detail.str().c_str());
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
