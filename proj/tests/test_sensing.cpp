#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "squidsim/sensing.hpp"

using namespace squidsim;

namespace {

const NoiseSpec kQuiet{0.0, 0.0, 0.0, 0.0, 0.0};

}  // namespace

TEST_CASE("IMU at rest with zero noise reads identity")
{
  Rng rng(1);
  const IMUSample s = read_imu({}, {}, 0.02, kQuiet, rng);
  CHECK(s.euler.heading == 0.0);
  CHECK(s.euler.roll == 0.0);
  CHECK(s.euler.pitch == 0.0);
  CHECK(s.quat.x == 0.0);
  CHECK(s.quat.y == 0.0);
  CHECK(s.quat.z == 0.0);
  CHECK(s.quat.w == 1.0);
  CHECK(s.gyro == Vec3{0.0, 0.0, 0.0});
  CHECK(s.accel == Vec3{0.0, 0.0, 0.0});
}

TEST_CASE("half turn about the vertical axis")
{
  const Quaternion q = euler_to_quaternion({180.0, 0.0, 0.0});
  const double sign = q.z < 0 ? -1.0 : 1.0;
  CHECK(sign * q.z == doctest::Approx(1.0));
  CHECK(q.x == doctest::Approx(0.0));
  CHECK(q.y == doctest::Approx(0.0));
  CHECK(q.w == doctest::Approx(0.0));
}

TEST_CASE("the recorded packet quaternion is unit within two-decimal quantization")
{
  const double x = 0.28, y = -0.26, z = 0.13, w = 0.92;
  const double norm = std::sqrt(x * x + y * y + z * z + w * w);
  CHECK(norm == doctest::Approx(1.0046).epsilon(1e-4));
  CHECK(std::abs(norm - 1.0) <= 0.03);
}

TEST_CASE("quaternion to Euler recovers the Euler angles")
{
  Rng rng(5);
  std::uniform_real_distribution<double> hdg(0.0, 360.0);
  std::uniform_real_distribution<double> tilt(-85.0, 85.0);
  std::uniform_real_distribution<double> roll(-179.0, 179.0);
  for (int i = 0; i < 10000; ++i) {
    const EulerAngles e{hdg(rng), roll(rng), tilt(rng)};
    const EulerAngles back = quaternion_to_euler(euler_to_quaternion(e));
    double dh = std::abs(back.heading - e.heading);
    dh = std::min(dh, 360.0 - dh);
    REQUIRE(dh < 0.01);
    REQUIRE(std::abs(back.roll - e.roll) < 0.01);
    REQUIRE(std::abs(back.pitch - e.pitch) < 0.01);
  }
}

TEST_CASE("IMU acceleration: finite-difference surge and turning term")
{
  Rng rng(1);
  VehicleState prev, s;
  prev.u = 0.2;
  s.u = 0.3;
  s.r = 10.0;
  s.w = -0.05;
  const IMUSample m = read_imu(s, prev, 0.1, kQuiet, rng);
  CHECK(m.accel[0] == doctest::Approx(1.0));
  CHECK(m.accel[1] == doctest::Approx(0.3 * 10.0 * 3.14159265358979 / 180.0));
  CHECK(m.accel[2] == doctest::Approx(-0.5));
}

TEST_CASE("pressure chain")
{
  const SensorSpec spec;
  const PressureReading surface = pressure_chain(0.0, 1000.0, 9.81, spec);
  CHECK(surface.kpa == 0.0);
  CHECK(surface.depth_est == 0.0);

  const PressureReading r = pressure_chain(2.5, 1000.0, 9.81, spec);
  CHECK(r.kpa == doctest::Approx(24.525));
  // 0.5 + 0.025 * 24.525 = 1.113125 V; 1.113125 / 3.3 * 4095 = 1381.27
  CHECK(r.adc_counts == 1381);
  // One count is 3.3 / 4095 / 0.025 kPa = 0.03223 kPa, or 3.29 mm of water.
  const double quantum = 3.3 / 4095.0 / 0.025 * 1000.0 / (1000.0 * 9.81);
  CHECK(std::abs(r.depth_est - 2.5) <= quantum);
  CHECK(std::abs(r.depth_est - 2.5) <= 0.033);
}

TEST_CASE("pressure chain is monotone with error within one quantum")
{
  const SensorSpec spec;
  const double quantum = spec.vref / kAdcMax / spec.slope * 1000.0 / (1000.0 * 9.81);
  double prev = -1.0;
  for (int i = 0; i <= 5000; ++i) {
    const double depth = i * 0.001;
    const PressureReading r = pressure_chain(depth, 1000.0, 9.81, spec);
    REQUIRE(r.depth_est >= prev);
    REQUIRE(std::abs(r.depth_est - depth) <= quantum);
    prev = r.depth_est;
  }
  CHECK_THROWS_AS(pressure_chain(-0.1, 1000.0, 9.81, spec), std::invalid_argument);
}

TEST_CASE("GPS fixes only near the surface")
{
  Rng rng(3);
  const GeoRef ref;
  const SensorSpec spec;
  VehicleState s;
  s.depth = 2.0;
  CHECK_FALSE(gps_fix(s, ref, spec, kQuiet, rng).has_value());

  s.depth = 0.0;
  const auto origin = gps_fix(s, ref, spec, kQuiet, rng);
  REQUIRE(origin);
  CHECK(origin->lat == 21.027252);
  CHECK(origin->lon == 105.851954);

  s.x = 111.32;
  const auto north = gps_fix(s, ref, spec, kQuiet, rng);
  REQUIRE(north);
  CHECK(north->lat == doctest::Approx(21.027252 + 0.001).epsilon(1e-12));
  CHECK(north->lon == 105.851954);

  for (int i = 0; i <= 100; ++i) {
    s.depth = i * 0.005;
    CHECK(gps_fix(s, ref, spec, NoiseSpec{}, rng).has_value() == (s.depth <= 0.2));
  }
}

TEST_CASE("dead reckoning")
{
  DeadReckonState dr;
  CHECK(dead_reckon(dr, {0, 0, 0}, 0.1).vel == Vec3{0, 0, 0});
  CHECK(dead_reckon(dr, {0, 0, 0}, 0.1).disp == Vec3{0, 0, 0});

  for (int i = 0; i < 10; ++i) dr = dead_reckon(dr, {1.0, 0.0, 0.0}, 0.1);
  CHECK(dr.vel[0] == doctest::Approx(1.0));
  // 0.1 * 0.1 * (1 + 2 + ... + 10) = 0.55
  CHECK(dr.disp[0] == doctest::Approx(0.55));
  CHECK(dr.disp[1] == 0.0);
}

TEST_CASE("dead reckoning drifts under zero-mean noise")
{
  const auto mean_disp = [](int steps) {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng rng(seed);
      DeadReckonState dr;
      for (int i = 0; i < steps; ++i)
        dr = dead_reckon(dr, {gaussian(rng, 0.02), gaussian(rng, 0.02), 0.0}, 0.02);
      sum += std::hypot(dr.disp[0], dr.disp[1]);
    }
    return sum / 200.0;
  };
  const double short_run = mean_disp(500);
  const double long_run = mean_disp(5000);
  // Integrated random walk grows as t^1.5, so a 10x longer run drifts ~30x further.
  CHECK(long_run > 10.0 * short_run);
}

TEST_CASE("same seed gives identical sensor streams")
{
  Rng a(99), b(99);
  VehicleState s;
  s.heading = 45.0;
  s.u = 0.2;
  for (int i = 0; i < 1000; ++i) {
    const IMUSample x = read_imu(s, s, 0.02, NoiseSpec{}, a);
    const IMUSample y = read_imu(s, s, 0.02, NoiseSpec{}, b);
    REQUIRE(x.euler.heading == y.euler.heading);
    REQUIRE(x.accel == y.accel);
    REQUIRE(x.gyro == y.gyro);
  }
}
