#pragma once

#include <array>
#include <optional>
#include <random>

#include "squidsim/dynamics.hpp"
#include "squidsim/geo.hpp"

namespace squidsim {

using Rng = std::mt19937_64;
using Vec3 = std::array<double, 3>;

/// Zero-mean Gaussian draw; sigma <= 0 returns 0 without consuming the rng.
double gaussian(Rng& rng, double sigma);

struct NoiseSpec {
  double euler_sigma = 0.3;          // deg
  double gyro_sigma = 0.05;          // deg/s
  double accel_sigma = 0.02;         // m/s^2
  double gps_sigma = 1.5;            // m
  double pressure_sigma_kpa = 0.05;  // kPa
};

// Pressure transducer + 12-bit ADC transfer chain and GPS gating.
struct SensorSpec {
  double v0 = 0.5;       // V at 0 kPa gauge
  double slope = 0.025;  // V/kPa
  double vref = 3.3;     // ADC reference, V
  double gps_surface_threshold = 0.2;  // m
  double gps_period = 1.0;             // s
};

inline constexpr int kAdcMax = 4095;

struct Quaternion {
  double x = 0.0, y = 0.0, z = 0.0, w = 1.0;
};

struct EulerAngles {
  double heading = 0.0;  // deg, [0, 360)
  double roll = 0.0;
  double pitch = 0.0;
};

struct IMUSample {
  Vec3 accel{};  // body frame, m/s^2, gravity removed
  EulerAngles euler;
  Vec3 gyro{};   // body rates (roll, pitch, yaw), deg/s
  Quaternion quat;
};

struct PressureReading {
  double kpa = 0.0;
  int adc_counts = 0;
  double depth_est = 0.0;
};

struct DeadReckonState {
  Vec3 vel{};
  Vec3 disp{};
};

/// Z-Y-X (heading, pitch, roll) rotation as a unit quaternion.
Quaternion euler_to_quaternion(const EulerAngles& e);
EulerAngles quaternion_to_euler(const Quaternion& q);

/// IMU reading. Acceleration is the finite difference of body velocities
/// between `previous` and `state` over `dt` plus the centripetal term.
IMUSample read_imu(const VehicleState& state, const VehicleState& previous, double dt,
                   const NoiseSpec& noise, Rng& rng);

/// Hydrostatic pressure through the transducer and ADC, then back to a
/// depth estimate from the quantized counts. `kpa_noise` is added to the
/// true pressure before conversion.
PressureReading pressure_chain(double depth, double rho, double g, const SensorSpec& sensor,
                               double kpa_noise = 0.0);

/// Position fix, only while the antenna is within the surface threshold.
std::optional<GeoPoint> gps_fix(const VehicleState& state, const GeoRef& ref,
                                const SensorSpec& sensor, const NoiseSpec& noise, Rng& rng);

/// One explicit integration step of the firmware's accelerometer
/// integrator: velocity first, then displacement from the new velocity.
DeadReckonState dead_reckon(const DeadReckonState& dr, const Vec3& accel, double dt);

}  // namespace squidsim
