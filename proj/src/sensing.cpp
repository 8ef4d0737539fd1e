#include "squidsim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "squidsim/angles.hpp"

namespace squidsim {

double gaussian(Rng& rng, double sigma)
{
  if (!(sigma > 0.0)) return 0.0;
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(rng);
}

GeoPoint local_to_geo(const GeoRef& ref, double north, double east)
{
  GeoPoint p;
  p.lat = ref.lat0 + north / kMetersPerDegree;
  p.lon = ref.lon0 + east / (kMetersPerDegree * std::cos(ref.lat0 * kDegToRad));
  return p;
}

void geo_to_local(const GeoRef& ref, const GeoPoint& p, double& north, double& east)
{
  north = (p.lat - ref.lat0) * kMetersPerDegree;
  east = (p.lon - ref.lon0) * kMetersPerDegree * std::cos(ref.lat0 * kDegToRad);
}

namespace {

void offsets(const GeoPoint& from, const GeoPoint& to, double& dn, double& de)
{
  dn = (to.lat - from.lat) * kMetersPerDegree;
  de = (to.lon - from.lon) * kMetersPerDegree * std::cos(from.lat * kDegToRad);
}

}  // namespace

double bearing(const GeoPoint& from, const GeoPoint& to)
{
  double dn = 0.0, de = 0.0;
  offsets(from, to, dn, de);
  if (dn == 0.0 && de == 0.0) return 0.0;
  return wrap_360(std::atan2(de, dn) * kRadToDeg);
}

double distance(const GeoPoint& from, const GeoPoint& to)
{
  double dn = 0.0, de = 0.0;
  offsets(from, to, dn, de);
  return std::hypot(dn, de);
}

Quaternion euler_to_quaternion(const EulerAngles& e)
{
  const double hy = 0.5 * e.heading * kDegToRad;
  const double hp = 0.5 * e.pitch * kDegToRad;
  const double hr = 0.5 * e.roll * kDegToRad;
  const double cy = std::cos(hy), sy = std::sin(hy);
  const double cp = std::cos(hp), sp = std::sin(hp);
  const double cr = std::cos(hr), sr = std::sin(hr);

  Quaternion q;
  q.w = cr * cp * cy + sr * sp * sy;
  q.x = sr * cp * cy - cr * sp * sy;
  q.y = cr * sp * cy + sr * cp * sy;
  q.z = cr * cp * sy - sr * sp * cy;
  const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  q.w /= n;
  q.x /= n;
  q.y /= n;
  q.z /= n;
  return q;
}

EulerAngles quaternion_to_euler(const Quaternion& q)
{
  EulerAngles e;
  e.roll = std::atan2(2.0 * (q.w * q.x + q.y * q.z), 1.0 - 2.0 * (q.x * q.x + q.y * q.y)) *
           kRadToDeg;
  const double s = std::clamp(2.0 * (q.w * q.y - q.z * q.x), -1.0, 1.0);
  e.pitch = std::asin(s) * kRadToDeg;
  e.heading = wrap_360(
      std::atan2(2.0 * (q.w * q.z + q.x * q.y), 1.0 - 2.0 * (q.y * q.y + q.z * q.z)) * kRadToDeg);
  return e;
}

IMUSample read_imu(const VehicleState& s, const VehicleState& prev, double dt,
                   const NoiseSpec& noise, Rng& rng)
{
  if (noise.euler_sigma < 0.0 || noise.gyro_sigma < 0.0 || noise.accel_sigma < 0.0)
    throw std::invalid_argument("noise standard deviations must be >= 0");

  IMUSample out;
  out.euler.heading = wrap_360(s.heading + gaussian(rng, noise.euler_sigma));
  out.euler.roll = s.roll + gaussian(rng, noise.euler_sigma);
  out.euler.pitch = s.pitch + gaussian(rng, noise.euler_sigma);
  out.quat = euler_to_quaternion(out.euler);

  out.gyro[0] = s.p + gaussian(rng, noise.gyro_sigma);
  out.gyro[1] = s.q + gaussian(rng, noise.gyro_sigma);
  out.gyro[2] = s.r + gaussian(rng, noise.gyro_sigma);

  const double du = dt > 0.0 ? (s.u - prev.u) / dt : 0.0;
  const double dw = dt > 0.0 ? (s.w - prev.w) / dt : 0.0;
  out.accel[0] = du + gaussian(rng, noise.accel_sigma);
  out.accel[1] = s.u * s.r * kDegToRad + gaussian(rng, noise.accel_sigma);
  out.accel[2] = dw + gaussian(rng, noise.accel_sigma);
  return out;
}

PressureReading pressure_chain(double depth, double rho, double g, const SensorSpec& sensor,
                               double kpa_noise)
{
  if (!(depth >= 0.0)) throw std::invalid_argument("pressure_chain requires depth >= 0");
  PressureReading out;
  out.kpa = rho * g * depth / 1000.0;
  const double volts = std::clamp(sensor.v0 + sensor.slope * (out.kpa + kpa_noise), 0.0, sensor.vref);
  out.adc_counts = static_cast<int>(std::lround(volts / sensor.vref * kAdcMax));
  const double quantized_volts = static_cast<double>(out.adc_counts) / kAdcMax * sensor.vref;
  // Gauge pressure cannot read below ambient; the offset voltage sits
  // between two codes, so clamp rather than report a height above water.
  const double kpa_est = std::max(0.0, (quantized_volts - sensor.v0) / sensor.slope);
  out.depth_est = kpa_est * 1000.0 / (rho * g);
  return out;
}

std::optional<GeoPoint> gps_fix(const VehicleState& s, const GeoRef& ref, const SensorSpec& sensor,
                                const NoiseSpec& noise, Rng& rng)
{
  if (s.depth > sensor.gps_surface_threshold) return std::nullopt;
  const double north = s.x + gaussian(rng, noise.gps_sigma);
  const double east = s.y + gaussian(rng, noise.gps_sigma);
  return local_to_geo(ref, north, east);
}

DeadReckonState dead_reckon(const DeadReckonState& dr, const Vec3& accel, double dt)
{
  if (!(dt > 0.0)) throw std::invalid_argument("dead_reckon requires dt > 0");
  DeadReckonState out = dr;
  for (std::size_t i = 0; i < 3; ++i) {
    out.vel[i] += accel[i] * dt;
    out.disp[i] += out.vel[i] * dt;
  }
  return out;
}

}  // namespace squidsim
