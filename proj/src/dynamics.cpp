#include "squidsim/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "squidsim/angles.hpp"

namespace squidsim {

namespace {

constexpr std::size_t kDim = 11;
using Vec = std::array<double, kDim>;

constexpr std::array<const char*, kDim> kNames = {
    "x", "y", "depth", "heading", "pitch", "roll", "u", "r", "w", "q", "p"};

Vec pack(const VehicleState& s)
{
  return {s.x, s.y, s.depth, s.heading, s.pitch, s.roll, s.u, s.r, s.w, s.q, s.p};
}

Vec pack(const StateDerivative& d)
{
  return {d.x, d.y, d.depth, d.heading, d.pitch, d.roll, d.u, d.r, d.w, d.q, d.p};
}

VehicleState unpack(const Vec& v, double t)
{
  VehicleState s;
  s.x = v[0];
  s.y = v[1];
  s.depth = v[2];
  s.heading = v[3];
  s.pitch = v[4];
  s.roll = v[5];
  s.u = v[6];
  s.r = v[7];
  s.w = v[8];
  s.q = v[9];
  s.p = v[10];
  s.t = t;
  return s;
}

Vec axpy(const Vec& x, double a, const Vec& y)
{
  Vec out;
  for (std::size_t i = 0; i < kDim; ++i) out[i] = x[i] + a * y[i];
  return out;
}

void require_finite(double v, const char* name)
{
  if (!std::isfinite(v))
    throw DynamicsError(std::string("non-finite value for ") + name, name);
}

void require_positive(double v, const char* name)
{
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string("vehicle parameter must be positive: ") + name);
}

}  // namespace

void VehicleParams::validate() const
{
  require_positive(m_u, "m_u");
  require_positive(m_w, "m_w");
  require_positive(I_z, "I_z");
  require_positive(I_y, "I_y");
  require_positive(I_x, "I_x");
  require_positive(d_u, "d_u");
  require_positive(d_r, "d_r");
  require_positive(d_w, "d_w");
  require_positive(d_q, "d_q");
  require_positive(rho, "rho");
  require_positive(g, "g");
  require_positive(V_hull, "V_hull");
  require_positive(m_dry, "m_dry");
  require_positive(roll_damping, "roll_damping");
  if (!(k_theta >= 0.0)) throw std::invalid_argument("vehicle parameter must be >= 0: k_theta");
  if (!(l_b >= 0.0)) throw std::invalid_argument("vehicle parameter must be >= 0: l_b");
  if (!(roll_stiffness >= 0.0))
    throw std::invalid_argument("vehicle parameter must be >= 0: roll_stiffness");
  if (!std::isfinite(k_p) || !std::isfinite(k_s) || !std::isfinite(roll_steer_gain))
    throw std::invalid_argument("actuator gains must be finite");
}

ControlInputs saturate(ControlInputs in)
{
  in.w_p1 = std::clamp(in.w_p1, -1.0, 1.0);
  in.w_p2 = std::clamp(in.w_p2, -1.0, 1.0);
  in.w_sL = std::clamp(in.w_sL, -1.0, 1.0);
  in.w_sR = std::clamp(in.w_sR, -1.0, 1.0);
  return in;
}

StateDerivative derivatives(const VehicleState& s, const VehicleParams& P,
                            const ControlInputs& in, const Disturbance& dist)
{
  const Vec v = pack(s);
  for (std::size_t i = 0; i < kDim; ++i) require_finite(v[i], kNames[i]);
  require_finite(in.w_p1, "w_p1");
  require_finite(in.w_p2, "w_p2");
  require_finite(in.w_sL, "w_sL");
  require_finite(in.w_sR, "w_sR");
  require_finite(in.dV1, "dV1");
  require_finite(in.dV2, "dV2");
  require_finite(dist.roll_torque, "roll_torque");
  require_finite(dist.pitch_torque, "pitch_torque");

  const double psi = s.heading * kDegToRad;
  const double r = s.r * kDegToRad;
  const double q = s.q * kDegToRad;
  const double p = s.p * kDegToRad;
  const double theta = s.pitch * kDegToRad;
  const double phi = s.roll * kDegToRad;
  const double rho_g = P.rho * P.g;

  StateDerivative d;
  d.u = (P.k_p * (in.w_p1 + in.w_p2) - P.d_u * s.u) / P.m_u;
  d.r = (P.k_s * (in.w_sR - in.w_sL) - P.d_r * r) / P.I_z * kRadToDeg;
  d.w = (rho_g * (in.dV1 + in.dV2) - P.d_w * s.w) / P.m_w;
  d.q = (rho_g * P.l_b * (in.dV1 - in.dV2) - P.d_q * q - P.k_theta * theta + dist.pitch_torque) /
        P.I_y * kRadToDeg;
  d.p = (P.roll_steer_gain * (in.w_sR - in.w_sL) + dist.roll_torque - P.roll_damping * p -
         P.roll_stiffness * phi) /
        P.I_x * kRadToDeg;

  d.x = s.u * std::cos(psi);
  d.y = s.u * std::sin(psi);
  d.depth = s.w;
  d.heading = s.r;
  d.pitch = s.q;
  d.roll = s.p;
  return d;
}

VehicleState step(const VehicleState& s, const VehicleParams& P, const ControlInputs& raw,
                  double dt, const Disturbance& dist)
{
  if (!(dt > 0.0 && dt <= 0.1))
    throw std::invalid_argument("integration step must satisfy 0 < dt <= 0.1 s");
  const ControlInputs in = saturate(raw);

  auto f = [&](const Vec& x) { return pack(derivatives(unpack(x, s.t), P, in, dist)); };

  const Vec x0 = pack(s);
  const Vec k1 = f(x0);
  const Vec k2 = f(axpy(x0, 0.5 * dt, k1));
  const Vec k3 = f(axpy(x0, 0.5 * dt, k2));
  const Vec k4 = f(axpy(x0, dt, k3));

  Vec x1;
  for (std::size_t i = 0; i < kDim; ++i) {
    x1[i] = x0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(x1[i]))
      throw DynamicsError(std::string("numerical blow-up in ") + kNames[i], kNames[i]);
  }

  VehicleState out = unpack(x1, s.t + dt);
  out.heading = wrap_360(out.heading);
  if (out.depth < 0.0) {
    out.depth = 0.0;
    if (out.w < 0.0) out.w = 0.0;
  }
  return out;
}

double neutral_fill(const VehicleParams& P)
{
  const double displaced_mass = P.rho * P.V_hull;
  // Equality is neutral with empty cylinders.
  if (P.m_dry > displaced_mass)
    throw std::invalid_argument("vehicle negatively buoyant when empty");
  return std::max(0.0, P.V_hull - P.m_dry / P.rho);
}

double cylinder_volume(double outer_diameter, double length)
{
  const double radius = 0.5 * outer_diameter;
  return std::numbers::pi * radius * radius * length;
}

}  // namespace squidsim
