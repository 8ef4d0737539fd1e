#pragma once

#include <stdexcept>
#include <string>

namespace squidsim {

// Coefficients of the decoupled surge/yaw/heave/pitch model plus the
// passive roll oscillator and hull/environment constants. SI units.
struct VehicleParams {
  double m_u = 8.0;       // effective surge mass, kg
  double m_w = 8.0;       // effective heave mass, kg
  double I_z = 0.3;       // yaw inertia, kg m^2
  double I_y = 0.3;       // pitch inertia, kg m^2
  double d_u = 4.0;       // N s/m
  double d_r = 0.5;       // N m s/rad
  double d_w = 1.5;       // N s/m
  double d_q = 0.5;       // N m s/rad
  double k_p = 0.6;       // N per unit drive
  double k_s = 0.2;       // N m per unit drive
  double l_b = 0.3;       // cylinder lever arm, m
  double k_theta = 0.6;   // N m/rad
  double rho = 1000.0;    // kg/m^3
  double g = 9.81;        // m/s^2
  double V_hull = 5.890486225480862e-3;  // m^3
  double m_dry = 5.8;     // kg

  // Roll is not actuated: a damped oscillator excited by steering-jet
  // reaction torque and an external disturbance torque.
  double I_x = 0.02;             // kg m^2
  double roll_stiffness = 0.6;   // N m/rad
  double roll_damping = 0.15;    // N m s/rad
  double roll_steer_gain = 0.01; // N m per unit differential steering

  /// Throws std::invalid_argument naming the first offending coefficient.
  void validate() const;
};

struct VehicleState {
  double x = 0.0;        // north, m
  double y = 0.0;        // east, m
  double depth = 0.0;    // positive down, m
  double heading = 0.0;  // deg in [0, 360)
  double pitch = 0.0;    // deg
  double roll = 0.0;     // deg
  double u = 0.0;        // surge, m/s
  double r = 0.0;        // yaw rate, deg/s
  double w = 0.0;        // heave, m/s (positive down)
  double q = 0.0;        // pitch rate, deg/s
  double p = 0.0;        // roll rate, deg/s
  double t = 0.0;        // s

  bool operator==(const VehicleState&) const = default;
};

struct ControlInputs {
  double w_p1 = 0.0;  // front propulsion drive, [-1, 1]
  double w_p2 = 0.0;  // rear propulsion drive
  double w_sL = 0.0;  // left steering drive
  double w_sR = 0.0;  // right steering drive
  double dV1 = 0.0;   // front cylinder offset from neutral fill, m^3
  double dV2 = 0.0;   // rear cylinder offset from neutral fill, m^3
};

// External torques, held constant over a step.
struct Disturbance {
  double roll_torque = 0.0;   // N m
  double pitch_torque = 0.0;  // N m
};

// Time derivatives in the units of VehicleState (deg for angles).
struct StateDerivative {
  double x = 0.0, y = 0.0, depth = 0.0;
  double heading = 0.0, pitch = 0.0, roll = 0.0;
  double u = 0.0, r = 0.0, w = 0.0, q = 0.0, p = 0.0;
};

class DynamicsError : public std::runtime_error {
 public:
  DynamicsError(const std::string& what, std::string variable)
      : std::runtime_error(what), variable_(std::move(variable)) {}
  const std::string& variable() const { return variable_; }

 private:
  std::string variable_;
};

/// Clamps pump drives to [-1, 1]. Ballast offsets pass through unchanged.
ControlInputs saturate(ControlInputs inputs);

/// Evaluates the motion model. Rejects non-finite state or input with
/// DynamicsError.
StateDerivative derivatives(const VehicleState& state, const VehicleParams& params,
                            const ControlInputs& inputs, const Disturbance& disturbance = {});

/// Advances the state by one classical RK4 step of `dt` seconds
/// (0 < dt <= 0.1). Heading is wrapped; depth is clamped at the surface
/// and upward heave zeroed on contact. Throws DynamicsError on blow-up.
VehicleState step(const VehicleState& state, const VehicleParams& params,
                  const ControlInputs& inputs, double dt, const Disturbance& disturbance = {});

/// Internal water volume that makes the vehicle neutrally buoyant.
double neutral_fill(const VehicleParams& params);

/// Displaced volume of a closed cylinder.
double cylinder_volume(double outer_diameter, double length);

}  // namespace squidsim
