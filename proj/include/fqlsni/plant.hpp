#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <optional>

namespace fqlsni {

template <typename Scalar>
using Vector12 = Eigen::Matrix<Scalar, 12, 1>;
using StateVector = Vector12<double>;

/// Index into the 12-dimensional rigid-body state.
enum StateIndex : int {
  kX = 0, kY, kZ,
  kRoll, kPitch, kYaw,
  kXDot, kYDot, kZDot,
  kRollRate, kPitchRate, kYawRate,
};

/// Physical constants of the vehicle. Defaults are the reference airframe
/// (0.65 kg, 0.23 m arm); drag coefficients default to zero.
struct QuadParams {
  double m = 0.65;
  double Ix = 7.5e-3;
  double Iy = 7.5e-3;
  double Iz = 1.3e-2;
  double Jr = 6e-5;
  double Km = 7.5e-7;
  double Kf = 3.13e-5;
  double L = 0.23;
  double g = 9.81;
  double Cdx = 0.0, Cdy = 0.0, Cdz = 0.0;
  double Cax = 0.0, Cay = 0.0, Caz = 0.0;

  /// Throws ConfigError unless all physical constants are positive and the
  /// drag coefficients non-negative.
  void validate() const;
};

/// Generalized coordinates, their rates, and the aggregate propeller speed
/// (alternating-sign sum of the four rotor speeds).
struct QuadState {
  StateVector q = StateVector::Zero();
  double omega_r = 0.0;

  double z() const { return q[kZ]; }
  double roll() const { return q[kRoll]; }
  double pitch() const { return q[kPitch]; }
  double yaw() const { return q[kYaw]; }
};

/// Total thrust U1 and roll/pitch/yaw moments U2..U4.
struct ControlMoments {
  double U1 = 0.0;
  double U2 = 0.0;
  double U3 = 0.0;
  double U4 = 0.0;

  Eigen::Vector4d as_vector() const { return {U1, U2, U3, U4}; }
  static ControlMoments from_vector(const Eigen::Vector4d& u) { return {u[0], u[1], u[2], u[3]}; }
};

/// External force [N] and torque [N·m] acting on the airframe.
struct Disturbance {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
};

/// Symmetric bounds on U (U1 additionally clipped at zero from below).
struct ActuatorLimits {
  double thrust_max = 20.0;
  double moment_max = 1.0;
};

struct RotorSpeeds {
  std::array<double, 4> omega_sq{};  ///< squared rotor speeds after clamping
  double omega_r = 0.0;
};

/// Right-hand side of the rigid-body model for any scalar type. Translational
/// drag is quadratic and always opposes the velocity (Cd·v·|v|).
template <typename Scalar>
Vector12<Scalar> dynamics_rhs(const Vector12<Scalar>& s, const Scalar& omega_r,
                              const Eigen::Matrix<Scalar, 4, 1>& u, const QuadParams& p,
                              const Eigen::Matrix<Scalar, 3, 1>& f_ext,
                              const Eigen::Matrix<Scalar, 3, 1>& tau_ext) {
  using std::abs;
  using std::cos;
  using std::sin;
  const Scalar ca = cos(s[kRoll]), sa = sin(s[kRoll]);
  const Scalar ct = cos(s[kPitch]), st = sin(s[kPitch]);
  const Scalar cp = cos(s[kYaw]), sp = sin(s[kYaw]);
  const Scalar& xd = s[kXDot];
  const Scalar& yd = s[kYDot];
  const Scalar& zd = s[kZDot];
  const Scalar& ad = s[kRollRate];
  const Scalar& td = s[kPitchRate];
  const Scalar& pd = s[kYawRate];

  Vector12<Scalar> d;
  d.template head<6>() = s.template tail<6>();
  d[kXDot] = ((cp * st * ca + sp * sa) * u[0] - p.Cdx * xd * abs(xd)) / p.m + f_ext[0] / p.m;
  d[kYDot] = ((sp * sa * ca - cp * sa) * u[0] - p.Cdy * yd * abs(yd)) / p.m + f_ext[1] / p.m;
  d[kZDot] = ((ca * ct) * u[0] - p.Cdz * zd * abs(zd)) / p.m - p.g + f_ext[2] / p.m;
  d[kRollRate] =
      (u[1] - p.Cax * ad - p.Jr * omega_r * td - (p.Iz - p.Iy) * td * pd) / p.Ix + tau_ext[0] / p.Ix;
  d[kPitchRate] =
      (u[2] - p.Cay * td + p.Jr * omega_r * ad - (p.Ix - p.Iz) * ad * pd) / p.Iy + tau_ext[1] / p.Iy;
  d[kYawRate] = (u[3] - p.Caz * pd - (p.Iy - p.Ix) * ad * td) / p.Iz + tau_ext[2] / p.Iz;
  return d;
}

/// State time-derivative. Throws DomainError on non-finite input.
StateVector derivatives(const QuadState& state, const ControlMoments& u, const QuadParams& params,
                        const Eigen::Vector3d& ext_force, const Eigen::Vector3d& ext_torque);

/// Forward rotor mixing: squared rotor speeds to (U1..U4).
Eigen::Vector4d mixer_forward(const std::array<double, 4>& omega_sq, const QuadParams& params);

/// Inverts the rotor mixing. Negative squared speeds are clamped to zero.
RotorSpeeds mixer_inverse(const ControlMoments& u, const QuadParams& params);

ControlMoments saturate(const ControlMoments& u, const ActuatorLimits& limits);

/// Below this |cos(roll)·cos(pitch)| the altitude inversion is rejected.
inline constexpr double kSingularityEpsilon = 1e-3;

/// One classical RK4 step of length dt. The propeller speed aggregate is
/// refreshed from `u` at the start of the step and held over it.
QuadState step(const QuadState& state, const ControlMoments& u, const QuadParams& params,
               const Disturbance& disturbance, double dt);

/// Translational plus rotational kinetic energy and potential energy.
double mechanical_energy(const QuadState& state, const QuadParams& params);

}  // namespace fqlsni
