#include "fqlsni/plant.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <string>

#include "fqlsni/errors.hpp"

namespace fqlsni {

void QuadParams::validate() const {
  const std::array<std::pair<const char*, double>, 9> positive{{
      {"m", m}, {"Ix", Ix}, {"Iy", Iy}, {"Iz", Iz}, {"Jr", Jr},
      {"Km", Km}, {"Kf", Kf}, {"L", L}, {"g", g},
  }};
  for (const auto& [name, value] : positive) {
    if (!(std::isfinite(value) && value > 0.0)) {
      throw ConfigError(std::string("quad parameter ") + name + " must be positive");
    }
  }
  for (double c : {Cdx, Cdy, Cdz, Cax, Cay, Caz}) {
    if (!(std::isfinite(c) && c >= 0.0)) throw ConfigError("drag coefficients must be non-negative");
  }
}

StateVector derivatives(const QuadState& state, const ControlMoments& u, const QuadParams& params,
                        const Eigen::Vector3d& ext_force, const Eigen::Vector3d& ext_torque) {
  const Eigen::Vector4d uv = u.as_vector();
  if (!state.q.allFinite() || !std::isfinite(state.omega_r) || !uv.allFinite() ||
      !ext_force.allFinite() || !ext_torque.allFinite()) {
    throw DomainError("derivatives: non-finite input");
  }
  return dynamics_rhs<double>(state.q, state.omega_r, uv, params, ext_force, ext_torque);
}

namespace {

Eigen::Matrix4d mixer_matrix(const QuadParams& p) {
  const double a = p.L * p.Kf;
  const double b = p.Km;
  Eigen::Matrix4d M;
  // clang-format off
  M <<  a,  a,  a,  a,
        0,  a,  0, -a,
       -a,  0,  a,  0,
        b, -b,  b, -b;
  // clang-format on
  return M;
}

}  // namespace

Eigen::Vector4d mixer_forward(const std::array<double, 4>& omega_sq, const QuadParams& params) {
  return mixer_matrix(params) * Eigen::Vector4d(omega_sq[0], omega_sq[1], omega_sq[2], omega_sq[3]);
}

RotorSpeeds mixer_inverse(const ControlMoments& u, const QuadParams& params) {
  const Eigen::Vector4d uv = u.as_vector();
  if (!uv.allFinite()) throw DomainError("mixer_inverse: non-finite moments");
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(mixer_matrix(params));
  if (!lu.isInvertible()) throw ConfigError("rotor mixer is singular (Kf, Km or L is zero)");
  const Eigen::Vector4d w2 = lu.solve(uv);

  RotorSpeeds out;
  double sign = 1.0;
  for (int i = 0; i < 4; ++i) {
    out.omega_sq[i] = std::max(0.0, w2[i]);
    out.omega_r += sign * std::sqrt(out.omega_sq[i]);
    sign = -sign;
  }
  return out;
}

ControlMoments saturate(const ControlMoments& u, const ActuatorLimits& limits) {
  auto sym = [](double v, double lim) { return std::clamp(v, -lim, lim); };
  return {std::clamp(u.U1, 0.0, limits.thrust_max), sym(u.U2, limits.moment_max),
          sym(u.U3, limits.moment_max), sym(u.U4, limits.moment_max)};
}

QuadState step(const QuadState& state, const ControlMoments& u, const QuadParams& params,
               const Disturbance& disturbance, double dt) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");

  QuadState next;
  next.omega_r = mixer_inverse(u, params).omega_r;
  const Eigen::Vector4d uv = u.as_vector();
  const auto& f = disturbance.force;
  const auto& t = disturbance.torque;
  if (!state.q.allFinite() || !uv.allFinite() || !f.allFinite() || !t.allFinite()) {
    throw DomainError("step: non-finite input");
  }
  auto rhs = [&](const StateVector& s) {
    return dynamics_rhs<double>(s, next.omega_r, uv, params, f, t);
  };

  const StateVector k1 = rhs(state.q);
  const StateVector k2 = rhs(state.q + 0.5 * dt * k1);
  const StateVector k3 = rhs(state.q + 0.5 * dt * k2);
  const StateVector k4 = rhs(state.q + dt * k3);
  next.q = state.q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  if (!next.q.allFinite()) throw DivergenceError("simulation diverged: non-finite state");
  const double tilt = std::cos(next.roll()) * std::cos(next.pitch());
  if (std::abs(tilt) < kSingularityEpsilon) {
    throw DivergenceError("simulation diverged: |cos(roll)cos(pitch)| = " + std::to_string(std::abs(tilt)));
  }
  return next;
}

double mechanical_energy(const QuadState& state, const QuadParams& params) {
  const auto& q = state.q;
  const double kinetic = 0.5 * params.m * q.segment<3>(kXDot).squaredNorm();
  const double rotational = 0.5 * (params.Ix * q[kRollRate] * q[kRollRate] +
                                   params.Iy * q[kPitchRate] * q[kPitchRate] +
                                   params.Iz * q[kYawRate] * q[kYawRate]);
  return kinetic + rotational + params.m * params.g * q[kZ];
}

}  // namespace fqlsni
