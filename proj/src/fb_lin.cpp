#include "fqlsni/fb_lin.hpp"

#include <cmath>
#include <string>

#include "fqlsni/errors.hpp"

namespace fqlsni {

FlCoefficients FlCoefficients::from(const QuadParams& n) {
  return {
      (n.Iz - n.Iy) / n.Ix, n.Jr / n.Ix, (n.Ix - n.Iz) / n.Iy, n.Jr / n.Iy, (n.Iy - n.Ix) / n.Iz,
      1.0 / n.Ix,           1.0 / n.Iy,  1.0 / n.Iz,
  };
}

ControlMoments linearize(const VirtualInput& v, const QuadState& state, const QuadParams& nominal) {
  const double tilt = std::cos(state.roll()) * std::cos(state.pitch());
  if (!(std::abs(tilt) >= kSingularityEpsilon)) {
    throw SingularityError("linearize: |cos(roll)cos(pitch)| = " + std::to_string(std::abs(tilt)) +
                           " below singularity guard");
  }
  const auto c = FlCoefficients::from(nominal);
  const double ad = state.q[kRollRate];
  const double td = state.q[kPitchRate];
  const double pd = state.q[kYawRate];
  const double wr = state.omega_r;

  ControlMoments u;
  u.U1 = nominal.m / tilt * (nominal.g + v.v1);
  u.U2 = (c.k1 * td * pd + c.k2 * wr * td + v.v2) / c.h1;
  u.U3 = (c.k3 * ad * pd - c.k4 * wr * ad + v.v3) / c.h2;
  u.U4 = (c.k5 * ad * td + v.v4) / c.h3;
  return u;
}

Eigen::Matrix4d linearized_plant_dc_gain(double eps) {
  if (!(eps > 0.0)) throw DomainError("linearized_plant_dc_gain: eps must be positive");
  return Eigen::Vector4d::Constant(1.0 / eps).asDiagonal();
}

}  // namespace fqlsni
