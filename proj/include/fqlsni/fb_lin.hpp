#pragma once

#include <Eigen/Core>

#include "fqlsni/plant.hpp"

namespace fqlsni {

/// Commanded accelerations of the linearized channels: v1 altitude [m/s²],
/// v2..v4 roll/pitch/yaw [rad/s²].
struct VirtualInput {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  double v4 = 0.0;

  Eigen::Vector4d as_vector() const { return {v1, v2, v3, v4}; }
  static VirtualInput from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
};

/// Inertia ratios used by the inverting law, computed from the nominal
/// parameter set.
struct FlCoefficients {
  double k1, k2, k3, k4, k5;
  double h1, h2, h3;

  static FlCoefficients from(const QuadParams& nominal);
};

/// Dynamic-inversion law mapping v to control moments so that, with matched
/// parameters and no drag, (z̈, α̈, θ̈, ψ̈) = v. Throws SingularityError when
/// |cos(roll)·cos(pitch)| < kSingularityEpsilon.
ControlMoments linearize(const VirtualInput& v, const QuadState& state, const QuadParams& nominal);

/// Zero-frequency surrogate of the four decoupled double integrators,
/// diag(1/eps). Throws DomainError for eps <= 0.
Eigen::Matrix4d linearized_plant_dc_gain(double eps);

}  // namespace fqlsni
