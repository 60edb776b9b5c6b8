#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <random>

#include "fqlsni/plant.hpp"

namespace fqlsni {

struct DrydenConfig {
  Eigen::Vector3d length_scales{20.0, 20.0, 5.0};  ///< [m]
  Eigen::Vector3d intensities{1.5, 1.5, 0.75};     ///< [m/s] stationary standard deviation per axis
  double airspeed = 5.0;                           ///< [m/s] converts length scales to time constants
  double cap = 5.0;                                ///< [m/s] hard clip per axis
  std::uint64_t seed = 7;

  void validate() const;
};

/// Continuous-gust generator. The x axis uses the first-order longitudinal
/// shaping filter, y and z the second-order lateral/vertical form
/// (1 + √3·T·s) / (1 + T·s)², T = L / V. Each filter is driven by unit white
/// noise, discretized exactly at dt and scaled so its stationary standard
/// deviation equals the configured intensity.
class DrydenGust {
 public:
  DrydenGust(const DrydenConfig& cfg, double dt);

  /// Advances one sample and returns the clipped wind velocity.
  Eigen::Vector3d step();

  /// The sample `step` last returned, before clipping.
  const Eigen::Vector3d& last_unclipped() const { return last_raw_; }

 private:
  struct Axis {
    Eigen::MatrixXd phi;
    Eigen::MatrixXd noise_factor;
    Eigen::RowVectorXd out;
    Eigen::VectorXd x;
  };

  Axis make_axis(int axis, double dt);
  Eigen::VectorXd gaussian(Eigen::Index n);

  DrydenConfig cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::array<Axis, 3> axes_;
  Eigen::Vector3d last_raw_ = Eigen::Vector3d::Zero();
};

struct OneMinusCosConfig {
  double amplitude = 3.0;  ///< peak V_m [m/s]
  double duration = 1.0;   ///< half-length d_m [s]
  double start = 8.0;      ///< [s]
  int axis = 1;            ///< 0 = x, 1 = y, 2 = z

  void validate() const;
};

/// (V_m/2)(1 - cos(π(t - t0)/d_m)) on [t0, t0 + 2·d_m], zero elsewhere.
double one_minus_cos(double t, const OneMinusCosConfig& cfg);

/// Quadratic drag force of the wind, diag(Cd)·w⊙|w|, and a torque
/// kappa·(w × body z-axis).
Disturbance wind_to_disturbance(const Eigen::Vector3d& wind, const QuadState& state, const QuadParams& params,
                                double kappa);

struct ParamBias {
  double mass = 1.15;
  double Ix = 1.15;
  double Iy = 1.15;
  double Iz = 1.15;

  void validate() const;
};

/// Plant-side parameters with the multiplicative bias applied.
QuadParams apply_bias(const QuadParams& params, const ParamBias& bias);

}  // namespace fqlsni
