#include "fqlsni/disturbances.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "fqlsni/errors.hpp"

namespace fqlsni {

void DrydenConfig::validate() const {
  if (!((length_scales.array() > 0.0).all())) throw ConfigError("dryden: length scales must be positive");
  if (!((intensities.array() >= 0.0).all())) throw ConfigError("dryden: intensities must be non-negative");
  if (!(airspeed > 0.0)) throw ConfigError("dryden: airspeed must be positive");
  if (!(cap > 0.0)) throw ConfigError("dryden: cap must be positive");
}

DrydenGust::DrydenGust(const DrydenConfig& cfg, double dt) : cfg_(cfg) {
  cfg_.validate();
  if (!(dt > 0.0)) throw DomainError("dryden: dt must be positive");
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 0xD47u};
  rng_.seed(seq);
  for (int a = 0; a < 3; ++a) axes_[static_cast<std::size_t>(a)] = make_axis(a, dt);
}

Eigen::VectorXd DrydenGust::gaussian(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal_(rng_);
  return v;
}

DrydenGust::Axis DrydenGust::make_axis(int axis, double dt) {
  const double T = cfg_.length_scales[axis] / cfg_.airspeed;
  Eigen::MatrixXd A, B;
  Eigen::RowVectorXd C;
  if (axis == 0) {
    A = Eigen::MatrixXd::Constant(1, 1, -1.0 / T);
    B = Eigen::MatrixXd::Constant(1, 1, 1.0 / T);
    C = Eigen::RowVectorXd::Ones(1);
  } else {
    A.resize(2, 2);
    A << 0.0, 1.0, -1.0 / (T * T), -2.0 / T;
    B.resize(2, 1);
    B << 0.0, 1.0;
    C.resize(2);
    C << 1.0 / (T * T), std::sqrt(3.0) / T;
  }
  const Eigen::Index n = A.rows();

  // Van Loan: exp([[-A, BBᵀ], [0, Aᵀ]]·dt) yields Φ and the sampled noise covariance.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = -A;
  M.topRightCorner(n, n) = B * B.transpose();
  M.bottomRightCorner(n, n) = A.transpose();
  const Eigen::MatrixXd E = (M * dt).exp();
  const Eigen::MatrixXd phi = E.bottomRightCorner(n, n).transpose();
  Eigen::MatrixXd Qd = phi * E.topRightCorner(n, n);
  Qd = 0.5 * (Qd + Qd.transpose());

  // Stationary covariance: P = Φ P Φᵀ + Qd.
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n * n, n * n);
  const Eigen::MatrixXd K = I - Eigen::kroneckerProduct(phi, phi).eval();
  const Eigen::VectorXd vecP = K.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(Qd.data(), n * n));
  Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(vecP.data(), n, n);
  P = 0.5 * (P + P.transpose());

  const double variance = (C * P * C.transpose())(0, 0);
  Axis out;
  out.phi = phi;
  out.noise_factor = Qd.llt().matrixL();
  out.out = C * (cfg_.intensities[axis] / std::sqrt(variance));
  out.x = Eigen::MatrixXd(P.llt().matrixL()) * gaussian(n);
  return out;
}

Eigen::Vector3d DrydenGust::step() {
  Eigen::Vector3d wind;
  for (int a = 0; a < 3; ++a) {
    auto& ax = axes_[static_cast<std::size_t>(a)];
    wind[a] = (ax.out * ax.x)(0);
    ax.x = ax.phi * ax.x + ax.noise_factor * gaussian(ax.x.size());
  }
  last_raw_ = wind;
  return wind.cwiseMax(-cfg_.cap).cwiseMin(cfg_.cap);
}

void OneMinusCosConfig::validate() const {
  if (!(amplitude >= 0.0)) throw ConfigError("gust: amplitude must be non-negative");
  if (!(duration > 0.0)) throw ConfigError("gust: duration must be positive");
  if (axis < 0 || axis > 2) throw ConfigError("gust: axis must be x, y or z");
}

double one_minus_cos(double t, const OneMinusCosConfig& cfg) {
  const double s = t - cfg.start;
  if (s < 0.0 || s > 2.0 * cfg.duration) return 0.0;
  return 0.5 * cfg.amplitude * (1.0 - std::cos(std::numbers::pi * s / cfg.duration));
}

Disturbance wind_to_disturbance(const Eigen::Vector3d& wind, const QuadState& state, const QuadParams& params,
                                double kappa) {
  const Eigen::Vector3d drag(params.Cdx, params.Cdy, params.Cdz);
  const double ca = std::cos(state.roll()), sa = std::sin(state.roll());
  const double ct = std::cos(state.pitch()), st = std::sin(state.pitch());
  const double cp = std::cos(state.yaw()), sp = std::sin(state.yaw());
  const Eigen::Vector3d body_z(cp * st * ca + sp * sa, sp * st * ca - cp * sa, ca * ct);

  Disturbance d;
  d.force = drag.cwiseProduct(wind.cwiseProduct(wind.cwiseAbs()));
  d.torque = kappa * wind.cross(body_z);
  return d;
}

void ParamBias::validate() const {
  if (!(mass > 0.0 && Ix > 0.0 && Iy > 0.0 && Iz > 0.0)) throw ConfigError("bias factors must be positive");
}

QuadParams apply_bias(const QuadParams& params, const ParamBias& bias) {
  bias.validate();
  QuadParams out = params;
  out.m *= bias.mass;
  out.Ix *= bias.Ix;
  out.Iy *= bias.Iy;
  out.Iz *= bias.Iz;
  return out;
}

}  // namespace fqlsni
