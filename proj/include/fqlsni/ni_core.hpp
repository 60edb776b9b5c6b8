#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace fqlsni {

/// Gains of N(s) = gamma / (tau·s + 1) - beta.
struct SniGains {
  double gamma = 5.0;
  double tau = 0.1;
  double beta = 6.0;

  bool operator==(const SniGains&) const = default;
};

/// Box the online adaptation keeps the gains inside.
struct GainBounds {
  double gamma_min = 0.1;
  double gamma_max = 100.0;
  double tau_min = 1e-3;
  double tau_max = 1.0;

  void validate() const;
};

inline constexpr double kTauMin = 1e-3;

/// Internal state of the first-order lag of N(s).
struct SniState {
  double xf = 0.0;
};

struct SniStepResult {
  SniState state;
  double u;
};

/// Advances the controller by one sample with an exact zero-order-hold
/// discretization of the lag; the pole is recomputed from the current gains.
SniStepResult sni_step(const SniState& st, double input, const SniGains& gains, double dt);

/// j(N(jω) - N(jω)*) = 2γωτ / (1 + ω²τ²).
double sni_imaginary_gap(const SniGains& gains, double omega);

/// True iff the strict negative-imaginary inequality holds at every ω of the
/// grid. Throws DomainError on an empty grid or a non-positive frequency.
bool sni_frequency_condition(const SniGains& gains, std::span<const double> omega_grid);

/// `n` log-spaced points in [lo, hi].
std::vector<double> log_space(double lo, double hi, int n);

/// The default grid: 200 points over [1e-2, 1e4] rad/s.
std::vector<double> default_frequency_grid();

/// N(0) = gamma - beta < 0: the interconnection with the double-integrator
/// plant satisfies the DC-gain condition.
bool dc_gain_stability(double gamma, double beta);

/// Largest real part over the eigenvalues of P(0)·N(0).
double max_real_eigenvalue(const Eigen::MatrixXd& p_dc, const Eigen::MatrixXd& n_dc);

/// λ_max(P(0)·N(0)) < 1. Throws DomainError on non-square or mismatched input.
bool lemma1_check(const Eigen::MatrixXd& p_dc, const Eigen::MatrixXd& n_dc);

/// diag(gamma_i - beta_i).
Eigen::MatrixXd controller_dc_gain(std::span<const SniGains> gains);

}  // namespace fqlsni
