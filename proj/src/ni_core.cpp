#include "fqlsni/ni_core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "fqlsni/errors.hpp"

namespace fqlsni {

void GainBounds::validate() const {
  if (!(gamma_min > 0.0 && gamma_max >= gamma_min)) throw ConfigError("gain bounds: need 0 < gamma_min <= gamma_max");
  if (!(tau_min >= kTauMin && tau_max >= tau_min)) throw ConfigError("gain bounds: need 1e-3 <= tau_min <= tau_max");
}

SniStepResult sni_step(const SniState& st, double input, const SniGains& gains, double dt) {
  if (!(dt > 0.0)) throw DomainError("sni_step: dt must be positive");
  if (!(gains.tau >= kTauMin)) throw DomainError("sni_step: tau below minimum");
  const double a = std::exp(-dt / gains.tau);
  SniState next{a * st.xf + (1.0 - a) * input};
  return {next, gains.gamma * next.xf - gains.beta * input};
}

double sni_imaginary_gap(const SniGains& gains, double omega) {
  const double wt = omega * gains.tau;
  return 2.0 * gains.gamma * wt / (1.0 + wt * wt);
}

bool sni_frequency_condition(const SniGains& gains, std::span<const double> omega_grid) {
  if (omega_grid.empty()) throw DomainError("sni_frequency_condition: empty frequency grid");
  bool ok = true;
  for (double w : omega_grid) {
    if (!(w > 0.0)) throw DomainError("sni_frequency_condition: frequencies must be positive");
    ok = ok && sni_imaginary_gap(gains, w) > 0.0;
  }
  return ok;
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw DomainError("log_space: need 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return out;
}

std::vector<double> default_frequency_grid() { return log_space(1e-2, 1e4, 200); }

bool dc_gain_stability(double gamma, double beta) { return gamma - beta < 0.0; }

double max_real_eigenvalue(const Eigen::MatrixXd& p_dc, const Eigen::MatrixXd& n_dc) {
  if (p_dc.rows() != p_dc.cols() || n_dc.rows() != n_dc.cols() || p_dc.rows() != n_dc.rows()) {
    throw DomainError("lemma1_check: matrices must be square and of equal dimension");
  }
  if (p_dc.size() == 0) throw DomainError("lemma1_check: empty matrices");
  const Eigen::MatrixXd prod = p_dc * n_dc;
  if (prod.isDiagonal(0.0)) return prod.diagonal().maxCoeff();
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(prod, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw DomainError("lemma1_check: eigenvalue solver failed");
  return solver.eigenvalues().real().maxCoeff();
}

bool lemma1_check(const Eigen::MatrixXd& p_dc, const Eigen::MatrixXd& n_dc) {
  return max_real_eigenvalue(p_dc, n_dc) < 1.0;
}

Eigen::MatrixXd controller_dc_gain(std::span<const SniGains> gains) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(gains.size()));
  for (std::size_t i = 0; i < gains.size(); ++i) d[static_cast<Eigen::Index>(i)] = gains[i].gamma - gains[i].beta;
  return d.asDiagonal();
}

}  // namespace fqlsni
