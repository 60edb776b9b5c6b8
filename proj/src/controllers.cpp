#include "fqlsni/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fqlsni/errors.hpp"

namespace fqlsni {

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kPid: return "pid";
    case ControllerKind::kSni: return "sni";
    case ControllerKind::kFuzzySni: return "fuzzy_sni";
    case ControllerKind::kFuzzyQlSni: return "fuzzy_ql_sni";
  }
  return "unknown";
}

ControllerKind parse_controller_kind(std::string_view name) {
  for (auto kind : {ControllerKind::kPid, ControllerKind::kSni, ControllerKind::kFuzzySni,
                    ControllerKind::kFuzzyQlSni}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown controller kind '" + std::string(name) + "'");
}

void PidGains::validate() const {
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd)) throw ConfigError("pid gains must be finite");
  if (!(derivative_tf >= 0.0)) throw ConfigError("pid derivative filter must be non-negative");
  if (!(integrator_limit > 0.0)) throw ConfigError("pid integrator limit must be positive");
}

PidGains ziegler_nichols_pid(double ku, double tu, double derivative_tf, double integrator_limit) {
  if (!(ku > 0.0) || !(tu > 0.0)) throw DomainError("ziegler_nichols_pid: ultimate gain and period must be positive");
  const double kp = 0.6 * ku;
  const double ti = 0.5 * tu;
  const double td = 0.125 * tu;
  return {kp, kp / ti, kp * td, derivative_tf, integrator_limit};
}

PidStepResult pid_step(const PidState& state, double e, double dt, const PidGains& gains) {
  if (!(dt > 0.0)) throw DomainError("pid_step: dt must be positive");
  PidState next = state;
  next.integral = std::clamp(state.integral + e * dt, -gains.integrator_limit, gains.integrator_limit);
  const double raw = state.primed ? (e - state.prev_error) / dt : 0.0;
  const double a = gains.derivative_tf > 0.0 ? std::exp(-dt / gains.derivative_tf) : 0.0;
  next.derivative = a * state.derivative + (1.0 - a) * raw;
  next.prev_error = e;
  next.primed = true;
  return {next, gains.kp * e + gains.ki * next.integral + gains.kd * next.derivative};
}

FuzzyGainTable FuzzyGainTable::antisymmetric() {
  FuzzyGainTable t;
  t.gamma_rates = (Eigen::VectorXd(5) << 20.0, 20.0, 0.0, -20.0, -20.0).finished();
  t.tau_rates = (Eigen::VectorXd(5) << 0.002, 0.002, 0.0, -0.002, -0.002).finished();
  return t;
}

PidController::PidController(PidGains gains) : gains_(gains) { gains_.validate(); }

double PidController::step(double error, double, double dt) {
  auto r = pid_step(state_, error, dt, gains_);
  state_ = r.state;
  return r.v;
}

SniController::SniController(SniGains gains) : gains_(gains) {}

double SniController::step(double error, double, double dt) {
  auto r = sni_step(state_, -error, gains_, dt);
  state_ = r.state;
  return r.u;
}

FuzzySniController::FuzzySniController(SniGains initial, RuleBase rules, FuzzyGainTable table, GainBounds bounds)
    : gains_(initial), rules_(std::move(rules)), table_(std::move(table)), bounds_(bounds) {
  if (table_.gamma_rates.size() != rules_.size() || table_.tau_rates.size() != rules_.size()) {
    throw ConfigError("fuzzy-SNI table needs one consequent per rule");
  }
}

AgentOutputs FuzzySniController::rates(double error) const {
  const Eigen::VectorXd w = rules_.fire(error);
  return {defuzzify(w, table_.gamma_rates), defuzzify(w, table_.tau_rates)};
}

double FuzzySniController::step(double error, double, double dt) {
  gains_ = apply_gain_update(gains_, rates(error), dt, bounds_);
  auto r = sni_step(state_, -error, gains_, dt);
  state_ = r.state;
  return r.u;
}

FuzzyQlSniController::FuzzyQlSniController(SniGains initial, RuleBase rules, FqlHyperParams hp, GainBounds bounds,
                                           std::uint64_t stream, ActionSet gamma_actions, ActionSet tau_actions)
    : gains_(initial),
      bounds_(bounds),
      gamma_agent_(rules, std::move(gamma_actions), hp, 2 * stream),
      tau_agent_(std::move(rules), std::move(tau_actions), hp, 2 * stream + 1) {}

double FuzzyQlSniController::step(double error, double t, double dt) {
  const auto& rules = gamma_agent_.rules();
  const double e = rules.clip(error);
  const Eigen::VectorXd w = rules.fire(e);

  if (prev_error_) {
    const double r = reward(e, *prev_error_);
    gamma_agent_.learn(w, r);
    tau_agent_.learn(w, r);
    last_reward_ = r;
    rewards_.push_back(r);
  }

  last_outputs_ = {gamma_agent_.act(w, t), tau_agent_.act(w, t)};
  gains_ = apply_gain_update(gains_, last_outputs_, dt, bounds_);
  prev_error_ = e;

  auto r = sni_step(state_, -error, gains_, dt);
  state_ = r.state;
  return r.u;
}

}  // namespace fqlsni
