#include "fqlsni/fql_agent.hpp"

#include <algorithm>
#include <cmath>

#include "fqlsni/errors.hpp"

namespace fqlsni {

ActionSet ActionSet::from(std::vector<double> values) {
  if (values.empty()) throw ConfigError("action set must not be empty");
  ActionSet set;
  set.consequents = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  for (Eigen::Index j = 0; j < set.size(); ++j) {
    if (set.consequents[j] == 0.0) {
      set.neutral = j;
      break;
    }
  }
  return set;
}

ActionSet ActionSet::gamma_rates() { return from({-20.0, 0.0, 20.0}); }
ActionSet ActionSet::tau_rates() { return from({-0.002, 0.0, 0.002}); }

RuleQTable RuleQTable::zeros(Eigen::Index rules, Eigen::Index actions) {
  return {Eigen::MatrixXd::Zero(rules, actions), std::vector<Eigen::Index>(static_cast<std::size_t>(rules), 0)};
}

void FqlHyperParams::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("fql: eta must lie in [0, 1]");
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("fql: sigma must lie in (0, 1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("fql: epsilon must lie in [0, 1]");
  if (!(explore_duration >= 0.0)) throw ConfigError("fql: explore_duration must be non-negative");
}

Eigen::Index greedy_action(const Eigen::Ref<const Eigen::RowVectorXd>& row, Eigen::Index preferred) {
  Eigen::Index best = (preferred >= 0 && preferred < row.size()) ? preferred : 0;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

std::vector<Eigen::Index> select_actions(const Eigen::VectorXd& w, const RuleQTable& q, double t,
                                         const FqlHyperParams& hp, Rng& rng, Eigen::Index preferred) {
  if (w.size() != q.rules()) throw DomainError("select_actions: firing strengths do not match q-table");
  std::uniform_int_distribution<Eigen::Index> pick(0, q.actions() - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const bool exploring = t < hp.explore_duration;

  std::vector<Eigen::Index> chosen(static_cast<std::size_t>(q.rules()));
  for (Eigen::Index i = 0; i < q.rules(); ++i) {
    const auto greedy = greedy_action(q.q.row(i), preferred);
    if (!(w[i] > 0.0)) {
      chosen[i] = greedy;
    } else if (exploring) {
      chosen[i] = pick(rng);
    } else {
      chosen[i] = coin(rng) < hp.epsilon ? pick(rng) : greedy;
    }
  }
  return chosen;
}

double global_action(const Eigen::VectorXd& w, const Eigen::VectorXd& chosen_consequents) {
  return defuzzify(w, chosen_consequents);
}

double global_action(const Eigen::VectorXd& w, const ActionSet& actions, std::span<const Eigen::Index> chosen) {
  if (static_cast<Eigen::Index>(chosen.size()) != w.size()) throw DomainError("global_action: one choice per rule");
  Eigen::VectorXd a(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) a[i] = actions.consequents[chosen[static_cast<std::size_t>(i)]];
  return defuzzify(w, a);
}

double q_of_state_action(const Eigen::VectorXd& w, const RuleQTable& q, std::span<const Eigen::Index> chosen) {
  if (w.size() != q.rules() || static_cast<Eigen::Index>(chosen.size()) != q.rules()) {
    throw DomainError("q_of_state_action: dimension mismatch");
  }
  Eigen::VectorXd picked(q.rules());
  for (Eigen::Index i = 0; i < q.rules(); ++i) picked[i] = q.q(i, chosen[static_cast<std::size_t>(i)]);
  return defuzzify(w, picked);
}

double max_q_of_state(const Eigen::VectorXd& w, const RuleQTable& q) {
  if (w.size() != q.rules()) throw DomainError("max_q_of_state: dimension mismatch");
  return defuzzify(w, q.q.rowwise().maxCoeff());
}

double reward(double e_next, double e_curr, double clip) {
  const double a = std::min(std::abs(e_next), clip);
  const double b = std::min(std::abs(e_curr), clip);
  return 1.0 / (1.0 + a) - 1.0 / (1.0 + b);
}

RuleQTable update(const RuleQTable& q, const Eigen::VectorXd& w_curr, const Eigen::VectorXd& w_next,
                  std::span<const Eigen::Index> chosen, double r, const FqlHyperParams& hp) {
  const double td = r + hp.sigma * max_q_of_state(w_next, q) - q_of_state_action(w_curr, q, chosen);
  const double total = w_curr.sum();

  RuleQTable out = q;
  out.chosen.assign(chosen.begin(), chosen.end());
  for (Eigen::Index i = 0; i < q.rules(); ++i) {
    if (w_curr[i] > 0.0) out.q(i, chosen[static_cast<std::size_t>(i)]) += hp.eta * td * w_curr[i] / total;
  }
  return out;
}

double discounted_return(std::span<const double> rewards, double sigma) {
  double acc = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    acc += discount * r;
    discount *= sigma;
  }
  return acc;
}

SniGains apply_gain_update(const SniGains& gains, const AgentOutputs& phi, double dt, const GainBounds& bounds) {
  SniGains out;
  out.gamma = std::clamp(gains.gamma + phi.delta_gamma * dt, bounds.gamma_min, bounds.gamma_max);
  out.tau = std::clamp(gains.tau + phi.delta_tau * dt, bounds.tau_min, bounds.tau_max);
  out.beta = out.gamma + 1.0;
  return out;
}

namespace {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace

FqlAgent::FqlAgent(RuleBase rules, ActionSet actions, FqlHyperParams hp, std::uint64_t stream)
    : rules_(std::move(rules)),
      actions_(std::move(actions)),
      hp_(hp),
      table_(RuleQTable::zeros(rules_.size(), actions_.size())),
      rng_(make_rng(hp.seed, stream)) {
  hp_.validate();
}

double FqlAgent::act(const Eigen::VectorXd& w, double t) {
  table_.chosen = select_actions(w, table_, t, hp_, rng_, actions_.neutral);
  pending_w_ = w;
  return global_action(w, actions_, table_.chosen);
}

void FqlAgent::learn(const Eigen::VectorXd& w_next, double r) {
  if (!pending_w_) return;
  table_ = update(table_, *pending_w_, w_next, table_.chosen, r, hp_);
  pending_w_.reset();
}

}  // namespace fqlsni
