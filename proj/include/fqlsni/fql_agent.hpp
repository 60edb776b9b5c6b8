#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fqlsni/fuzzy.hpp"
#include "fqlsni/ni_core.hpp"

namespace fqlsni {

using Rng = std::mt19937_64;

/// Competing singleton consequents shared by every rule of one output
/// variable. `neutral` indexes the zero-change action; it wins argmax ties.
struct ActionSet {
  Eigen::VectorXd consequents;
  Eigen::Index neutral = -1;

  /// {-20, 0, 20}
  static ActionSet gamma_rates();
  /// {-0.002, 0, 0.002}
  static ActionSet tau_rates();
  static ActionSet from(std::vector<double> values);

  Eigen::Index size() const { return consequents.size(); }
};

/// q[i, j]: value of action j in rule i. `chosen[i]` is the action the last
/// selection picked for rule i.
struct RuleQTable {
  Eigen::MatrixXd q;
  std::vector<Eigen::Index> chosen;

  static RuleQTable zeros(Eigen::Index rules, Eigen::Index actions);
  Eigen::Index rules() const { return q.rows(); }
  Eigen::Index actions() const { return q.cols(); }
};

struct FqlHyperParams {
  double eta = 0.1;               ///< learning rate
  double sigma = 0.7;             ///< discount factor
  double explore_duration = 0.7;  ///< [s] of uniformly random actions at start
  double epsilon = 0.01;          ///< exploration probability afterwards
  std::uint64_t seed = 42;

  /// Throws ConfigError. eta = 0 is accepted so that learning can be frozen.
  void validate() const;
};

/// Rate outputs of one channel's pair of agents.
struct AgentOutputs {
  double delta_gamma = 0.0;
  double delta_tau = 0.0;
};

/// Argmax of a q row; ties go to `preferred` when it is among the maxima,
/// otherwise to the lowest index.
Eigen::Index greedy_action(const Eigen::Ref<const Eigen::RowVectorXd>& row, Eigen::Index preferred = -1);

/// Uniformly random actions while t < explore_duration, per-rule epsilon-greedy
/// afterwards. Rules with zero firing strength keep the greedy choice.
std::vector<Eigen::Index> select_actions(const Eigen::VectorXd& w, const RuleQTable& q, double t,
                                         const FqlHyperParams& hp, Rng& rng, Eigen::Index preferred = -1);

/// Firing-strength-weighted average of the chosen consequents.
double global_action(const Eigen::VectorXd& w, const Eigen::VectorXd& chosen_consequents);
double global_action(const Eigen::VectorXd& w, const ActionSet& actions, std::span<const Eigen::Index> chosen);

/// Q(ζ, a): weighted average of the chosen actions' q-values.
double q_of_state_action(const Eigen::VectorXd& w, const RuleQTable& q, std::span<const Eigen::Index> chosen);

/// max_a Q(ζ, a): weighted average of per-rule row maxima.
double max_q_of_state(const Eigen::VectorXd& w, const RuleQTable& q);

/// 1/(1+|e_next|) - 1/(1+|e_curr|) with both errors clipped to ±clip.
double reward(double e_next, double e_curr, double clip = 2.0);

/// Temporal-difference step: each fired rule's chosen entry moves by
/// eta·ΔQ·w_i/Σw where ΔQ = R + sigma·max_a Q(next) - Q(current).
RuleQTable update(const RuleQTable& q, const Eigen::VectorXd& w_curr, const Eigen::VectorXd& w_next,
                  std::span<const Eigen::Index> chosen, double r, const FqlHyperParams& hp);

/// Σ_k sigma^k · R_k.
double discounted_return(std::span<const double> rewards, double sigma);

/// Integrates the rate outputs over dt, clamps into the box and re-derives
/// beta = gamma + 1.
SniGains apply_gain_update(const SniGains& gains, const AgentOutputs& phi, double dt,
                           const GainBounds& bounds = {});

/// One fuzzy Q-learning agent for a single output variable: a rule base, a
/// set of competing actions and the q-table, plus the transition awaiting its
/// reward.
class FqlAgent {
 public:
  FqlAgent(RuleBase rules, ActionSet actions, FqlHyperParams hp, std::uint64_t stream);

  /// Selects an action per rule and returns the global action for firing
  /// strengths `w`. The selection is remembered until `learn` is called.
  double act(const Eigen::VectorXd& w, double t);

  /// Applies the q-update for the remembered selection. No-op before the first
  /// `act`.
  void learn(const Eigen::VectorXd& w_next, double r);

  const RuleQTable& table() const { return table_; }
  const RuleBase& rules() const { return rules_; }
  const ActionSet& actions() const { return actions_; }
  const FqlHyperParams& hyper_params() const { return hp_; }

 private:
  RuleBase rules_;
  ActionSet actions_;
  FqlHyperParams hp_;
  RuleQTable table_;
  Rng rng_;
  std::optional<Eigen::VectorXd> pending_w_;
};

}  // namespace fqlsni
