#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "fqlsni/fql_agent.hpp"
#include "fqlsni/fuzzy.hpp"
#include "fqlsni/ni_core.hpp"

namespace fqlsni {

/// Tracked channels, in the order of the virtual input v1..v4.
enum class Channel : int { kZ = 0, kRoll = 1, kPitch = 2, kYaw = 3 };
inline constexpr std::array<Channel, 4> kChannels{Channel::kZ, Channel::kRoll, Channel::kPitch, Channel::kYaw};
inline constexpr std::array<std::string_view, 4> kChannelNames{"z", "roll", "pitch", "yaw"};

constexpr int index(Channel c) { return static_cast<int>(c); }

enum class ControllerKind { kPid, kSni, kFuzzySni, kFuzzyQlSni };

std::string_view to_string(ControllerKind kind);
/// Accepts pid, sni, fuzzy_sni, fuzzy_ql_sni. Throws ConfigError.
ControllerKind parse_controller_kind(std::string_view name);

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double derivative_tf = 0.0;      ///< [s] first-order derivative filter, 0 disables
  double integrator_limit = 1.0;   ///< bound on the accumulated ∫e dt

  void validate() const;
};

/// Classic Ziegler–Nichols PID row from an ultimate gain and period:
/// Kp = 0.6·Ku, Ti = Tu/2, Td = Tu/8.
PidGains ziegler_nichols_pid(double ku, double tu, double derivative_tf = 0.05, double integrator_limit = 10.0);

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  double derivative = 0.0;
  bool primed = false;
};

struct PidStepResult {
  PidState state;
  double v;
};

/// Parallel PID with filtered derivative and a clamped integrator. The first
/// sample produces no derivative kick.
PidStepResult pid_step(const PidState& state, double e, double dt, const PidGains& gains);

/// Expert consequents of the non-learning fuzzy gain scheduler, one entry per
/// rule, for each of the two rate outputs.
struct FuzzyGainTable {
  Eigen::VectorXd gamma_rates;
  Eigen::VectorXd tau_rates;

  /// Antisymmetric NB..PB table: {+20, +20, 0, -20, -20} and the same pattern
  /// scaled to ±0.002 for tau.
  static FuzzyGainTable antisymmetric();
};

/// Single-channel tracking controller. All kinds share this interface so the
/// closed loop can swap them by configuration.
class ChannelController {
 public:
  virtual ~ChannelController() = default;

  /// `error` is reference minus measurement; returns the channel's virtual
  /// acceleration command.
  virtual double step(double error, double t, double dt) = 0;

  virtual ControllerKind kind() const = 0;
  /// Current SNI gains, if this kind has any.
  virtual std::optional<SniGains> gains() const { return std::nullopt; }
  /// Reward emitted on the last step (adaptive kinds only).
  virtual std::optional<double> last_reward() const { return std::nullopt; }
  /// All rewards emitted so far.
  virtual std::span<const double> rewards() const { return {}; }
};

class PidController final : public ChannelController {
 public:
  explicit PidController(PidGains gains);
  double step(double error, double t, double dt) override;
  ControllerKind kind() const override { return ControllerKind::kPid; }

 private:
  PidGains gains_;
  PidState state_;
};

/// v = N(s)·(y - r) with constant gains. The sign puts the controller in the
/// positive-feedback position the DC-gain condition is stated for.
class SniController final : public ChannelController {
 public:
  explicit SniController(SniGains gains);
  double step(double error, double t, double dt) override;
  ControllerKind kind() const override { return ControllerKind::kSni; }
  std::optional<SniGains> gains() const override { return gains_; }

 private:
  SniGains gains_;
  SniState state_;
};

/// SNI controller whose gains drift by the rates a fixed Sugeno table assigns
/// to the current error.
class FuzzySniController final : public ChannelController {
 public:
  FuzzySniController(SniGains initial, RuleBase rules, FuzzyGainTable table, GainBounds bounds);
  double step(double error, double t, double dt) override;
  ControllerKind kind() const override { return ControllerKind::kFuzzySni; }
  std::optional<SniGains> gains() const override { return gains_; }

  /// Rates the table produces for an error.
  AgentOutputs rates(double error) const;

 private:
  SniGains gains_;
  SniState state_;
  RuleBase rules_;
  FuzzyGainTable table_;
  GainBounds bounds_;
};

/// SNI controller whose gains are adapted online by two fuzzy Q-learning
/// agents (one per rate output). Each step first completes the previous
/// transition with the new error, then selects, applies and integrates the
/// next action.
class FuzzyQlSniController final : public ChannelController {
 public:
  FuzzyQlSniController(SniGains initial, RuleBase rules, FqlHyperParams hp, GainBounds bounds,
                       std::uint64_t stream, ActionSet gamma_actions = ActionSet::gamma_rates(),
                       ActionSet tau_actions = ActionSet::tau_rates());
  double step(double error, double t, double dt) override;
  ControllerKind kind() const override { return ControllerKind::kFuzzyQlSni; }
  std::optional<SniGains> gains() const override { return gains_; }
  std::optional<double> last_reward() const override { return last_reward_; }
  std::span<const double> rewards() const override { return rewards_; }

  const FqlAgent& gamma_agent() const { return gamma_agent_; }
  const FqlAgent& tau_agent() const { return tau_agent_; }
  AgentOutputs last_outputs() const { return last_outputs_; }

 private:
  SniGains gains_;
  SniState state_;
  GainBounds bounds_;
  FqlAgent gamma_agent_;
  FqlAgent tau_agent_;
  std::optional<double> prev_error_;
  std::optional<double> last_reward_;
  std::vector<double> rewards_;
  AgentOutputs last_outputs_;
};

}  // namespace fqlsni
