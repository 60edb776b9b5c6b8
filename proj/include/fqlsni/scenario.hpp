#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fqlsni/controllers.hpp"
#include "fqlsni/disturbances.hpp"
#include "fqlsni/fql_agent.hpp"
#include "fqlsni/fuzzy.hpp"
#include "fqlsni/metrics.hpp"
#include "fqlsni/ni_core.hpp"
#include "fqlsni/plant.hpp"

namespace fqlsni {

enum class ReferenceKind { kConstant, kStep, kSine, kSquare };

std::string_view to_string(ReferenceKind kind);
/// Accepts constant, step, sine, square. Throws ConfigError.
ReferenceKind parse_reference_kind(std::string_view name);

/// Holds `offset` until `start`, then:
///   step   offset + amplitude
///   sine   offset + amplitude·sin(2π(t - start)/period)
///   square offset ± amplitude, positive for the first half of each period
struct ReferenceProfile {
  ReferenceKind kind = ReferenceKind::kConstant;
  double amplitude = 0.0;
  double period = 1.0;
  double offset = 0.0;
  double start = 0.0;

  double operator()(double t) const;

  struct Change {
    double time;
    double jump;
  };
  /// Discontinuities inside [0, duration).
  std::vector<Change> changes(double duration) const;

  void validate() const;
};

struct ChannelConfig {
  ReferenceProfile reference;
  ControllerKind controller = ControllerKind::kFuzzyQlSni;
  SniGains sni;
  PidGains pid;
  FuzzyGainTable fuzzy_table = FuzzyGainTable::antisymmetric();
};

/// Default tracking task: z holds 1.5 m after 1 s, roll follows a 0.5 rad sine
/// of period 4 s, pitch a 0.5 rad square wave of period 5 s and yaw a 0.5 rad
/// step at 1 s. Every channel runs the learning controller.
std::array<ChannelConfig, 4> default_channels();

struct DisturbanceConfig {
  bool dryden_enabled = false;
  DrydenConfig dryden;
  bool gust_enabled = false;
  OneMinusCosConfig gust;
  double wind_torque_gain = 0.0;  ///< kappa [N·m/(m/s)]
  bool bias_enabled = false;
  ParamBias bias;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 20.0;
  double dt = 0.01;
  std::uint64_t seed = 42;
  std::string output_dir;
  double qtable_dump_interval = 1.0;  ///< [s], 0 dumps only the final tables

  std::array<ChannelConfig, 4> channels = default_channels();
  QuadParams nominal;
  std::optional<ActuatorLimits> limits;
  FqlHyperParams fql;
  GainBounds bounds;
  RuleBase rules = RuleBase::standard_five();
  ActionSet gamma_actions = ActionSet::gamma_rates();
  ActionSet tau_actions = ActionSet::tau_rates();
  DisturbanceConfig disturbances;

  double settle_band_fraction = 0.02;
  double settle_band_floor = 0.02;

  ChannelConfig& channel(Channel c) { return channels[static_cast<std::size_t>(index(c))]; }
  const ChannelConfig& channel(Channel c) const { return channels[static_cast<std::size_t>(index(c))]; }
  std::size_t samples() const;
  void validate() const;
};

struct ChannelMetrics {
  double rmse = 0.0;
  double steady_offset = 0.0;  ///< NaN if the run is too short for the window
  SettleResult settle;
  double settle_band = 0.0;
  std::optional<double> gamma_return;  ///< discounted return, adaptive channels only
  std::optional<double> tau_return;
};

struct RunResult {
  std::vector<std::string> trajectory_header;
  std::vector<std::vector<double>> trajectory;
  std::vector<std::vector<double>> wind;
  std::vector<std::vector<double>> qtables;
  std::array<ChannelMetrics, 4> metrics;
  bool diverged = false;
  std::string diagnostic;

  /// Column of the trajectory log by header name. Throws DomainError if absent.
  std::vector<double> column(std::string_view name) const;
  /// Error series of a channel.
  std::vector<double> errors(Channel c) const;
};

struct RunMetrics {
  std::array<ChannelMetrics, 4> channels;
  bool diverged = false;
  std::string diagnostic;
  std::filesystem::path trajectory_csv;
  std::filesystem::path wind_csv;
  std::filesystem::path qtable_csv;
  std::filesystem::path metrics_csv;
};

/// Runs the closed loop in memory. Divergence stops the loop, keeps the
/// samples logged so far and sets `diverged`.
RunResult simulate(const ScenarioConfig& cfg);

/// Writes trajectory.csv, wind.csv, qtables.csv and metrics.csv into `dir`.
RunMetrics write_outputs(const RunResult& result, const std::filesystem::path& dir);

/// simulate() followed by write_outputs() when cfg.output_dir is set.
RunMetrics run_scenario(const ScenarioConfig& cfg);

std::vector<std::string> trajectory_header();

/// Sets one of eta, sigma, explore_duration, epsilon or seed.
void set_parameter(ScenarioConfig& cfg, std::string_view name, double value);

struct SweepRow {
  double value = 0.0;
  std::array<double, 4> rmse{};
  bool diverged = false;
};

/// One scenario per value. Runs on up to `workers` threads (0 picks the
/// hardware concurrency); rows come back in the order of `values`.
std::vector<SweepRow> sweep(const ScenarioConfig& base, std::string_view param, std::span<const double> values,
                            unsigned workers = 0);

void write_sweep_csv(const std::filesystem::path& path, std::string_view param, std::span<const SweepRow> rows);

struct ReplayReport {
  bool identical = true;
  std::size_t rows_compared = 0;
  std::optional<std::size_t> first_mismatch_row;
  std::string detail;
};

/// Runs `cfg` twice and compares the serialized trajectory and wind logs byte
/// for byte.
ReplayReport replay(const ScenarioConfig& cfg);

}  // namespace fqlsni
