#include "fqlsni/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <thread>

#include "fqlsni/csv.hpp"
#include "fqlsni/errors.hpp"
#include "fqlsni/fb_lin.hpp"

namespace fqlsni {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string_view to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::kConstant: return "constant";
    case ReferenceKind::kStep: return "step";
    case ReferenceKind::kSine: return "sine";
    case ReferenceKind::kSquare: return "square";
  }
  return "unknown";
}

ReferenceKind parse_reference_kind(std::string_view name) {
  for (auto kind : {ReferenceKind::kConstant, ReferenceKind::kStep, ReferenceKind::kSine, ReferenceKind::kSquare}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown reference kind '" + std::string(name) + "'");
}

double ReferenceProfile::operator()(double t) const {
  if (kind == ReferenceKind::kConstant || t < start) return offset;
  switch (kind) {
    case ReferenceKind::kStep: return offset + amplitude;
    case ReferenceKind::kSine: return offset + amplitude * std::sin(2.0 * std::numbers::pi * (t - start) / period);
    case ReferenceKind::kSquare:
      return offset + (std::fmod(t - start, period) < 0.5 * period ? amplitude : -amplitude);
    case ReferenceKind::kConstant: break;
  }
  return offset;
}

std::vector<ReferenceProfile::Change> ReferenceProfile::changes(double duration) const {
  std::vector<Change> out;
  if (amplitude == 0.0 || start >= duration) return out;
  if (kind == ReferenceKind::kStep || kind == ReferenceKind::kSquare) out.push_back({start, amplitude});
  if (kind == ReferenceKind::kSquare) {
    for (int k = 1; start + 0.5 * period * k < duration; ++k) {
      out.push_back({start + 0.5 * period * k, (k % 2 ? -2.0 : 2.0) * amplitude});
    }
  }
  return out;
}

void ReferenceProfile::validate() const {
  if (!std::isfinite(amplitude) || !std::isfinite(offset) || !std::isfinite(start)) {
    throw ConfigError("reference values must be finite");
  }
  if ((kind == ReferenceKind::kSine || kind == ReferenceKind::kSquare) && !(period > 0.0)) {
    throw ConfigError("periodic references need a positive period");
  }
}

std::array<ChannelConfig, 4> default_channels() {
  std::array<ChannelConfig, 4> ch;
  ch[0].reference = {ReferenceKind::kStep, 1.5, 1.0, 0.0, 1.0};
  ch[1].reference = {ReferenceKind::kSine, 0.5, 4.0, 0.0, 0.0};
  ch[2].reference = {ReferenceKind::kSquare, 0.5, 5.0, 0.0, 0.0};
  ch[3].reference = {ReferenceKind::kStep, 0.5, 1.0, 0.0, 1.0};
  // Under proportional feedback alone a double integrator oscillates at
  // ω = √Kp for every Kp, so the ultimate point is a choice. Ku = 1 gives the
  // PID the same DC stiffness the SNI controllers have with β = γ + 1.
  for (auto& c : ch) c.pid = ziegler_nichols_pid(1.0, 2.0 * std::numbers::pi);
  return ch;
}

std::size_t ScenarioConfig::samples() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

void ScenarioConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(duration >= dt)) throw ConfigError("duration must be at least one sample");
  if (!(qtable_dump_interval >= 0.0)) throw ConfigError("qtable_dump_interval must be non-negative");
  if (!(settle_band_fraction >= 0.0) || !(settle_band_floor > 0.0)) throw ConfigError("invalid settle band");
  nominal.validate();
  fql.validate();
  bounds.validate();
  for (const auto& c : channels) {
    c.reference.validate();
    c.pid.validate();
    if (!(c.sni.tau >= kTauMin)) throw ConfigError("sni tau below the minimum");
    if (c.fuzzy_table.gamma_rates.size() != rules.size() || c.fuzzy_table.tau_rates.size() != rules.size()) {
      throw ConfigError("fuzzy gain table needs one consequent per rule");
    }
  }
  if (disturbances.dryden_enabled) disturbances.dryden.validate();
  if (disturbances.gust_enabled) disturbances.gust.validate();
  if (disturbances.bias_enabled) disturbances.bias.validate();
  if (limits && !(limits->thrust_max > 0.0 && limits->moment_max > 0.0)) throw ConfigError("invalid actuator limits");
}

std::vector<std::string> trajectory_header() {
  std::vector<std::string> h{"time"};
  for (const char* group : {"ref", "y", "e"}) {
    for (auto name : kChannelNames) h.push_back(std::string(group) + "_" + std::string(name));
  }
  for (const char* u : {"U1", "U2", "U3", "U4", "v1", "v2", "v3", "v4"}) h.emplace_back(u);
  for (const char* group : {"gamma", "tau"}) {
    for (auto name : kChannelNames) h.push_back(std::string(group) + "_" + std::string(name));
  }
  for (const char* w : {"wind_x", "wind_y", "wind_z"}) h.emplace_back(w);
  for (auto name : kChannelNames) h.push_back("reward_" + std::string(name));
  return h;
}

std::vector<double> RunResult::column(std::string_view name) const {
  const auto it = std::find(trajectory_header.begin(), trajectory_header.end(), name);
  if (it == trajectory_header.end()) throw DomainError("no trajectory column '" + std::string(name) + "'");
  const auto idx = static_cast<std::size_t>(it - trajectory_header.begin());
  std::vector<double> out;
  out.reserve(trajectory.size());
  for (const auto& row : trajectory) out.push_back(row[idx]);
  return out;
}

std::vector<double> RunResult::errors(Channel c) const {
  return column("e_" + std::string(kChannelNames[static_cast<std::size_t>(index(c))]));
}

namespace {

std::unique_ptr<ChannelController> make_controller(const ScenarioConfig& cfg, Channel c) {
  const ChannelConfig& ch = cfg.channel(c);
  switch (ch.controller) {
    case ControllerKind::kPid: return std::make_unique<PidController>(ch.pid);
    case ControllerKind::kSni: return std::make_unique<SniController>(ch.sni);
    case ControllerKind::kFuzzySni:
      return std::make_unique<FuzzySniController>(ch.sni, cfg.rules, ch.fuzzy_table, cfg.bounds);
    case ControllerKind::kFuzzyQlSni: {
      FqlHyperParams hp = cfg.fql;
      hp.seed = cfg.seed;
      return std::make_unique<FuzzyQlSniController>(ch.sni, cfg.rules, hp, cfg.bounds,
                                                    static_cast<std::uint64_t>(index(c)) + 1, cfg.gamma_actions,
                                                    cfg.tau_actions);
    }
  }
  throw ConfigError("unhandled controller kind");
}

void dump_qtables(std::vector<std::vector<double>>& out, double t,
                  const std::array<std::unique_ptr<ChannelController>, 4>& ctrls, Eigen::Index width) {
  for (std::size_t c = 0; c < ctrls.size(); ++c) {
    const auto* fql = dynamic_cast<const FuzzyQlSniController*>(ctrls[c].get());
    if (!fql) continue;
    int agent = 0;
    for (const FqlAgent* a : {&fql->gamma_agent(), &fql->tau_agent()}) {
      const auto& q = a->table().q;
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        std::vector<double> row{t, static_cast<double>(c), static_cast<double>(agent), static_cast<double>(i)};
        for (Eigen::Index j = 0; j < width; ++j) row.push_back(j < q.cols() ? q(i, j) : kNaN);
        out.push_back(std::move(row));
      }
      ++agent;
    }
  }
}

ChannelMetrics channel_metrics(const ScenarioConfig& cfg, Channel c, const std::vector<double>& e,
                               const ChannelController& ctrl) {
  ChannelMetrics m;
  if (e.empty()) {
    m.rmse = kNaN;
    m.steady_offset = kNaN;
    return m;
  }
  m.rmse = rmse(e);
  m.steady_offset = e.size() > kSteadyWindow ? steady_offset(e) : kNaN;

  const auto changes = cfg.channel(c).reference.changes(cfg.duration);
  std::size_t begin = 0;
  std::size_t end = e.size();
  m.settle_band = cfg.settle_band_floor;
  if (!changes.empty()) {
    begin = std::min(e.size(), static_cast<std::size_t>(std::llround(changes[0].time / cfg.dt)));
    if (changes.size() > 1) {
      end = std::min(e.size(), static_cast<std::size_t>(std::llround(changes[1].time / cfg.dt)));
    }
    m.settle_band = std::max(cfg.settle_band_fraction * std::abs(changes[0].jump), cfg.settle_band_floor);
  }
  if (begin < end) {
    m.settle = settle_time(std::span<const double>(e).subspan(begin, end - begin), cfg.dt, m.settle_band);
  }

  if (const auto* fql = dynamic_cast<const FuzzyQlSniController*>(&ctrl)) {
    m.gamma_return = discounted_return(fql->rewards(), fql->gamma_agent().hyper_params().sigma);
    m.tau_return = discounted_return(fql->rewards(), fql->tau_agent().hyper_params().sigma);
  }
  return m;
}

void mark_diverged(RunResult& result, double t, const std::exception& ex) {
  result.diverged = true;
  result.diagnostic = "diverged at t=" + format_double(t) + ": " + ex.what();
}

}  // namespace

RunResult simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  RunResult result;
  result.trajectory_header = trajectory_header();

  std::array<std::unique_ptr<ChannelController>, 4> ctrls;
  for (auto c : kChannels) ctrls[static_cast<std::size_t>(index(c))] = make_controller(cfg, c);

  const auto& dist = cfg.disturbances;
  const QuadParams plant = dist.bias_enabled ? apply_bias(cfg.nominal, dist.bias) : cfg.nominal;
  std::optional<DrydenGust> dryden;
  if (dist.dryden_enabled) {
    DrydenConfig dc = dist.dryden;
    dc.seed = cfg.seed * 0x9E3779B97F4A7C15ULL + dist.dryden.seed;
    dryden.emplace(dc, cfg.dt);
  }

  const std::size_t n = cfg.samples();
  const Eigen::Index q_width = std::max(cfg.gamma_actions.size(), cfg.tau_actions.size());
  const std::size_t dump_every =
      cfg.qtable_dump_interval > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.qtable_dump_interval / cfg.dt)))
          : 0;
  result.trajectory.reserve(n);
  result.wind.reserve(n);

  QuadState state;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    try {
      std::array<double, 4> ref{}, y{}, e{};
      const std::array<double, 4> measured{state.z(), state.roll(), state.pitch(), state.yaw()};
      Eigen::Vector4d v;
      for (std::size_t c = 0; c < 4; ++c) {
        ref[c] = cfg.channels[c].reference(t);
        y[c] = measured[c];
        e[c] = ref[c] - y[c];
        v[static_cast<Eigen::Index>(c)] = ctrls[c]->step(e[c], t, cfg.dt);
      }

      ControlMoments u = linearize(VirtualInput::from_vector(v), state, cfg.nominal);
      if (cfg.limits) u = saturate(u, *cfg.limits);

      Eigen::Vector3d wind = dryden ? dryden->step() : Eigen::Vector3d::Zero();
      double gust = 0.0;
      if (dist.gust_enabled) {
        gust = one_minus_cos(t, dist.gust);
        wind[dist.gust.axis] += gust;
      }
      const Disturbance d = wind_to_disturbance(wind, state, plant, dist.wind_torque_gain);

      std::vector<double> row;
      row.reserve(result.trajectory_header.size());
      row.push_back(t);
      row.insert(row.end(), ref.begin(), ref.end());
      row.insert(row.end(), y.begin(), y.end());
      row.insert(row.end(), e.begin(), e.end());
      for (double x : {u.U1, u.U2, u.U3, u.U4}) row.push_back(x);
      for (Eigen::Index i = 0; i < 4; ++i) row.push_back(v[i]);
      for (const auto& ctrl : ctrls) row.push_back(ctrl->gains() ? ctrl->gains()->gamma : kNaN);
      for (const auto& ctrl : ctrls) row.push_back(ctrl->gains() ? ctrl->gains()->tau : kNaN);
      for (Eigen::Index i = 0; i < 3; ++i) row.push_back(wind[i]);
      for (const auto& ctrl : ctrls) row.push_back(ctrl->last_reward().value_or(kNaN));
      result.trajectory.push_back(std::move(row));
      result.wind.push_back({t, wind[0], wind[1], wind[2], gust, d.force[0], d.force[1], d.force[2], d.torque[0],
                             d.torque[1], d.torque[2]});

      if (dump_every && k % dump_every == 0) dump_qtables(result.qtables, t, ctrls, q_width);

      state = step(state, u, plant, d, cfg.dt);
    } catch (const DivergenceError& ex) {
      mark_diverged(result, t, ex);
      break;
    } catch (const SingularityError& ex) {
      mark_diverged(result, t, ex);
      break;
    } catch (const DomainError& ex) {
      mark_diverged(result, t, ex);
      break;
    }
  }
  dump_qtables(result.qtables, static_cast<double>(result.trajectory.size()) * cfg.dt, ctrls, q_width);

  for (auto c : kChannels) {
    const auto i = static_cast<std::size_t>(index(c));
    result.metrics[i] = channel_metrics(cfg, c, result.errors(c), *ctrls[i]);
  }
  return result;
}

namespace {

std::string opt_to_string(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

RunMetrics write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  RunMetrics m;
  m.channels = result.metrics;
  m.diverged = result.diverged;
  m.diagnostic = result.diagnostic;
  m.trajectory_csv = dir / "trajectory.csv";
  m.wind_csv = dir / "wind.csv";
  m.qtable_csv = dir / "qtables.csv";
  m.metrics_csv = dir / "metrics.csv";

  write_csv(m.trajectory_csv, result.trajectory_header, result.trajectory);
  const std::vector<std::string> wind_header{"time",    "wind_x",  "wind_y",   "wind_z",   "gust",    "force_x",
                                             "force_y", "force_z", "torque_x", "torque_y", "torque_z"};
  write_csv(m.wind_csv, wind_header, result.wind);

  std::vector<std::string> q_header{"time", "channel", "agent", "rule"};
  const std::size_t width = result.qtables.empty() ? 0 : result.qtables.front().size() - q_header.size();
  for (std::size_t j = 0; j < width; ++j) q_header.push_back("q" + std::to_string(j));
  write_csv(m.qtable_csv, q_header, result.qtables);

  std::ofstream out(m.metrics_csv, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + m.metrics_csv.string() + " for writing");
  out << "# " << kCsvSchema << '\n';
  out << "channel,rmse,steady_offset,settle_time,settled,settle_band,gamma_return,tau_return\n";
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& cm = result.metrics[c];
    const std::vector<std::string> row{std::string(kChannelNames[c]),
                                       format_double(cm.rmse),
                                       format_double(cm.steady_offset),
                                       format_double(cm.settle.time),
                                       cm.settle.settled ? "1" : "0",
                                       format_double(cm.settle_band),
                                       opt_to_string(cm.gamma_return),
                                       opt_to_string(cm.tau_return)};
    out << csv_row(row) << '\n';
  }
  if (result.diverged) out << "# " << result.diagnostic << '\n';
  return m;
}

RunMetrics run_scenario(const ScenarioConfig& cfg) {
  const RunResult result = simulate(cfg);
  if (cfg.output_dir.empty()) {
    RunMetrics m;
    m.channels = result.metrics;
    m.diverged = result.diverged;
    m.diagnostic = result.diagnostic;
    return m;
  }
  return write_outputs(result, cfg.output_dir);
}

void set_parameter(ScenarioConfig& cfg, std::string_view name, double value) {
  if (name == "eta") {
    cfg.fql.eta = value;
  } else if (name == "sigma") {
    cfg.fql.sigma = value;
  } else if (name == "explore_duration") {
    cfg.fql.explore_duration = value;
  } else if (name == "epsilon") {
    cfg.fql.epsilon = value;
  } else if (name == "seed") {
    if (!(value >= 0.0) || value != std::floor(value)) throw ConfigError("seed must be a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(value);
  } else {
    throw ConfigError("unknown sweep parameter '" + std::string(name) + "'");
  }
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, std::string_view param, std::span<const double> values,
                            unsigned workers) {
  std::vector<ScenarioConfig> cfgs;
  for (double v : values) {
    ScenarioConfig cfg = base;
    cfg.output_dir.clear();
    set_parameter(cfg, param, v);
    cfg.validate();
    cfgs.push_back(std::move(cfg));
  }

  std::vector<SweepRow> rows(cfgs.size());
  std::vector<std::exception_ptr> failures(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      try {
        const RunResult r = simulate(cfgs[i]);
        rows[i].value = values[i];
        rows[i].diverged = r.diverged;
        for (std::size_t c = 0; c < 4; ++c) rows[i].rmse[c] = r.metrics[c].rmse;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, cfgs.size())));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, std::string_view param, std::span<const SweepRow> rows) {
  std::vector<std::string> header{std::string(param)};
  for (auto name : kChannelNames) header.push_back("rmse_" + std::string(name));
  header.emplace_back("diverged");
  std::vector<std::vector<double>> data;
  for (const auto& r : rows) {
    std::vector<double> row{r.value};
    row.insert(row.end(), r.rmse.begin(), r.rmse.end());
    row.push_back(r.diverged ? 1.0 : 0.0);
    data.push_back(std::move(row));
  }
  write_csv(path, header, data);
}

ReplayReport replay(const ScenarioConfig& cfg) {
  ScenarioConfig quiet = cfg;
  quiet.output_dir.clear();
  const RunResult a = simulate(quiet);
  const RunResult b = simulate(quiet);

  ReplayReport report;
  if (a.trajectory.size() != b.trajectory.size()) {
    report.identical = false;
    report.detail = "row counts differ: " + std::to_string(a.trajectory.size()) + " vs " +
                    std::to_string(b.trajectory.size());
    return report;
  }
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    ++report.rows_compared;
    if (csv_row(a.trajectory[i]) != csv_row(b.trajectory[i]) || csv_row(a.wind[i]) != csv_row(b.wind[i])) {
      report.identical = false;
      report.first_mismatch_row = i;
      report.detail = "first mismatch at t=" + format_double(a.trajectory[i][0]);
      return report;
    }
  }
  if (a.qtables.size() != b.qtables.size()) {
    report.identical = false;
    report.detail = "q-table dumps differ in length";
    return report;
  }
  for (std::size_t i = 0; i < a.qtables.size(); ++i) {
    if (csv_row(a.qtables[i]) != csv_row(b.qtables[i])) {
      report.identical = false;
      report.detail = "q-table dumps differ at row " + std::to_string(i);
      return report;
    }
  }
  return report;
}

}  // namespace fqlsni
