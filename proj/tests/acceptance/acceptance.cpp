// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fqlsni/config.hpp"
#include "fqlsni/csv.hpp"
#include "fqlsni/disturbances.hpp"
#include "fqlsni/fb_lin.hpp"
#include "fqlsni/fql_agent.hpp"
#include "fqlsni/ni_core.hpp"
#include "fqlsni/plant.hpp"
#include "fqlsni/scenario.hpp"

using namespace fqlsni;

namespace {

const std::filesystem::path kConfigDir = FQLSNI_CONFIG_DIR;
constexpr int kSeeds = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ScenarioConfig load_quiet(const char* name) {
  auto cfg = load_config(kConfigDir / name);
  cfg.output_dir.clear();
  cfg.qtable_dump_interval = 0.0;
  return cfg;
}

void set_all(ScenarioConfig& cfg, ControllerKind kind) {
  for (auto& ch : cfg.channels) ch.controller = kind;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_abs(const std::vector<double>& e, double t0, double t1, double dt) {
  const auto a = static_cast<std::size_t>(std::llround(t0 / dt));
  const auto b = std::min(e.size(), static_cast<std::size_t>(std::llround(t1 / dt)));
  if (b <= a) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (std::size_t k = a; k < b; ++k) acc += std::abs(e[k]);
  return acc / static_cast<double>(b - a);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Outcome fl_exactness() {
  const auto t0 = Clock::now();
  const QuadParams p;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ang(-1.2, 1.2), rate(-4.0, 4.0), vel(-5.0, 5.0), acc(-10.0, 10.0),
      wr(-800.0, 800.0);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    QuadState s;
    for (int i = 0; i < 3; ++i) s.q[i] = vel(rng);
    for (int i = 3; i < 6; ++i) s.q[i] = ang(rng);
    for (int i = 6; i < 9; ++i) s.q[i] = vel(rng);
    for (int i = 9; i < 12; ++i) s.q[i] = rate(rng);
    s.omega_r = wr(rng);
    const VirtualInput v{acc(rng), acc(rng), acc(rng), acc(rng)};
    const auto d = derivatives(s, linearize(v, s, p), p, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
    const Eigen::Vector4d got(d[kZDot], d[kRollRate], d[kPitchRate], d[kYawRate]);
    worst = std::max(worst, (got - v.as_vector()).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-8 && elapsed < 5.0, fmt2("max residual %.3g, %.2f s", worst, elapsed)};
}

Outcome sni_condition() {
  const GainBounds b;
  const auto grid = default_frequency_grid();
  bool all = grid.size() == 200;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double gamma = b.gamma_min + (b.gamma_max - b.gamma_min) * i / 19.0;
      const double tau = b.tau_min + (b.tau_max - b.tau_min) * j / 19.0;
      const SniGains g{gamma, tau, gamma + 1.0};
      all = all && sni_frequency_condition(g, grid);
      for (double w : grid) {
        const double gap = sni_imaginary_gap(g, w);
        all = all && gap > 0.0;
        const double closed = 2.0 * gamma * w * tau / (1.0 + w * w * tau * tau);
        worst = std::max(worst, std::abs(gap - closed) / std::max(1.0, closed));
      }
    }
  }
  return {all && worst < 1e-12, fmt("400 gain pairs x 200 frequencies, closed-form deviation %.3g", worst)};
}

Outcome stability_predicate() {
  const GainBounds b;
  bool all = true;
  for (int i = 0; i <= 1000; ++i) {
    const double gamma = b.gamma_min + (b.gamma_max - b.gamma_min) * i / 1000.0;
    all = all && dc_gain_stability(gamma, gamma + 1.0);
  }
  std::array<SniGains, 4> gains{{{5.0, 0.1, 6.0}, {0.1, 1e-3, 1.1}, {100.0, 1.0, 101.0}, {37.0, 0.3, 38.0}}};
  const auto n_dc = controller_dc_gain(gains);
  for (double eps : {1.0, 1e-3, 1e-6}) all = all && lemma1_check(linearized_plant_dc_gain(eps), n_dc);
  return {all, "gamma sweep over the clamp box and eps in {1, 1e-3, 1e-6}"};
}

Outcome degeneracy() {
  auto sni = load_quiet("nominal.cfg");
  set_all(sni, ControllerKind::kSni);
  auto fql = load_quiet("nominal.cfg");
  set_all(fql, ControllerKind::kFuzzyQlSni);
  fql.fql.eta = 0.0;
  fql.fql.epsilon = 0.0;
  fql.fql.explore_duration = 0.0;
  const auto a = simulate(sni);
  const auto b = simulate(fql);
  bool same = !a.diverged && !b.diverged && a.trajectory.size() == sni.samples() &&
              a.trajectory.size() == b.trajectory.size();
  for (std::string col : {"v1", "v2", "v3", "v4", "y_z", "y_roll", "y_pitch", "y_yaw"}) {
    same = same && csv_row(a.column(col)) == csv_row(b.column(col));
  }
  return {same, std::to_string(a.trajectory.size()) + " samples compared over 20 s"};
}

Outcome q_update_oracle() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-1.0, 1.0), wd(0.0, 1.0), hp_eta(0.01, 1.0), hp_sigma(0.05, 0.95);
  std::uniform_int_distribution<int> pick(0, 2);
  double worst = 0.0;
  bool sparse = true;
  for (int n = 0; n < 10000; ++n) {
    FqlHyperParams hp;
    hp.eta = hp_eta(rng);
    hp.sigma = hp_sigma(rng);
    RuleQTable q = RuleQTable::zeros(5, 3);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 3; ++j) q.q(i, j) = u(rng);
    Eigen::VectorXd w(5), wn(5);
    for (int i = 0; i < 5; ++i) {
      w[i] = wd(rng) < 0.25 ? 0.0 : wd(rng);
      wn[i] = wd(rng);
    }
    w[n % 5] += 0.01;
    wn[n % 5] += 0.01;
    std::vector<Eigen::Index> chosen(5);
    for (auto& c : chosen) c = pick(rng);
    const double r = u(rng);

    // Literal transcription: Q(S_t, A_t), max_a Q(S_{t+1}, a), the temporal
    // difference and the per-rule share.
    double num = 0.0, den = 0.0, num_n = 0.0, den_n = 0.0;
    for (int i = 0; i < 5; ++i) {
      num += w[i] * q.q(i, chosen[i]);
      den += w[i];
      double row_max = q.q(i, 0);
      for (int j = 1; j < 3; ++j) row_max = std::max(row_max, q.q(i, j));
      num_n += wn[i] * row_max;
      den_n += wn[i];
    }
    const double delta_q = r + hp.sigma * (num_n / den_n) - num / den;

    const auto out = update(q, w, wn, chosen, r, hp);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (w[i] > 0.0 && j == chosen[i]) {
          const double want = q.q(i, j) + hp.eta * delta_q * w[i] / den;
          worst = std::max(worst, std::abs(out.q(i, j) - want));
        } else {
          sparse = sparse && out.q(i, j) == q.q(i, j);
        }
      }
    }
  }
  return {worst < 1e-12 && sparse, fmt("10^4 updates, max deviation %.3g, sparsity held", worst)};
}

Outcome reward_properties() {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> e(-2.0, 2.0);
  bool ok = reward(0.0, 1.0) == 0.5;
  for (int n = 0; n < 100000; ++n) {
    const double et = e(rng), en = e(rng);
    const double r = reward(en, et);
    const double diff = std::abs(et) - std::abs(en);
    const int want = (diff > 0) - (diff < 0);
    const int got = (r > 0) - (r < 0);
    ok = ok && r > -1.0 && r < 1.0 && want == got;
  }
  return {ok, "10^5 pairs, R(1->0) = " + format_double(reward(0.0, 1.0))};
}

Outcome nominal_altitude() {
  const auto t0 = Clock::now();
  const auto base = load_quiet("nominal.cfg");
  int good = 0;
  std::vector<double> so, ts;
  for (int s = 1; s <= kSeeds; ++s) {
    auto cfg = base;
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto r = simulate(cfg);
    const auto& m = r.metrics[0];
    const bool settled = !r.diverged && m.settle.settled;
    so.push_back(r.diverged ? INFINITY : m.steady_offset);
    ts.push_back(settled ? m.settle.time : INFINITY);
    good += !r.diverged && m.steady_offset < 1e-3 && settled && m.settle.time >= 1.0 && m.settle.time <= 3.0;
  }
  const double elapsed = seconds_since(t0);
  return {good == kSeeds && elapsed < 30.0,
          std::to_string(good) + "/10 seeds; median SO " + format_double(median(so)) + " m, median settle " +
              format_double(median(ts)) + " s, " + fmt("%.1f s", elapsed)};
}

Outcome ordering() {
  const auto nominal = load_quiet("nominal.cfg");
  const auto disturbed = load_quiet("disturbed.cfg");
  auto roll_rmse = [](ScenarioConfig cfg, ControllerKind kind, int seed) {
    set_all(cfg, kind);
    cfg.seed = static_cast<std::uint64_t>(seed);
    const auto r = simulate(cfg);
    return r.diverged ? INFINITY : r.metrics[1].rmse;
  };
  std::vector<double> fql_n, sni_n, fql_d, pid_d;
  for (int s = 1; s <= kSeeds; ++s) {
    fql_n.push_back(roll_rmse(nominal, ControllerKind::kFuzzyQlSni, s));
    sni_n.push_back(roll_rmse(nominal, ControllerKind::kSni, s));
    fql_d.push_back(roll_rmse(disturbed, ControllerKind::kFuzzyQlSni, s));
    pid_d.push_back(roll_rmse(disturbed, ControllerKind::kPid, s));
  }
  const double a = median(fql_n), b = median(sni_n), c = median(fql_d), d = median(pid_d);
  return {a < b && c < d, "nominal roll " + fmt2("%.4g vs SNI %.4g", a, b) + "; disturbed roll " +
                              fmt2("%.4g vs PID %.4g rad", c, d)};
}

Outcome learning_progress() {
  const auto base = load_quiet("disturbed.cfg");
  int good = 0, diverged = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    auto cfg = base;
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto r = simulate(cfg);
    diverged += r.diverged;
    if (r.diverged) continue;
    const auto e = r.errors(Channel::kZ);
    good += mean_abs(e, 15.0, 20.0, cfg.dt) < mean_abs(e, 1.0, 6.0, cfg.dt);
  }
  return {good >= 9, std::to_string(good) + "/10 seeds improved, " + std::to_string(diverged) + " diverged"};
}

Outcome sweep_smoke() {
  const auto base = load_quiet("nominal.cfg");
  const std::vector<double> sigmas{0.3, 0.5, 0.7, 0.9};
  const auto rows = sweep(base, "sigma", sigmas);
  bool ok = rows.size() == sigmas.size();
  for (std::size_t i = 0; ok && i < rows.size(); ++i) ok = rows[i].value == sigmas[i];

  auto row = base;
  row.fql.sigma = 0.7;
  const auto rep = replay(row);
  const auto again = simulate(row);
  for (std::size_t c = 0; ok && c < 4; ++c) ok = again.metrics[c].rmse == rows[2].rmse[c];
  return {ok && rep.identical, std::to_string(rows.size()) + " rows; sigma = 0.7 replay " +
                                   (rep.identical ? "bit-identical" : "differs: " + rep.detail)};
}

Outcome disturbance_checks() {
  DrydenConfig cfg;
  DrydenGust gust(cfg, 0.01);
  double peak = 0.0;
  for (int k = 0; k < 1000000; ++k) peak = std::max(peak, gust.step().cwiseAbs().maxCoeff());
  const OneMinusCosConfig pulse;
  const double top = one_minus_cos(pulse.start + pulse.duration, pulse);
  const bool ok = peak <= 5.0 && std::abs(top - pulse.amplitude) <= 1e-12;
  return {ok, "max |wind| " + format_double(peak) + " m/s over 10^6 steps, pulse peak " + format_double(top)};
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"feedback linearization exactness", fl_exactness},
      {"SNI frequency condition over the clamp box", sni_condition},
      {"DC-gain stability predicate", stability_predicate},
      {"frozen learner equals fixed-gain SNI", degeneracy},
      {"q-update oracle and sparsity", q_update_oracle},
      {"reward bounds and sign", reward_properties},
      {"nominal altitude settle and offset", nominal_altitude},
      {"roll RMSE orderings", ordering},
      {"disturbed altitude learning progress", learning_progress},
      {"sigma sweep and replay", sweep_smoke},
      {"disturbance model bounds", disturbance_checks},
  };

  int failures = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  const double total = seconds_since(start);
  const bool budget = total < 300.0;
  failures += !budget;
  std::printf("%s criterion 12 (whole-suite runtime budget): %.1f s of 300 s\n", budget ? "PASS" : "FAIL", total);
  return failures == 0 ? 0 : 1;
}
