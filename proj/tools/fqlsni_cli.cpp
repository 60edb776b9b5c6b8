#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fqlsni/config.hpp"
#include "fqlsni/csv.hpp"
#include "fqlsni/errors.hpp"
#include "fqlsni/fb_lin.hpp"
#include "fqlsni/ni_core.hpp"
#include "fqlsni/scenario.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kDiverged = 2, kSniViolated = 3, kReplayMismatch = 4 };

using namespace fqlsni;

void print_metrics(const std::array<ChannelMetrics, 4>& metrics) {
  std::printf("%-6s %12s %12s %10s %8s\n", "chan", "rmse", "SO", "t_s", "settled");
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& m = metrics[c];
    std::printf("%-6s %12.6g %12.6g %10.3f %8s\n", std::string(kChannelNames[c]).c_str(), m.rmse, m.steady_offset,
                m.settle.time, m.settle.settled ? "yes" : "no");
  }
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("bad value '" + item + "' in --values");
    }
  }
  if (out.empty()) throw ConfigError("--values is empty");
  return out;
}

ScenarioConfig load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                                   const std::optional<std::string>& out) {
  ScenarioConfig cfg = load_config(path);
  if (seed) cfg.seed = *seed;
  if (out) cfg.output_dir = *out;
  return cfg;
}

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& seed, const std::optional<std::string>& out) {
  const ScenarioConfig cfg = load_with_overrides(path, seed, out);
  const RunMetrics m = run_scenario(cfg);
  std::printf("scenario %s, seed %llu\n", cfg.name.c_str(), static_cast<unsigned long long>(cfg.seed));
  print_metrics(m.channels);
  if (!cfg.output_dir.empty()) std::printf("wrote %s\n", cfg.output_dir.c_str());
  if (m.diverged) {
    std::fprintf(stderr, "%s\n", m.diagnostic.c_str());
    return kDiverged;
  }
  return kOk;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& values,
              const std::optional<std::string>& out, unsigned workers) {
  const ScenarioConfig cfg = load_config(path);
  const auto vals = parse_values(values);
  const auto rows = sweep(cfg, param, vals, workers);
  const std::filesystem::path target =
      out ? std::filesystem::path(*out)
          : std::filesystem::path(cfg.output_dir.empty() ? "." : cfg.output_dir) / ("sweep_" + param + ".csv");
  write_sweep_csv(target, param, rows);
  std::printf("%-12s %12s %12s %12s %12s\n", param.c_str(), "rmse_z", "rmse_roll", "rmse_pitch", "rmse_yaw");
  bool diverged = false;
  for (const auto& r : rows) {
    std::printf("%-12g %12.6g %12.6g %12.6g %12.6g%s\n", r.value, r.rmse[0], r.rmse[1], r.rmse[2], r.rmse[3],
                r.diverged ? "  diverged" : "");
    diverged = diverged || r.diverged;
  }
  std::printf("wrote %s\n", target.string().c_str());
  return diverged ? kDiverged : kOk;
}

int cmd_check_sni(double gamma, double tau, double beta) {
  const SniGains g{gamma, tau, beta};
  const bool freq = sni_frequency_condition(g, default_frequency_grid());
  const bool dc = dc_gain_stability(gamma, beta);
  bool lemma = true;
  for (double eps : {1.0, 1e-3, 1e-6}) {
    const std::array<SniGains, 4> all{g, g, g, g};
    lemma = lemma && lemma1_check(linearized_plant_dc_gain(eps), controller_dc_gain(all));
  }
  std::printf("frequency condition (2γωτ/(1+ω²τ²) > 0 on grid): %s\n", freq ? "holds" : "violated");
  std::printf("controller DC gain γ-β = %g: %s\n", gamma - beta, dc ? "negative" : "not negative");
  std::printf("λmax(P(0)N(0)) < 1 for ε in {1, 1e-3, 1e-6}: %s\n", lemma ? "holds" : "violated");
  return freq && dc && lemma ? kOk : kSniViolated;
}

int cmd_replay(const std::string& path, const std::optional<std::uint64_t>& seed,
               const std::optional<std::string>& against) {
  const ScenarioConfig cfg = load_with_overrides(path, seed, std::nullopt);
  const ReplayReport report = replay(cfg);
  if (!report.identical) {
    std::printf("replay diverged: %s\n", report.detail.c_str());
    return kReplayMismatch;
  }
  std::printf("replay identical over %zu rows\n", report.rows_compared);

  if (against) {
    ScenarioConfig quiet = cfg;
    quiet.output_dir.clear();
    const RunResult r = simulate(quiet);
    std::ifstream in(*against, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + *against);
    std::string line;
    std::getline(in, line);
    if (line != "# " + std::string(kCsvSchema)) {
      std::printf("%s: schema line '%s' does not match '%s'\n", against->c_str(), line.c_str(),
                  std::string(kCsvSchema).c_str());
      return kReplayMismatch;
    }
    std::getline(in, line);
    std::size_t i = 0;
    for (; std::getline(in, line); ++i) {
      if (i >= r.trajectory.size() || csv_row(r.trajectory[i]) != line) {
        std::printf("%s differs from this run at data row %zu\n", against->c_str(), i);
        return kReplayMismatch;
      }
    }
    if (i != r.trajectory.size()) {
      std::printf("%s has %zu rows, this run %zu\n", against->c_str(), i, r.trajectory.size());
      return kReplayMismatch;
    }
    std::printf("%s matches byte for byte\n", against->c_str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrotor tracking simulator with fuzzy Q-learning tuned SNI controllers"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  auto* run = app.add_subcommand("run", "Run one scenario and write its CSV logs");
  run->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "Output directory");

  std::string param, values;
  unsigned workers = 0;
  auto* sw = app.add_subcommand("sweep", "Run one scenario per hyperparameter value");
  sw->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  sw->add_option("--param", param, "eta, sigma, explore_duration, epsilon or seed")->required();
  sw->add_option("--values", values, "Comma separated values")->required();
  sw->add_option("--out", out, "CSV path (default <output_dir>/sweep_<param>.csv)");
  sw->add_option("--workers", workers, "Parallel scenarios (0 = hardware concurrency)");

  double gamma = 0.0, tau = 0.0, beta = 0.0;
  auto* chk = app.add_subcommand("check-sni", "Check the SNI and DC-gain conditions for one gain set");
  chk->add_option("gamma", gamma)->required();
  chk->add_option("tau", tau)->required();
  chk->add_option("beta", beta)->required();

  std::optional<std::string> against;
  auto* rep = app.add_subcommand("replay", "Run a scenario twice and verify bit-identical logs");
  rep->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  rep->add_option("--seed", seed, "Override the scenario seed");
  rep->add_option("--against", against, "Also compare with a saved trajectory.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(config, seed, out);
    if (*sw) return cmd_sweep(config, param, values, out, workers);
    if (*chk) return cmd_check_sni(gamma, tau, beta);
    if (*rep) return cmd_replay(config, seed, against);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
