// ccbeam: run coded-caching beamforming experiments and write CSV/JSON results.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ccbeam/report.hpp"

namespace fs = std::filesystem;
using namespace ccbeam;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFailures = 3;
constexpr int kExitViolations = 1;
constexpr double kMaxFailureRate = 0.01;

struct ScenarioArgs {
  std::string scenario;
  std::string config;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string snr;
  std::string mode;
  std::string gammas;
  std::optional<int> restarts;

  void attach(CLI::App* app, bool positional) {
    app->add_option(positional ? "scenario,--scenario" : "--scenario", scenario,
                    "bars-fig1to3 | cdf-fig4to6 | custom");
    app->add_option("--config", config, "key = value scenario file");
    app->add_option("--trials", trials, "Number of channel realizations");
    app->add_option("--seed", seed, "Master seed (falls back to $CCBEAM_SEED)");
    app->add_option("--snr", snr, "Comma-separated SNR grid in dB");
    app->add_option("--mode", mode, "exact | lowsnr");
    app->add_option("--gammas", gammas, "Comma-separated subset of EP,PL,BF");
    app->add_option("--restarts", restarts, "BF starting points (PL start + random)");
  }

  ScenarioSpec resolve() const {
    ScenarioSpec spec;
    if (!config.empty()) {
      spec = load_scenario(config);
      if (!scenario.empty() && scenario != spec.name) {
        throw ConfigError("--scenario '" + scenario + "' conflicts with the config file");
      }
    } else if (!scenario.empty()) {
      spec = preset_scenario(scenario);
    } else {
      throw ConfigError("give a scenario name or --config");
    }
    auto& ex = spec.experiment;
    if (trials) ex.trials = *trials;
    if (seed) {
      ex.seed = *seed;
    } else if (const char* env = std::getenv("CCBEAM_SEED")) {
      try {
        std::size_t used = 0;
        ex.seed = std::stoull(env, &used);
        if (env[used] != '\0') throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw ConfigError(std::string("CCBEAM_SEED is not an unsigned integer: ") + env);
      }
    }
    if (!snr.empty()) ex.snr_db = parse_number_list(snr);
    if (!mode.empty()) ex.mode = parse_rate_mode(mode);
    if (!gammas.empty()) ex.gammas = parse_gamma_list(gammas);
    if (restarts) ex.restarts = *restarts;
    ex.validate();
    if (ex.placements.empty()) throw ConfigError("no placements configured");
    return spec;
  }
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void print_summary(const ScenarioSpec& spec, const ExperimentResult& res) {
  const auto& ex = spec.experiment;
  std::cout << "scenario " << spec.name << ": " << ex.trials << " trials, "
            << to_string(ex.mode) << ", " << format_double(res.wall_seconds) << " s\n";
  for (double snr : ex.snr_db) {
    for (Gamma g : ex.gammas) {
      std::cout << "  snr " << format_double(snr) << " dB  " << to_string(g) << ":";
      for (const auto& pc : ex.placements) {
        const int P = pc.V.parts();
        const auto v = select_maxmin(res.rows, g, P, snr);
        std::cout << "  P=" << P << " median maxmin " << median(v) << " (x P " << median(v) * P
                  << ")";
      }
      std::cout << '\n';
    }
  }
  if (res.trials_resampled > 0) {
    std::cout << "  " << res.trials_resampled << " trials needed a channel redraw ("
              << res.resamples << " draws discarded)\n";
  }
  if (res.unconverged > 0) std::cout << "  " << res.unconverged << " BF solves hit the iteration limit\n";
}

int cmd_run(const ScenarioArgs& args, const std::string& out_dir, int workers, bool serial) {
  const ScenarioSpec spec = args.resolve();
  fs::create_directories(out_dir);
  const ExperimentResult res =
      serial ? run_experiment_serial(spec.experiment) : run_experiment(spec.experiment, workers);

  const fs::path dir(out_dir);
  const std::vector<std::string> artifacts{"samples.csv", "cdf.csv", "improvement.csv",
                                           "manifest.json"};
  {
    auto out = open_output(dir / "samples.csv");
    write_samples_csv(out, res.rows);
  }
  {
    auto out = open_output(dir / "cdf.csv");
    write_cdf_csv(out, maxmin_cdfs(res.rows, spec.cdf_snr_db()));
  }
  {
    auto out = open_output(dir / "improvement.csv");
    write_improvement_csv(out, rate_improvement(res.rows, spec.baseline()));
  }
  {
    auto out = open_output(dir / "manifest.json");
    write_manifest_json(out, spec, res, serial ? 1 : workers, artifacts);
  }
  print_summary(spec, res);
  if (res.failure_rate() > kMaxFailureRate) {
    std::cerr << "error: " << res.trials_resampled << " of " << res.trials
              << " trials hit numerical failures (limit 1%)\n";
    return kExitFailures;
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  const auto report = validate_file(path);
  for (const auto& s : report.passed) std::cout << "ok    " << s << '\n';
  for (const auto& s : report.failed) std::cout << "FAIL  " << s << '\n';
  std::cout << (report.ok() ? "valid\n" : "invalid\n");
  return report.ok() ? 0 : kExitViolations;
}

const PlacementCase& pick_placement(const ExperimentConfig& ex, int P) {
  for (const auto& pc : ex.placements) {
    if (pc.V.parts() == P) return pc;
  }
  if (P == 0 && ex.placements.size() == 1) return ex.placements.front();
  throw ConfigError("no configured placement has P=" + std::to_string(P));
}

int cmd_solve(const ScenarioArgs& args, int P, const std::string& gamma_text, int trial,
              const std::string& out_path) {
  const ScenarioSpec spec = args.resolve();
  const auto& ex = spec.experiment;
  const auto& pc = pick_placement(ex, P);
  const Gamma gamma = parse_gamma(gamma_text);
  const DeliveryPlan plan(pc.V);
  const NetworkConfig cfg =
      NetworkConfig::with_snr_db(ex.network.K, ex.network.t, ex.network.L, ex.snr_db.front());
  const SeedSpec seed{ex.seed, static_cast<std::uint64_t>(trial), 0};
  const ChannelMatrix H = sample_channel(cfg, seed);
  BfOptions bf;
  bf.restarts = ex.restarts;
  bf.seed = derived_engine(seed, RngStream::BeamformerRestarts, 0)();
  const auto sol = solve(gamma, plan, H, cfg, ex.mode, bf);
  const auto table = sinr_table(plan, H, sol, cfg);
  const auto rates = evaluate_rates(table, plan.parts(), cfg, ex.mode);
  if (out_path.empty()) {
    write_solution_json(std::cout, plan, cfg, sol, table, rates);
  } else {
    auto out = open_output(out_path);
    write_solution_json(out, plan, cfg, sol, table, rates);
  }
  return 0;
}

int cmd_dump_channels(const ScenarioArgs& args, const std::string& out_path) {
  const ScenarioSpec spec = args.resolve();
  const auto& ex = spec.experiment;
  std::ofstream file;
  if (!out_path.empty()) file = open_output(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << "trial,k,l,re,im\n";
  for (int i = 0; i < ex.trials; ++i) {
    write_channel_csv(out, i, sample_channel(ex.network, {ex.seed, static_cast<std::uint64_t>(i), 0}));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded-caching MISO beamforming simulator"};
  app.require_subcommand(1);

  ScenarioArgs run_args;
  std::string out_dir = "out";
  int workers = 0;
  bool serial = false;
  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment and write CSV + manifest");
  run_args.attach(run, true);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--workers", workers, "OpenMP threads (0: default)");
  run->add_flag("--serial", serial, "Use the single-threaded reference driver");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a placement or scenario file");
  validate->add_option("path", validate_path, "File to check")->required();

  ScenarioArgs solve_args;
  int solve_P = 0, solve_trial = 0;
  std::string solve_gamma = "BF", solve_out;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one channel realization and print JSON");
  solve_args.attach(solve_cmd, true);
  solve_cmd->add_option("--P", solve_P, "Placement row count");
  solve_cmd->add_option("--gamma", solve_gamma, "EP | PL | BF");
  solve_cmd->add_option("--trial", solve_trial, "Trial index of the realization");
  solve_cmd->add_option("--out", solve_out, "Output file (default stdout)");

  ScenarioArgs dump_args;
  std::string dump_out;
  auto* dump = app.add_subcommand("dump-channels", "Write the channel draws of a scenario as CSV");
  dump_args.attach(dump, true);
  dump->add_option("--out", dump_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args, out_dir, workers, serial);
    if (*validate) return cmd_validate(validate_path);
    if (*solve_cmd) return cmd_solve(solve_args, solve_P, solve_gamma, solve_trial, solve_out);
    if (*dump) return cmd_dump_channels(dump_args, dump_out);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailures;
  }
  return 0;
}
