#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccbeam/montecarlo.hpp"

namespace ccbeam {

/// A runnable experiment plus the reporting choices around it.
struct ScenarioSpec {
  std::string name = "custom";
  ExperimentConfig experiment;
  /// Reference P of the improvement table; the smallest P when unset.
  std::optional<int> baseline_P;

  int baseline() const;
  /// CDFs are reported at the first SNR of the grid.
  double cdf_snr_db() const { return experiment.snr_db.front(); }
};

/// Built-in scenarios: "bars-fig1to3" (K=6, t=2, L=4, P in {3,6,9,12,15},
/// exact rates) and "cdf-fig4to6" (K=6, t=3, L=3, P in {2,8,20}, low-SNR,
/// 0 dB). Throws ConfigError for any other name.
ScenarioSpec preset_scenario(const std::string& name);

std::vector<std::string> preset_names();

/// Parses key = value lines ('#' starts a comment). Keys:
///   scenario    preset to start from (default: custom)
///   K, t, L     network size; L defaults to K - t
///   placements  comma-separated block specs, e.g. stride:3, stride:3+stride:1, comb
///   P           comma-separated row counts, decomposed into base blocks
///   gammas      subset of EP, PL, BF
///   snr_db      comma-separated grid
///   trials, seed, mode (exact | lowsnr), restarts, baseline_P
/// Throws ConfigError naming the offending line.
ScenarioSpec parse_scenario(std::istream& in);
ScenarioSpec load_scenario(const std::string& path);

/// Comma-separated numbers, e.g. "0,4,8".
std::vector<double> parse_number_list(const std::string& text);
std::vector<Gamma> parse_gamma_list(const std::string& text);

/// Invariant report for a config or placement file without running trials.
struct ValidationReport {
  std::vector<std::string> passed;
  std::vector<std::string> failed;
  bool ok() const { return failed.empty(); }
};

/// Accepts a placement file ("P K t" then P rows of 0/1) or a scenario file.
ValidationReport validate_file(const std::string& path);

}  // namespace ccbeam
