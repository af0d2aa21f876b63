#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccbeam/beamform.hpp"

namespace ccbeam {

struct PlacementCase {
  /// Block spec the matrix was built from, e.g. "stride:3+stride:1".
  std::string label;
  PlacementMatrix V;
};

struct ExperimentConfig {
  /// K, t, L; Po/N0 is taken from snr_db per sample.
  NetworkConfig network;
  std::vector<PlacementCase> placements;
  std::vector<Gamma> gammas;
  std::vector<double> snr_db;
  int trials = 1000;
  std::uint64_t seed = 1;
  RateMode mode = RateMode::LowSnr;
  int restarts = 3;
  /// Channel draws allowed per trial before the run is aborted.
  int max_attempts = 100;

  /// Throws ConfigError: trials >= 1, placements share K and t and have
  /// distinct P, snr grid nonempty, restarts >= 1.
  void validate() const;
};

/// One (trial, placement, gamma, snr) outcome.
struct SampleRow {
  int trial = 0;
  Gamma gamma = Gamma::EP;
  int P = 0;
  double snr_db = 0.0;
  RateMode mode = RateMode::LowSnr;
  /// min over MAC terms of SINR * N0/Po: the received power of the weakest
  /// term in watts when N0 = 1 W.
  double maxmin = 0.0;
  double r_s = 0.0;
  double T = kInfiniteTime;
  double R = 0.0;
};

struct TrialOutcome {
  std::vector<SampleRow> rows;
  /// Channel draws discarded before a usable one was found.
  int resamples = 0;
  /// BF solves that hit the iteration limit (their result is still used).
  int unconverged = 0;
};

/// Runs every (placement, gamma, snr) combination on one channel draw,
/// redrawing with the next attempt index when a solver rejects it. The same
/// kernel backs the serial and the parallel drivers.
TrialOutcome run_trial(const ExperimentConfig& ec, int trial);

struct ExperimentResult {
  /// Ordered by trial, then placement, gamma, snr as configured.
  std::vector<SampleRow> rows;
  int trials = 0;
  int resamples = 0;
  /// Trials that needed at least one redraw.
  int trials_resampled = 0;
  int unconverged = 0;
  double wall_seconds = 0.0;

  double failure_rate() const { return trials ? double(trials_resampled) / trials : 0.0; }
};

/// Reference implementation: trials in order on the calling thread.
ExperimentResult run_experiment_serial(const ExperimentConfig& ec);

/// OpenMP over trials; workers <= 0 uses the OpenMP default. The result is
/// identical to run_experiment_serial for any worker count.
ExperimentResult run_experiment(const ExperimentConfig& ec, int workers = 0);

struct CdfSeries {
  Gamma gamma = Gamma::EP;
  int P = 0;
  /// "raw" or "P-scaled".
  std::string statistic;
  std::vector<double> x;
  std::vector<double> F;

  /// Fraction of samples <= v.
  double at(double v) const;
};

/// Sorted samples with F_i = i/n; multiplied by P first when scale_by_P.
/// Throws InvalidArgument on empty input.
CdfSeries empirical_cdf(std::vector<double> samples, bool scale_by_P, int P = 1);

/// Raw and P-scaled maxmin CDFs for every (gamma, P) at one SNR.
std::vector<CdfSeries> maxmin_cdfs(const std::vector<SampleRow>& rows, double snr_db);

double median(std::vector<double> v);
double mean(const std::vector<double>& v);

struct ImprovementRow {
  Gamma gamma = Gamma::EP;
  int P = 0;
  double snr_db = 0.0;
  double mean_R = 0.0;
  double improvement_pct = 0.0;
};

/// Per (gamma, P, snr): 100 (mean R - mean R at baseline_P) / mean R at
/// baseline_P. Throws InvalidArgument if some (gamma, snr) lacks the baseline.
std::vector<ImprovementRow> rate_improvement(const std::vector<SampleRow>& rows, int baseline_P);

/// maxmin values of the rows matching (gamma, P, snr).
std::vector<double> select_maxmin(const std::vector<SampleRow>& rows, Gamma gamma, int P,
                                  double snr_db);

}  // namespace ccbeam
