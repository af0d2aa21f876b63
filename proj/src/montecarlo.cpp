#include "ccbeam/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include <omp.h>

namespace ccbeam {

void ExperimentConfig::validate() const {
  network.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (snr_db.empty()) throw ConfigError("snr grid is empty");
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw ConfigError("snr values must be finite");
  }
  std::set<int> seen;
  for (const auto& pc : placements) {
    if (pc.V.users() != network.K || pc.V.gain() != network.t) {
      throw ConfigError("placement '" + pc.label + "' does not match K=" +
                        std::to_string(network.K) + ", t=" + std::to_string(network.t));
    }
    if (!rows_distinct(pc.V)) {
      throw ConfigError("placement '" + pc.label + "' repeats a row; its codewords are not decodable");
    }
    if (!seen.insert(pc.V.parts()).second) {
      throw ConfigError("two placements share P=" + std::to_string(pc.V.parts()));
    }
  }
}

namespace {

std::vector<DeliveryPlan> build_plans(const ExperimentConfig& ec) {
  std::vector<DeliveryPlan> plans;
  plans.reserve(ec.placements.size());
  for (const auto& pc : ec.placements) plans.emplace_back(pc.V);
  return plans;
}

TrialOutcome run_trial_with(const ExperimentConfig& ec, const std::vector<DeliveryPlan>& plans,
                            int trial) {
  TrialOutcome out;
  for (int attempt = 0; attempt < ec.max_attempts; ++attempt) {
    const SeedSpec seed{ec.seed, static_cast<std::uint64_t>(trial),
                        static_cast<std::uint64_t>(attempt)};
    const ChannelMatrix H = sample_channel(ec.network, seed);
    out.rows.clear();
    out.unconverged = 0;
    try {
      for (std::size_t pi = 0; pi < plans.size(); ++pi) {
        const auto& plan = plans[pi];
        for (Gamma gamma : ec.gammas) {
          for (double snr : ec.snr_db) {
            const NetworkConfig cfg =
                NetworkConfig::with_snr_db(ec.network.K, ec.network.t, ec.network.L, snr);
            BfOptions bf;
            bf.restarts = ec.restarts;
            bf.seed = derived_engine(seed, RngStream::BeamformerRestarts, pi)();
            const auto sol = solve(gamma, plan, H, cfg, ec.mode, bf);
            if (sol.degenerate) throw InfeasibleRealization("rank-deficient ZF exclusion set");
            if (!sol.converged) ++out.unconverged;
            const auto table = sinr_table(plan, H, sol, cfg);
            const auto rates = evaluate_rates(table, plan.parts(), cfg, ec.mode);
            out.rows.push_back({trial, gamma, plan.parts(), snr, ec.mode,
                                table.min() / cfg.snr(), rates.r_s, rates.T, rates.R});
          }
        }
      }
      return out;
    } catch (const NumericalError&) {
      ++out.resamples;
    }
  }
  throw NumericalError("trial " + std::to_string(trial) + ": no usable channel in " +
                       std::to_string(ec.max_attempts) + " draws");
}

ExperimentResult fold(std::vector<TrialOutcome>& outcomes) {
  ExperimentResult res;
  res.trials = static_cast<int>(outcomes.size());
  for (auto& o : outcomes) {
    res.resamples += o.resamples;
    res.trials_resampled += o.resamples > 0;
    res.unconverged += o.unconverged;
    res.rows.insert(res.rows.end(), o.rows.begin(), o.rows.end());
  }
  return res;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TrialOutcome run_trial(const ExperimentConfig& ec, int trial) {
  return run_trial_with(ec, build_plans(ec), trial);
}

ExperimentResult run_experiment_serial(const ExperimentConfig& ec) {
  ec.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto plans = build_plans(ec);
  std::vector<TrialOutcome> outcomes;
  outcomes.reserve(ec.trials);
  for (int i = 0; i < ec.trials; ++i) outcomes.push_back(run_trial_with(ec, plans, i));
  auto res = fold(outcomes);
  res.wall_seconds = seconds_since(start);
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& ec, int workers) {
  ec.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto plans = build_plans(ec);
  std::vector<TrialOutcome> outcomes(ec.trials);
  std::exception_ptr error;
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < ec.trials; ++i) {
    try {
      outcomes[i] = run_trial_with(ec, plans, i);
    } catch (...) {
#pragma omp critical(ccbeam_trial_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  auto res = fold(outcomes);
  res.wall_seconds = seconds_since(start);
  return res;
}

double CdfSeries::at(double v) const {
  if (x.empty()) return 0.0;
  const auto it = std::upper_bound(x.begin(), x.end(), v);
  return static_cast<double>(it - x.begin()) / static_cast<double>(x.size());
}

CdfSeries empirical_cdf(std::vector<double> samples, bool scale_by_P, int P) {
  if (samples.empty()) throw InvalidArgument("empirical_cdf: no samples");
  if (scale_by_P && P < 1) throw InvalidArgument("empirical_cdf: P must be >= 1");
  CdfSeries out;
  out.P = P;
  out.statistic = scale_by_P ? "P-scaled" : "raw";
  if (scale_by_P) {
    for (double& s : samples) s *= P;
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  out.F.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out.F.push_back(static_cast<double>(i + 1) / n);
  out.x = std::move(samples);
  return out;
}

std::vector<double> select_maxmin(const std::vector<SampleRow>& rows, Gamma gamma, int P,
                                  double snr_db) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.gamma == gamma && r.P == P && r.snr_db == snr_db) out.push_back(r.maxmin);
  }
  return out;
}

std::vector<CdfSeries> maxmin_cdfs(const std::vector<SampleRow>& rows, double snr_db) {
  // (gamma, P) in order of first appearance.
  std::vector<std::pair<Gamma, int>> keys;
  for (const auto& r : rows) {
    if (r.snr_db != snr_db) continue;
    const std::pair<Gamma, int> key{r.gamma, r.P};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  std::vector<CdfSeries> out;
  for (const auto& [gamma, P] : keys) {
    const auto samples = select_maxmin(rows, gamma, P, snr_db);
    for (bool scaled : {false, true}) {
      auto series = empirical_cdf(samples, scaled, P);
      series.gamma = gamma;
      series.P = P;
      out.push_back(std::move(series));
    }
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median: no samples");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2) return upper;
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + mid));
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw InvalidArgument("mean: no samples");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<ImprovementRow> rate_improvement(const std::vector<SampleRow>& rows, int baseline_P) {
  struct Acc {
    double sum = 0.0;
    int count = 0;
  };
  // Keyed by (gamma, snr, P) so rows come out grouped by gamma and snr.
  std::map<std::tuple<int, double, int>, Acc> acc;
  for (const auto& r : rows) {
    auto& a = acc[{static_cast<int>(r.gamma), r.snr_db, r.P}];
    a.sum += r.R;
    ++a.count;
  }
  std::vector<ImprovementRow> out;
  for (const auto& [key, a] : acc) {
    const auto& [g, snr, P] = key;
    const auto base = acc.find({g, snr, baseline_P});
    if (base == acc.end()) {
      throw InvalidArgument("rate_improvement: no samples at baseline P=" +
                            std::to_string(baseline_P) + " for " +
                            to_string(static_cast<Gamma>(g)));
    }
    const double ref = base->second.sum / base->second.count;
    const double m = a.sum / a.count;
    out.push_back({static_cast<Gamma>(g), P, snr, m, 100.0 * (m - ref) / ref});
  }
  return out;
}

}  // namespace ccbeam
