#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ccbeam/experiment_config.hpp"

namespace ccbeam {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest text that reads back to the same double; "inf" / "nan" otherwise.
std::string format_double(double v);

/// Header trial,gamma,P,snr_db,mode,maxmin,r_s,T,R.
void write_samples_csv(std::ostream& out, const std::vector<SampleRow>& rows);

/// Header gamma,P,statistic,x,F.
void write_cdf_csv(std::ostream& out, const std::vector<CdfSeries>& series);

/// Header gamma,P,snr_db,mean_R,improvement_pct.
void write_improvement_csv(std::ostream& out, const std::vector<ImprovementRow>& rows);

/// Everything needed to rerun: scenario echo (placements as row text),
/// seed, worker count, library version, timings and failure counters.
void write_manifest_json(std::ostream& out, const ScenarioSpec& spec, const ExperimentResult& result,
                         int workers, const std::vector<std::string>& artifacts);

/// One solved realization: beams, SINR table and rates.
void write_solution_json(std::ostream& out, const DeliveryPlan& plan, const NetworkConfig& cfg,
                         const BeamformerSolution& sol, const SinrTable& table,
                         const RateResult& rates);

}  // namespace ccbeam
