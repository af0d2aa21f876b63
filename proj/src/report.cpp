#include "ccbeam/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include <Eigen/Core>
#include <json.hpp>

namespace ccbeam {

using nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_samples_csv(std::ostream& out, const std::vector<SampleRow>& rows) {
  out << "trial,gamma,P,snr_db,mode,maxmin,r_s,T,R\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << to_string(r.gamma) << ',' << r.P << ',' << format_double(r.snr_db)
        << ',' << to_string(r.mode) << ',' << format_double(r.maxmin) << ','
        << format_double(r.r_s) << ',' << format_double(r.T) << ',' << format_double(r.R) << '\n';
  }
}

void write_cdf_csv(std::ostream& out, const std::vector<CdfSeries>& series) {
  out << "gamma,P,statistic,x,F\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << to_string(s.gamma) << ',' << s.P << ',' << s.statistic << ','
          << format_double(s.x[i]) << ',' << format_double(s.F[i]) << '\n';
    }
  }
}

void write_improvement_csv(std::ostream& out, const std::vector<ImprovementRow>& rows) {
  out << "gamma,P,snr_db,mean_R,improvement_pct\n";
  for (const auto& r : rows) {
    out << to_string(r.gamma) << ',' << r.P << ',' << format_double(r.snr_db) << ','
        << format_double(r.mean_R) << ',' << format_double(r.improvement_pct) << '\n';
  }
}

void write_manifest_json(std::ostream& out, const ScenarioSpec& spec, const ExperimentResult& result,
                         int workers, const std::vector<std::string>& artifacts) {
  const auto& ex = spec.experiment;
  ordered_json placements = ordered_json::array();
  for (const auto& pc : ex.placements) {
    ordered_json rows = ordered_json::array();
    for (UserSet r : pc.V.rows()) rows.push_back(r.to_string());
    placements.push_back({{"label", pc.label}, {"P", pc.V.parts()}, {"rows", rows}});
  }
  ordered_json gammas = ordered_json::array();
  for (Gamma g : ex.gammas) gammas.push_back(to_string(g));

  ordered_json m;
  m["tool"] = "ccbeam";
  m["version"] = kVersion;
  m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
               "." + std::to_string(EIGEN_MINOR_VERSION);
#if defined(__clang__)
  m["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  m["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  m["scenario"] = spec.name;
  m["config"] = {{"K", ex.network.K},
                 {"t", ex.network.t},
                 {"L", ex.network.L},
                 {"placements", placements},
                 {"gammas", gammas},
                 {"snr_db", ex.snr_db},
                 {"trials", ex.trials},
                 {"seed", ex.seed},
                 {"mode", to_string(ex.mode)},
                 {"restarts", ex.restarts},
                 {"baseline_P", spec.baseline()},
                 {"cdf_snr_db", spec.cdf_snr_db()}};
  m["workers"] = workers;
  m["wall_seconds"] = result.wall_seconds;
  m["resampled_trials"] = result.trials_resampled;
  m["resampled_draws"] = result.resamples;
  m["failure_rate"] = result.failure_rate();
  m["unconverged_bf"] = result.unconverged;
  m["artifacts"] = artifacts;
  out << m.dump(2) << '\n';
}

void write_solution_json(std::ostream& out, const DeliveryPlan& plan, const NetworkConfig& cfg,
                         const BeamformerSolution& sol, const SinrTable& table,
                         const RateResult& rates) {
  ordered_json streams = ordered_json::array();
  for (const auto& s : sol.streams) {
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (Eigen::Index i = 0; i < s.direction.size(); ++i) {
      re.push_back(s.direction[i].real());
      im.push_back(s.direction[i].imag());
    }
    streams.push_back({{"users", s.users.to_string()}, {"alpha", s.alpha},
                       {"direction_re", re}, {"direction_im", im}});
  }
  ordered_json users = ordered_json::array();
  for (std::size_t k = 0; k < table.users.size(); ++k) {
    ordered_json terms = ordered_json::array();
    for (const auto& e : table.users[k]) {
      terms.push_back({{"stream", e.stream.to_string()}, {"part", e.part}, {"sinr", e.sinr}});
    }
    users.push_back({{"user", k}, {"terms", terms}, {"rate", rates.per_user.at(k)}});
  }
  ordered_json j;
  j["network"] = cfg.describe();
  j["P"] = plan.parts();
  j["gamma"] = to_string(sol.gamma);
  j["mode"] = to_string(sol.mode);
  j["objective"] = sol.objective;
  j["converged"] = sol.converged;
  j["iterations"] = sol.iterations;
  j["streams"] = streams;
  j["sinr"] = users;
  j["r_s"] = rates.r_s;
  j["T"] = std::isfinite(rates.T) ? ordered_json(rates.T) : ordered_json("inf");
  j["R"] = rates.R;
  out << j.dump(2) << '\n';
}

}  // namespace ccbeam
