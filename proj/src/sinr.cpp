#include <complex>

#include "ccbeam/beamform.hpp"

namespace ccbeam {

SinrTable sinr_table(const DeliveryPlan& plan, const ChannelMatrix& H,
                     const BeamformerSolution& sol, const NetworkConfig& cfg) {
  const int K = plan.users();
  if (static_cast<int>(sol.streams.size()) != plan.num_streams() || H.rows() != K ||
      H.cols() != plan.antennas()) {
    throw DimensionError("sinr_table: solution, channel and plan disagree");
  }
  // Received power of every stream at every user.
  Eigen::MatrixXd power(K, plan.num_streams());
  for (int s = 0; s < plan.num_streams(); ++s) {
    const auto& beam = sol.streams[s];
    for (int k = 0; k < K; ++k) {
      const std::complex<double> y = (H.row(k) * beam.direction).value();
      power(k, s) = beam.alpha * cfg.Po * std::norm(y);
    }
  }
  const bool zero_forced = sol.gamma != Gamma::BF;
  SinrTable table;
  table.users.resize(K);
  for (int k = 0; k < K; ++k) {
    double interference = 0.0;
    if (!zero_forced) {
      for (int s : plan.interferers[k]) interference += power(k, s);
    }
    for (const auto& term : plan.user_terms[k]) {
      table.users[k].push_back(
          {plan.streams[term.stream], term.part, power(k, term.stream) / (interference + cfg.N0)});
    }
  }
  return table;
}

BeamformerSolution solve(Gamma gamma, const DeliveryPlan& plan, const ChannelMatrix& H,
                         const NetworkConfig& cfg, RateMode mode, const BfOptions& bf) {
  switch (gamma) {
    case Gamma::EP: {
      auto sol = solve_ep(plan, H, cfg);
      sol.mode = mode;
      if (mode == RateMode::Exact) {
        sol.objective = evaluate_rates(sinr_table(plan, H, sol, cfg), plan.parts(), cfg, mode).r_s;
      }
      return sol;
    }
    case Gamma::PL:
      return mode == RateMode::Exact ? solve_pl_exact(plan, H, cfg) : solve_pl_lowsnr(plan, H, cfg);
    case Gamma::BF:
      return solve_bf(plan, H, cfg, mode, bf);
  }
  throw InvalidArgument("unknown beamformer structure");
}

}  // namespace ccbeam
