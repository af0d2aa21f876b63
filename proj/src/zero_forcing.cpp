#include <cmath>
#include <complex>

#include "ccbeam/beamform.hpp"

namespace ccbeam {

std::string to_string(Gamma g) {
  switch (g) {
    case Gamma::EP: return "EP";
    case Gamma::PL: return "PL";
    case Gamma::BF: return "BF";
  }
  return "?";
}

Gamma parse_gamma(const std::string& text) {
  if (text == "EP" || text == "ep") return Gamma::EP;
  if (text == "PL" || text == "pl") return Gamma::PL;
  if (text == "BF" || text == "bf") return Gamma::BF;
  throw ConfigError("unknown beamformer '" + text + "' (expected EP, PL or BF)");
}

namespace {

constexpr double kRankTol = 1e-10;

void fix_phase(Eigen::VectorXcd& u) {
  const double norm = u.norm();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u[i]);
    if (mag > 1e-12 * norm) {
      u *= std::conj(u[i]) / mag;
      u[i] = {u[i].real(), 0.0};
      break;
    }
  }
  u /= u.norm();
}

}  // namespace

ZfDirection zf_direction(const ChannelMatrix& H, UserSet S) {
  if (!H.allFinite()) throw NumericalError("zf_direction: channel has non-finite entries");
  const Eigen::Index L = H.cols();
  std::vector<int> excluded;
  for (int k = 0; k < H.rows(); ++k) {
    if (!S.contains(k)) excluded.push_back(k);
  }
  ZfDirection out;
  if (excluded.empty()) {
    out.u = Eigen::VectorXcd::Unit(L, 0);
    return out;
  }
  Eigen::MatrixXcd A(excluded.size(), L);
  for (std::size_t i = 0; i < excluded.size(); ++i) A.row(i) = H.row(excluded[i]);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankTol * top && top > 0.0) ++rank;
  }
  if (rank >= L) throw NumericalError("zf_direction: excluded channels span the whole space");
  // Null space of A is spanned by the trailing right singular vectors.
  out.degenerate = L - rank > 1;
  out.u = svd.matrixV().col(out.degenerate ? rank : L - 1);
  fix_phase(out.u);
  return out;
}

std::vector<ZfDirection> zf_directions(const DeliveryPlan& plan, const ChannelMatrix& H) {
  std::vector<ZfDirection> out;
  out.reserve(plan.streams.size());
  for (UserSet S : plan.streams) out.push_back(zf_direction(H, S));
  return out;
}

BeamformerSolution solve_ep(const DeliveryPlan& plan, const ChannelMatrix& H,
                            const NetworkConfig& cfg) {
  BeamformerSolution sol;
  sol.gamma = Gamma::EP;
  const auto zf = zf_directions(plan, H);
  const double alpha = 1.0 / plan.num_streams();
  for (int s = 0; s < plan.num_streams(); ++s) {
    sol.streams.push_back({plan.streams[s], zf[s].u, alpha});
    sol.degenerate = sol.degenerate || zf[s].degenerate;
  }
  sol.objective = sinr_table(plan, H, sol, cfg).min();
  return sol;
}

}  // namespace ccbeam
