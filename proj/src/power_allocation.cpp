#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>

#include "ccbeam/interior_point.hpp"
#include "ccbeam/beamform.hpp"

namespace ccbeam {

PowerAllocation max_min_allocation(std::span<const double> c) {
  if (c.empty()) throw InvalidArgument("max_min_allocation: no streams");
  double inv_sum = 0.0;
  for (double v : c) {
    if (!(v > 0.0)) throw InfeasibleRealization("max_min_allocation: a stream has zero gain");
    inv_sum += 1.0 / v;
  }
  PowerAllocation out;
  out.alpha.reserve(c.size());
  for (double v : c) out.alpha.push_back(1.0 / (v * inv_sum));
  out.objective = 1.0 / inv_sum;
  return out;
}

std::vector<double> stream_gains(const DeliveryPlan& plan, const ChannelMatrix& H,
                                 std::span<const ZfDirection> zf) {
  std::vector<double> c(plan.num_streams(), std::numeric_limits<double>::infinity());
  for (int s = 0; s < plan.num_streams(); ++s) {
    for (int k : plan.served_users[s]) {
      c[s] = std::min(c[s], std::norm((H.row(k) * zf[s].u).value()));
    }
  }
  return c;
}

BeamformerSolution solve_pl_lowsnr(const DeliveryPlan& plan, const ChannelMatrix& H,
                                   const NetworkConfig& cfg) {
  const auto zf = zf_directions(plan, H);
  const auto alloc = max_min_allocation(stream_gains(plan, H, zf));
  BeamformerSolution sol;
  sol.gamma = Gamma::PL;
  sol.mode = RateMode::LowSnr;
  for (int s = 0; s < plan.num_streams(); ++s) {
    sol.streams.push_back({plan.streams[s], zf[s].u, alloc.alpha[s]});
    sol.degenerate = sol.degenerate || zf[s].degenerate;
  }
  sol.objective = alloc.objective * cfg.snr();
  return sol;
}

namespace {

// SNR-scaled ZF gains of every MAC term, grouped by user.
struct TermGains {
  std::vector<std::vector<int>> stream;
  std::vector<std::vector<double>> gain;

  double rate(std::span<const double> alpha) const {
    double r = std::numeric_limits<double>::infinity();
    std::vector<double> s;
    for (std::size_t k = 0; k < gain.size(); ++k) {
      s.clear();
      for (std::size_t j = 0; j < gain[k].size(); ++j) s.push_back(gain[k][j] * alpha[stream[k][j]]);
      r = std::min(r, mac_symmetric_rate(s));
    }
    return r;
  }
};

struct Cut {
  int user;
  std::vector<int> terms;
  bool operator<(const Cut& o) const {
    return std::tie(user, terms) < std::tie(o.user, o.terms);
  }
};

// Term indices of user k sorted by their current received SINR.
std::vector<int> ascending_terms(const TermGains& g, int k, std::span<const double> alpha) {
  std::vector<int> idx(g.gain[k].size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return g.gain[k][a] * alpha[g.stream[k][a]] < g.gain[k][b] * alpha[g.stream[k][b]];
  });
  return idx;
}

void add_prefix_cuts(const TermGains& g, std::span<const double> alpha, std::set<Cut>& cuts) {
  for (int k = 0; k < static_cast<int>(g.gain.size()); ++k) {
    const auto order = ascending_terms(g, k, alpha);
    for (std::size_t sz = 1; sz <= order.size(); ++sz) {
      std::vector<int> terms(order.begin(), order.begin() + sz);
      std::sort(terms.begin(), terms.end());
      cuts.insert({k, std::move(terms)});
    }
  }
}

// Is there alpha >= 0, sum alpha <= 1, meeting every MAC subset constraint at
// symmetric rate r? Solves max s s.t. sum_J g alpha >= s (e^{|J| r} - 1) over
// the current cuts, then separates the full constraint set by sorting.
bool rate_feasible(const TermGains& g, int n, double r, std::set<Cut>& cuts,
                   std::vector<double>& alpha_out, const PlExactOptions& opt) {
  for (int round = 0; round < opt.max_cut_rounds; ++round) {
    const int m = static_cast<int>(cuts.size()) + n + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    int row = 0;
    for (const Cut& cut : cuts) {
      for (int j : cut.terms) A(row, g.stream[cut.user][j]) += g.gain[cut.user][j];
      A(row, n) = -std::expm1(static_cast<double>(cut.terms.size()) * r);
      ++row;
    }
    for (int i = 0; i < n; ++i) A(row++, i) = 1.0;
    A.row(row).head(n).setConstant(-1.0);
    b[row] = 1.0;

    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(n + 1, 1.0 / (n + 1));
    double s0 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(cuts.size()); ++i) {
      s0 = std::min(s0, A.row(i).head(n).dot(x0.head(n)) / -A(i, n));
    }
    x0[n] = 0.5 * s0;
    ipm::Options iopt;
    iopt.rel_tol = 1e-10;
    iopt.initial_gap = std::max(s0, 1e-12);
    const auto res = ipm::maximize(ipm::LinearProblem(A, b, n), x0, iopt);
    if (res.x[n] < 1.0) return false;

    std::vector<double> alpha(res.x.data(), res.x.data() + n);
    const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    for (double& a : alpha) a /= total;

    bool violated = false;
    for (int k = 0; k < static_cast<int>(g.gain.size()); ++k) {
      const auto order = ascending_terms(g, k, alpha);
      double prefix = 0.0;
      for (std::size_t sz = 1; sz <= order.size(); ++sz) {
        const int j = order[sz - 1];
        prefix += g.gain[k][j] * alpha[g.stream[k][j]];
        if (prefix < std::expm1(static_cast<double>(sz) * r)) {
          std::vector<int> terms(order.begin(), order.begin() + sz);
          std::sort(terms.begin(), terms.end());
          violated = cuts.insert({k, std::move(terms)}).second || violated;
        }
      }
    }
    if (!violated) {
      alpha_out = std::move(alpha);
      return true;
    }
  }
  return false;
}

}  // namespace

BeamformerSolution solve_pl_exact(const DeliveryPlan& plan, const ChannelMatrix& H,
                                  const NetworkConfig& cfg, const PlExactOptions& opt) {
  const auto zf = zf_directions(plan, H);
  const int n = plan.num_streams();
  TermGains g;
  for (int k = 0; k < plan.users(); ++k) {
    g.stream.emplace_back();
    g.gain.emplace_back();
    for (const auto& term : plan.user_terms[k]) {
      const double c = std::norm((H.row(k) * zf[term.stream].u).value()) * cfg.snr();
      if (!(c > 0.0)) throw InfeasibleRealization("solve_pl_exact: a MAC term has zero gain");
      g.stream[k].push_back(term.stream);
      g.gain[k].push_back(c);
    }
  }

  std::vector<double> best(n, 1.0 / n);
  double lo = g.rate(best);
  double hi = g.rate(std::vector<double>(n, 1.0));
  if (hi < lo * (1.0 - 1e-12)) throw NumericalError("solve_pl_exact: bisection failed to bracket");

  std::set<Cut> cuts;
  add_prefix_cuts(g, best, cuts);
  int iterations = 0;
  std::vector<double> alpha;
  while (hi - lo > opt.rel_tol * hi && iterations < opt.max_bisections) {
    ++iterations;
    const double mid = 0.5 * (lo + hi);
    if (rate_feasible(g, n, mid, cuts, alpha, opt)) {
      const double achieved = g.rate(alpha);
      if (achieved > lo) {
        lo = std::max(mid, achieved);
        best = alpha;
      } else {
        lo = mid;
      }
    } else {
      hi = mid;
    }
  }

  BeamformerSolution sol;
  sol.gamma = Gamma::PL;
  sol.mode = RateMode::Exact;
  sol.iterations = iterations;
  sol.converged = hi - lo <= opt.rel_tol * hi;
  for (int s = 0; s < n; ++s) {
    sol.streams.push_back({plan.streams[s], zf[s].u, best[s]});
    sol.degenerate = sol.degenerate || zf[s].degenerate;
  }
  sol.objective = g.rate(best);
  return sol;
}

}  // namespace ccbeam
