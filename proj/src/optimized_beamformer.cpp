#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "ccbeam/interior_point.hpp"
#include "ccbeam/beamform.hpp"

namespace ccbeam {
namespace {

// Beamformers live in real coordinates normalized by sqrt(Po): stream s
// occupies x[2Ls, 2Ls + 2L), real parts first, and sigma2 = N0/Po. With the
// noise written as sigma2 ||x||^2 every SINR is invariant to scaling x, and it
// equals the physical SINR on the unit sphere (full power). The power budget
// therefore never appears as a constraint; iterates are rescaled instead.
struct Geometry {
  int K = 0, L = 0, n = 0, N = 0;
  double sigma2 = 0.0;
  std::vector<Eigen::MatrixXd> M;  // per user, 2 x 2L: [Re; Im] of h_k^T w
  std::vector<Eigen::MatrixXd> Q;  // M^T M
  std::vector<int> term_user, term_stream;
  std::vector<std::vector<int>> user_terms;
  std::vector<std::vector<int>> interferers;

  Geometry(const DeliveryPlan& plan, const ChannelMatrix& H, const NetworkConfig& cfg)
      : K(plan.users()), L(plan.antennas()), n(plan.num_streams()), N(2 * L * n),
        sigma2(cfg.N0 / cfg.Po), user_terms(K), interferers(plan.interferers) {
    for (int k = 0; k < K; ++k) {
      Eigen::MatrixXd m(2, 2 * L);
      const Eigen::RowVectorXd hr = H.row(k).real(), hi = H.row(k).imag();
      m << hr, -hi, hi, hr;
      Q.push_back(m.transpose() * m);
      M.push_back(std::move(m));
      for (const auto& term : plan.user_terms[k]) {
        user_terms[k].push_back(static_cast<int>(term_user.size()));
        term_user.push_back(k);
        term_stream.push_back(term.stream);
      }
    }
  }

  int terms() const { return static_cast<int>(term_user.size()); }
  int block(int s) const { return 2 * L * s; }
  auto seg(const Eigen::VectorXd& x, int s) const { return x.segment(block(s), 2 * L); }

  // Interference plus noise at user k.
  double denominator(const Eigen::VectorXd& x, int k) const {
    double I = sigma2 * x.squaredNorm();
    for (int j : interferers[k]) I += (M[k] * seg(x, j)).squaredNorm();
    return I;
  }

  std::vector<double> sinrs(const Eigen::VectorXd& x, int k) const {
    const double D = denominator(x, k);
    std::vector<double> out;
    for (int i : user_terms[k]) out.push_back((M[k] * seg(x, term_stream[i])).squaredNorm() / D);
    return out;
  }

  double objective(const Eigen::VectorXd& x, RateMode mode) const {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      const auto s = sinrs(x, k);
      best = std::min(best, mode == RateMode::Exact ? mac_symmetric_rate(s) : symmetric_rate_lowsnr(s));
    }
    return best;
  }
};

// Concave minorant of each term's SINR, tight at the incumbent xb:
//   g_i(x) = lin_i . x_s - beta_i D_k(x).
struct Surrogate {
  std::vector<Eigen::VectorXd> lin;
  std::vector<double> beta;

  Surrogate(const Geometry& geo, const Eigen::VectorXd& xb) {
    for (int i = 0; i < geo.terms(); ++i) {
      const int k = geo.term_user[i];
      const double D = geo.denominator(xb, k);
      const Eigen::Vector2d a = geo.M[k] * geo.seg(xb, geo.term_stream[i]);
      lin.push_back((2.0 / D) * geo.M[k].transpose() * a);
      beta.push_back(a.squaredNorm() / (D * D));
    }
  }

  double value(const Geometry& geo, const Eigen::VectorXd& x, int i,
               std::span<const double> denominator) const {
    return lin[i].dot(geo.seg(x, geo.term_stream[i])) - beta[i] * denominator[geo.term_user[i]];
  }
};

// Shared bookkeeping for the two surrogate programs. The decision vector is
// z = [x; objective].
class SurrogateProblem {
 public:
  SurrogateProblem(const Geometry& geo, const Surrogate& sur) : geo_(geo), sur_(sur) {}
  int dim() const { return geo_.N + 1; }
  int objective_index() const { return geo_.N; }

 protected:
  std::vector<double> denominators(const Eigen::VectorXd& z) const {
    std::vector<double> D(geo_.K);
    for (int k = 0; k < geo_.K; ++k) D[k] = geo_.denominator(z.head(geo_.N), k);
    return D;
  }

  void add_term_gradient(const Eigen::VectorXd& z, int i, Eigen::Ref<Eigen::VectorXd> col) const {
    const int k = geo_.term_user[i];
    const double w = 2.0 * sur_.beta[i];
    col.head(geo_.N) -= (w * geo_.sigma2) * z.head(geo_.N);
    col.segment(geo_.block(geo_.term_stream[i]), 2 * geo_.L) += sur_.lin[i];
    for (int j : geo_.interferers[k]) {
      col.segment(geo_.block(j), 2 * geo_.L) -= w * (geo_.Q[k] * geo_.seg(z, j));
    }
  }

  // h += sum_k weight[k] (-hess D_k).
  void add_denominator_curvature(std::span<const double> weight, Eigen::MatrixXd& h) const {
    const int b = 2 * geo_.L;
    double noise = 0.0;
    for (int k = 0; k < geo_.K; ++k) {
      if (weight[k] == 0.0) continue;
      noise += weight[k];
      for (int j : geo_.interferers[k]) {
        h.block(geo_.block(j), geo_.block(j), b, b) += (2.0 * weight[k]) * geo_.Q[k];
      }
    }
    h.diagonal().head(geo_.N).array() += 2.0 * geo_.sigma2 * noise;
  }

  static bool all_positive(const Eigen::VectorXd& f) {
    return (f.array() > 0.0).all() && f.allFinite();
  }

  const Geometry& geo_;
  const Surrogate& sur_;
};

// maximize t  s.t.  g_i(x) >= t for every term.
class MinSinrProblem : public SurrogateProblem {
 public:
  using SurrogateProblem::SurrogateProblem;
  int num_constraints() const { return geo_.terms(); }

  bool values(const Eigen::VectorXd& z, Eigen::VectorXd& f) const {
    const auto D = denominators(z);
    for (int i = 0; i < geo_.terms(); ++i) f[i] = sur_.value(geo_, z, i, D) - z[geo_.N];
    return all_positive(f);
  }

  void jacobian(const Eigen::VectorXd& z, Eigen::MatrixXd& J) const {
    J.setZero(dim(), num_constraints());
    for (int i = 0; i < geo_.terms(); ++i) {
      add_term_gradient(z, i, J.col(i));
      J(geo_.N, i) = -1.0;
    }
  }

  void add_curvature(const Eigen::VectorXd&, const Eigen::VectorXd& w, Eigen::MatrixXd& h) const {
    std::vector<double> weight(geo_.K, 0.0);
    for (int i = 0; i < geo_.terms(); ++i) weight[geo_.term_user[i]] += w[i] * sur_.beta[i];
    add_denominator_curvature(weight, h);
  }
};

struct Cut {
  int user;
  std::vector<int> terms;
  bool operator<(const Cut& o) const { return std::tie(user, terms) < std::tie(o.user, o.terms); }
};

// One ascent step on the surrogate rate. With rb the incumbent rate and
// w_c = exp(-|J| rb):
//   maximize t  s.t.  w_c (1 + sum_{i in J} g_i(x)) - 1 >= t for every cut (k, J).
// Any t > 0 certifies that every cut beats rb.
class CutProblem : public SurrogateProblem {
 public:
  CutProblem(const Geometry& geo, const Surrogate& sur, const std::vector<Cut>& cuts, double rb)
      : SurrogateProblem(geo, sur), cuts_(cuts) {
    for (const Cut& cut : cuts_) scale_.push_back(std::exp(-static_cast<double>(cut.terms.size()) * rb));
  }
  int num_constraints() const { return static_cast<int>(cuts_.size()); }

  bool values(const Eigen::VectorXd& z, Eigen::VectorXd& f) const {
    const auto D = denominators(z);
    for (std::size_t c = 0; c < cuts_.size(); ++c) f[c] = slack(z, c, D) - z[geo_.N];
    return all_positive(f);
  }

  void jacobian(const Eigen::VectorXd& z, Eigen::MatrixXd& J) const {
    J.setZero(dim(), num_constraints());
    for (std::size_t c = 0; c < cuts_.size(); ++c) {
      for (int i : cuts_[c].terms) add_term_gradient(z, i, J.col(c));
      J.col(c) *= scale_[c];
      J(geo_.N, c) = -1.0;
    }
  }

  void add_curvature(const Eigen::VectorXd&, const Eigen::VectorXd& w, Eigen::MatrixXd& h) const {
    std::vector<double> weight(geo_.K, 0.0);
    for (std::size_t c = 0; c < cuts_.size(); ++c) {
      for (int i : cuts_[c].terms) weight[cuts_[c].user] += w[c] * scale_[c] * sur_.beta[i];
    }
    add_denominator_curvature(weight, h);
  }

  double slack(const Eigen::VectorXd& z, std::size_t c, std::span<const double> D) const {
    double sum = 1.0;
    for (int i : cuts_[c].terms) sum += sur_.value(geo_, z, i, D);
    return scale_[c] * sum - 1.0;
  }

 private:
  const std::vector<Cut>& cuts_;
  std::vector<double> scale_;
};

constexpr double kMargin = 0.5;
constexpr int kMaxCutRounds = 16;
constexpr double kStartSlack = 1e-2;

// floor is the objective magnitude below which the gap test turns absolute.
ipm::Options surrogate_options(double scale, double floor) {
  ipm::Options opt;
  opt.rel_tol = 1e-7;
  opt.feas_tol = 1e-7;
  opt.abs_floor = floor;
  opt.initial_gap = std::abs(scale) + 1e-12;
  return opt;
}

std::vector<double> surrogate_values(const Geometry& geo, const Surrogate& sur,
                                     const Eigen::VectorXd& x, int k) {
  std::vector<double> D(geo.K);
  D[k] = geo.denominator(x, k);
  std::vector<double> out;
  for (int i : geo.user_terms[k]) out.push_back(sur.value(geo, x, i, D));
  return out;
}

Eigen::VectorXd solve_min_sinr(const Geometry& geo, const Surrogate& sur, const Eigen::VectorXd& xb) {
  Eigen::VectorXd z(geo.N + 1);
  z.head(geo.N) = xb;
  double lowest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < geo.K; ++k) {
    for (double v : surrogate_values(geo, sur, xb, k)) lowest = std::min(lowest, v);
  }
  z[geo.N] = lowest - (kMargin * std::abs(lowest) + 1e-14);
  const auto res = ipm::maximize(MinSinrProblem(geo, sur), z, surrogate_options(lowest, 1e-12));
  return res.x.head(geo.N);
}

// Adds, for every user, the prefix cuts of the ascending surrogate order that
// are violated at rate r (all prefixes when r is NaN). True if any was new.
bool separate(const Geometry& geo, const Surrogate& sur, const Eigen::VectorXd& x, double r,
              std::set<Cut>& cuts) {
  bool added = false;
  for (int k = 0; k < geo.K; ++k) {
    const auto vals = surrogate_values(geo, sur, x, k);
    std::vector<int> order(vals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    double prefix = 1.0;
    for (std::size_t sz = 1; sz <= order.size(); ++sz) {
      prefix += vals[order[sz - 1]];
      if (!std::isnan(r) && prefix >= std::exp(static_cast<double>(sz) * r)) continue;
      std::vector<int> terms;
      for (std::size_t j = 0; j < sz; ++j) terms.push_back(geo.user_terms[k][order[j]]);
      std::sort(terms.begin(), terms.end());
      added = cuts.insert({k, std::move(terms)}).second || added;
    }
  }
  return added;
}

// Rate of the surrogate over the given cuts.
double cut_rate(const Geometry& geo, const Surrogate& sur, const Eigen::VectorXd& x,
                const std::set<Cut>& cuts) {
  std::vector<double> D(geo.K);
  for (int k = 0; k < geo.K; ++k) D[k] = geo.denominator(x, k);
  double r = std::numeric_limits<double>::infinity();
  for (const Cut& cut : cuts) {
    double sum = 0.0;
    for (int i : cut.terms) sum += sur.value(geo, x, i, D);
    r = std::min(r, std::log1p(std::max(sum, -1.0)) / static_cast<double>(cut.terms.size()));
  }
  return r;
}

Eigen::VectorXd solve_rate(const Geometry& geo, const Surrogate& sur, const Eigen::VectorXd& xb) {
  std::set<Cut> active;
  separate(geo, sur, xb, std::numeric_limits<double>::quiet_NaN(), active);
  // The surrogate is tight at xb, so this is the incumbent's true rate.
  const double rb = cut_rate(geo, sur, xb, active);
  std::vector<double> D(geo.K);
  for (int k = 0; k < geo.K; ++k) D[k] = geo.denominator(xb, k);
  Eigen::VectorXd z(geo.N + 1);
  z.head(geo.N) = xb;
  Eigen::VectorXd best = xb;
  for (int round = 0; round < kMaxCutRounds; ++round) {
    const std::vector<Cut> cuts(active.begin(), active.end());
    const CutProblem prob(geo, sur, cuts, rb);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cuts.size(); ++c) lowest = std::min(lowest, prob.slack(z, c, D));
    z[geo.N] = lowest - kStartSlack;
    const auto res = ipm::maximize(prob, z, surrogate_options(kStartSlack, 1.0));
    if (!(res.x[geo.N] > 0.0)) break;
    best = res.x.head(geo.N);
    if (!separate(geo, sur, best, cut_rate(geo, sur, best, active), active)) break;
  }
  return best;
}

struct Trajectory {
  Eigen::VectorXd x;
  double objective = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

Trajectory minorize_maximize(const Geometry& geo, Eigen::VectorXd x, RateMode mode,
                             const BfOptions& opt) {
  Trajectory tr;
  tr.x = x / x.norm();
  tr.objective = geo.objective(tr.x, mode);
  for (tr.iterations = 0; tr.iterations < opt.max_iterations; ++tr.iterations) {
    const Surrogate sur(geo, tr.x);
    Eigen::VectorXd cand;
    try {
      cand = mode == RateMode::Exact ? solve_rate(geo, sur, tr.x) : solve_min_sinr(geo, sur, tr.x);
    } catch (const NumericalError&) {
      tr.converged = true;
      break;
    }
    const double norm = cand.norm();
    if (!(norm > 0.0)) {
      tr.converged = true;
      break;
    }
    cand /= norm;
    const double value = geo.objective(cand, mode);
    if (!(value > tr.objective)) {
      tr.converged = true;
      break;
    }
    const double gain = (value - tr.objective) / std::max(std::abs(tr.objective), 1e-300);
    tr.x = std::move(cand);
    tr.objective = value;
    if (gain < opt.rel_tol) {
      tr.converged = true;
      ++tr.iterations;
      break;
    }
  }
  return tr;
}

Eigen::VectorXd to_real(const Geometry& geo, std::span<const StreamBeam> beams) {
  Eigen::VectorXd x(geo.N);
  for (int s = 0; s < geo.n; ++s) {
    const Eigen::VectorXcd w = std::sqrt(beams[s].alpha) * beams[s].direction;
    x.segment(geo.block(s), geo.L) = w.real();
    x.segment(geo.block(s) + geo.L, geo.L) = w.imag();
  }
  return x;
}

}  // namespace

BeamformerSolution solve_bf(const DeliveryPlan& plan, const ChannelMatrix& H,
                            const NetworkConfig& cfg, RateMode mode, const BfOptions& opt) {
  if (opt.restarts < 1) throw InvalidArgument("solve_bf: restarts must be at least 1");
  const BeamformerSolution pl =
      mode == RateMode::Exact ? solve_pl_exact(plan, H, cfg) : solve_pl_lowsnr(plan, H, cfg);
  const Geometry geo(plan, H, cfg);

  std::vector<Eigen::VectorXd> starts{to_real(geo, pl.streams)};
  std::mt19937_64 rng = derived_engine({opt.seed, 0, 0}, RngStream::BeamformerRestarts);
  std::normal_distribution<double> normal;
  for (int r = 1; r < opt.restarts; ++r) {
    Eigen::VectorXd x(geo.N);
    for (int s = 0; s < geo.n; ++s) {
      auto block = x.segment(geo.block(s), 2 * geo.L);
      for (Eigen::Index i = 0; i < block.size(); ++i) block[i] = normal(rng);
      block /= block.norm() * std::sqrt(static_cast<double>(geo.n));
    }
    starts.push_back(std::move(x));
  }

  Trajectory best;
  for (const auto& x0 : starts) {
    auto tr = minorize_maximize(geo, x0, mode, opt);
    if (tr.objective > best.objective) best = std::move(tr);
  }

  BeamformerSolution sol;
  sol.gamma = Gamma::BF;
  sol.mode = mode;
  sol.converged = best.converged;
  sol.iterations = best.iterations;
  sol.degenerate = pl.degenerate;
  for (int s = 0; s < geo.n; ++s) {
    const auto seg = geo.seg(best.x, s);
    Eigen::VectorXcd w(geo.L);
    w.real() = seg.head(geo.L);
    w.imag() = seg.tail(geo.L);
    const double power = w.squaredNorm();
    if (power > 1e-300) {
      sol.streams.push_back({plan.streams[s], w / std::sqrt(power), power});
    } else {
      sol.streams.push_back({plan.streams[s], pl.streams[s].direction, 0.0});
    }
  }
  const auto table = sinr_table(plan, H, sol, cfg);
  sol.objective = mode == RateMode::Exact ? evaluate_rates(table, plan.parts(), cfg, mode).r_s
                                          : table.min();
  return sol;
}

}  // namespace ccbeam
