#pragma once

// Primal-dual interior-point method for small dense problems of the form
//
//   maximize x[obj]  subject to  f_i(x) >= 0,  i = 1..m,
//
// with every f_i concave and twice differentiable. The problem type supplies
// constraint values, their gradients and the weighted curvature
// sum_i w_i (-hess f_i); the method lives here.

#include <cmath>
#include <concepts>
#include <limits>

#include <Eigen/Dense>

#include "ccbeam/network.hpp"

namespace ccbeam::ipm {

struct Options {
  /// Stop once the surrogate gap sum_i lambda_i f_i is below
  /// rel_tol * max(|x[obj]|, abs_floor) and the dual residual below feas_tol.
  double rel_tol = 1e-9;
  double abs_floor = 1e-12;
  double feas_tol = 1e-8;
  /// The start is first centered on the barrier path where the duality gap
  /// equals initial_gap, to squared Newton decrement centering_tol.
  double initial_gap = 1.0;
  double centering_tol = 1e-2;
  int max_centering = 50;
  double mu = 10.0;
  /// Counts centering steps too.
  int max_iterations = 200;
};

struct Result {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  bool converged = false;
  int iterations = 0;
};

// clang-format off
template <class P>
concept ConvexProgram = requires(const P& p, const Eigen::VectorXd& x, Eigen::VectorXd& f,
                                 Eigen::MatrixXd& J, Eigen::MatrixXd& h) {
  { p.dim() } -> std::convertible_to<int>;
  { p.num_constraints() } -> std::convertible_to<int>;
  { p.objective_index() } -> std::convertible_to<int>;
  // Fills f; false if any f_i <= 0 or is not finite.
  { p.values(x, f) } -> std::convertible_to<bool>;
  // Column i of J (dim x m) = grad f_i.
  p.jacobian(x, J);
  // h += sum_i w_i (-hess f_i); the lower triangle must be correct.
  p.add_curvature(x, x, h);
};
// clang-format on

/// Linear constraints A x + b >= 0.
class LinearProblem {
 public:
  LinearProblem(Eigen::MatrixXd A, Eigen::VectorXd b, int objective_index)
      : A_(std::move(A)), b_(std::move(b)), obj_(objective_index) {}

  int dim() const { return static_cast<int>(A_.cols()); }
  int num_constraints() const { return static_cast<int>(A_.rows()); }
  int objective_index() const { return obj_; }
  bool values(const Eigen::VectorXd& x, Eigen::VectorXd& f) const;
  void jacobian(const Eigen::VectorXd&, Eigen::MatrixXd& J) const { J = A_.transpose(); }
  void add_curvature(const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::MatrixXd&) const {}

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  int obj_;
};

/// x0 must be strictly feasible; throws NumericalError otherwise.
template <ConvexProgram Problem>
Result maximize(const Problem& prob, Eigen::VectorXd x0, const Options& opt = {}) {
  const int n = prob.dim();
  const int m = prob.num_constraints();
  const int obj = prob.objective_index();
  Result res;
  res.x = std::move(x0);
  Eigen::VectorXd f(m), f_new(m), lam_new(m), dx(n), dlam(m), x_new(n), rhs(n);
  Eigen::MatrixXd J(n, m), J_new(n, m), hess(n, n), scaled(n, m);
  if (!prob.values(res.x, f)) throw NumericalError("interior point: starting point is not strictly feasible");
  prob.jacobian(res.x, J);
  Eigen::LLT<Eigen::MatrixXd> llt;
  auto factor = [&]() {
    llt.compute(hess.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) {
      Eigen::MatrixXd ridge = hess.selfadjointView<Eigen::Lower>();
      ridge.diagonal().array() += 1e-12 * (1.0 + ridge.diagonal().cwiseAbs().maxCoeff());
      llt.compute(ridge);
      if (llt.info() != Eigen::Success) throw NumericalError("interior point: singular Newton system");
    }
  };

  // Center on the barrier path at tau0 so that lambda = 1/(tau0 f) starts
  // (nearly) dual feasible.
  const double tau0 = m / std::max(opt.initial_gap, std::numeric_limits<double>::min());
  const auto barrier = [](const Eigen::VectorXd& v) { return -v.array().log().sum(); };
  for (int it = 0; it < opt.max_centering; ++it, ++res.iterations) {
    const Eigen::VectorXd inv = f.cwiseInverse();
    rhs = J * inv;
    rhs[obj] += tau0;  // -gradient of -tau0 x[obj] - sum log f
    scaled = J * inv.asDiagonal();
    hess.setZero();
    hess.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    prob.add_curvature(res.x, inv, hess);
    factor();
    dx = llt.solve(rhs);
    const double decrement = rhs.dot(dx);
    if (!(decrement > opt.centering_tol)) break;
    const double phi0 = -tau0 * res.x[obj] + barrier(f);
    double step = 1.0;
    bool moved = false;
    while (step > 1e-14) {
      x_new = res.x + step * dx;
      if (prob.values(x_new, f_new) &&
          -tau0 * x_new[obj] + barrier(f_new) <= phi0 - 0.25 * step * decrement) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    res.x.swap(x_new);
    f.swap(f_new);
    prob.jacobian(res.x, J);
  }
  res.lambda = f.cwiseInverse() / tau0;

  for (; res.iterations < opt.max_iterations; ++res.iterations) {
    const double gap = f.dot(res.lambda);
    Eigen::VectorXd r_dual = -J * res.lambda;
    r_dual[obj] -= 1.0;
    const double scale = std::max(std::abs(res.x[obj]), opt.abs_floor);
    if (gap <= opt.rel_tol * scale && r_dual.norm() <= opt.feas_tol) {
      res.converged = true;
      break;
    }
    const double inv_t = gap / (opt.mu * m);

    scaled = J * (res.lambda.cwiseQuotient(f)).cwiseSqrt().asDiagonal();
    hess.setZero();
    hess.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    prob.add_curvature(res.x, res.lambda, hess);
    rhs = J * (inv_t * f.cwiseInverse());
    rhs[obj] += 1.0;
    factor();
    dx = llt.solve(rhs);
    dlam = ((inv_t - res.lambda.cwiseProduct(f).array()) -
            res.lambda.array() * (J.transpose() * dx).array()) /
           f.array();

    double step = 1.0;
    for (int i = 0; i < m; ++i) {
      if (dlam[i] < 0.0) step = std::min(step, -0.99 * res.lambda[i] / dlam[i]);
    }
    // Merit: primal barrier at the current centering parameter.
    const double phi0 = -res.x[obj] + inv_t * barrier(f);
    const double slope = -dx[obj] - inv_t * f.cwiseInverse().dot(J.transpose() * dx);
    bool moved = false;
    while (step > 1e-14) {
      x_new = res.x + step * dx;
      if (prob.values(x_new, f_new) &&
          (!(slope < 0.0) || -x_new[obj] + inv_t * barrier(f_new) <= phi0 + 0.01 * step * slope)) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (moved) {
      lam_new = res.lambda + step * dlam;
      prob.jacobian(x_new, J_new);
    }
    if (!moved) break;
    res.x.swap(x_new);
    res.lambda.swap(lam_new);
    f.swap(f_new);
    J.swap(J_new);
  }
  return res;
}

}  // namespace ccbeam::ipm
