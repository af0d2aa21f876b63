#include "ccbeam/interior_point.hpp"

namespace ccbeam::ipm {

bool LinearProblem::values(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
  f.noalias() = A_ * x;
  f += b_;
  return (f.array() > 0.0).all() && f.allFinite();
}

}  // namespace ccbeam::ipm
