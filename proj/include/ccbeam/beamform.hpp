#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccbeam/channel.hpp"
#include "ccbeam/placement.hpp"
#include "ccbeam/rate.hpp"

namespace ccbeam {

/// Beamformer structure: zero-forcing with equal power (EP), zero-forcing
/// with optimized power (PL), or jointly optimized directions and powers (BF).
enum class Gamma { EP, PL, BF };

std::string to_string(Gamma g);
Gamma parse_gamma(const std::string& text);

/// One transmitted codeword X(S): unit direction and power fraction.
struct StreamBeam {
  UserSet users;
  Eigen::VectorXcd direction;
  double alpha = 0.0;
};

struct BeamformerSolution {
  Gamma gamma = Gamma::EP;
  RateMode mode = RateMode::LowSnr;
  std::vector<StreamBeam> streams;
  /// Low-SNR: min SINR; exact: symmetric MAC rate (nats).
  double objective = 0.0;
  bool converged = true;
  /// Some ZF direction came from a rank-deficient exclusion set.
  bool degenerate = false;
  int iterations = 0;
};

struct ZfDirection {
  Eigen::VectorXcd u;
  bool degenerate = false;
};

/// Unit u with h_k^T u = 0 for every k outside S, first nonzero entry real
/// and positive. A rank-deficient exclusion set yields the first vector of an
/// orthonormal null-space basis and sets `degenerate`. Throws NumericalError
/// on non-finite channels.
ZfDirection zf_direction(const ChannelMatrix& H, UserSet S);

/// ZF directions for every stream of the plan, in stream order.
std::vector<ZfDirection> zf_directions(const DeliveryPlan& plan, const ChannelMatrix& H);

BeamformerSolution solve_ep(const DeliveryPlan& plan, const ChannelMatrix& H,
                            const NetworkConfig& cfg);

struct PowerAllocation {
  std::vector<double> alpha;
  /// max_alpha min_S alpha_S c_S.
  double objective = 0.0;
};

/// alpha_S proportional to 1/c_S; objective 1 / sum_S 1/c_S. Throws
/// InfeasibleRealization if some c_S <= 0.
PowerAllocation max_min_allocation(std::span<const double> c);

/// c_S = min over the terms carried by S of |h_k^T u_S|^2.
std::vector<double> stream_gains(const DeliveryPlan& plan, const ChannelMatrix& H,
                                 std::span<const ZfDirection> zf);

BeamformerSolution solve_pl_lowsnr(const DeliveryPlan& plan, const ChannelMatrix& H,
                                   const NetworkConfig& cfg);

struct PlExactOptions {
  double rel_tol = 1e-10;
  int max_bisections = 200;
  int max_cut_rounds = 64;
};

/// Bisection on the symmetric rate; each probe is a linear feasibility
/// program over alpha with MAC subset constraints added lazily.
BeamformerSolution solve_pl_exact(const DeliveryPlan& plan, const ChannelMatrix& H,
                                  const NetworkConfig& cfg, const PlExactOptions& opt = {});

struct BfOptions {
  /// Starting points: the PL solution plus restarts - 1 random directions.
  int restarts = 3;
  int max_iterations = 200;
  double rel_tol = 1e-4;
  /// Seeds the random restarts.
  std::uint64_t seed = 0;
};

/// Successive convex approximation of the max-min problem over powers and
/// directions. The SINR of every term is minorized by a concave function
/// tight at the incumbent; each surrogate is maximized with an
/// interior-point method. The result is never worse than the PL starting point.
BeamformerSolution solve_bf(const DeliveryPlan& plan, const ChannelMatrix& H,
                            const NetworkConfig& cfg, RateMode mode, const BfOptions& opt = {});

BeamformerSolution solve(Gamma gamma, const DeliveryPlan& plan, const ChannelMatrix& H,
                         const NetworkConfig& cfg, RateMode mode, const BfOptions& bf = {});

/// SINR of every MAC term. ZF structures (EP, PL) carry no interference;
/// BF sums the power of every stream not containing the user.
SinrTable sinr_table(const DeliveryPlan& plan, const ChannelMatrix& H,
                     const BeamformerSolution& sol, const NetworkConfig& cfg);

}  // namespace ccbeam
