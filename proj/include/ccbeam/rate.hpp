#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ccbeam/network.hpp"
#include "ccbeam/placement.hpp"

namespace ccbeam {

/// exact: log(1 + SINR) with the full MAC rate region.
/// low_snr: log(1 + x) ~ x, every term bounded by its own SINR.
enum class RateMode { LowSnr, Exact };

std::string to_string(RateMode mode);
RateMode parse_rate_mode(const std::string& text);

struct SinrEntry {
  UserSet stream;
  int part = 0;
  double sinr = 0.0;
};

/// Per user, its m(V) MAC terms in (stream, part) order with their SINRs.
struct SinrTable {
  std::vector<std::vector<SinrEntry>> users;

  std::size_t size() const;
  std::vector<double> user_sinrs(int k) const;
  double min() const;
};

/// Largest r with |J| r <= log(1 + sum_{j in J} s_j) for all nonempty J.
/// Only the prefixes of the ascending order can bind. Nats. Throws
/// InvalidArgument on an empty list.
double mac_symmetric_rate(std::span<const double> sinrs);

/// min_j s_j. Throws InvalidArgument on an empty list.
double symmetric_rate_lowsnr(std::span<const double> sinrs);

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// T = 1/(P r_s); kInfiniteTime when r_s <= 0.
double delivery_time(int P, double r_s);

/// R = K(1 - t/K)/T = L/T.
double effective_rate(const NetworkConfig& cfg, double T);

struct RateResult {
  RateMode mode = RateMode::Exact;
  double r_s = 0.0;
  std::vector<double> per_user;
  double T = kInfiniteTime;
  double R = 0.0;
};

RateResult evaluate_rates(const SinrTable& table, int P, const NetworkConfig& cfg, RateMode mode);

}  // namespace ccbeam
