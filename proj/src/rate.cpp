#include "ccbeam/rate.hpp"

#include <algorithm>
#include <cmath>

namespace ccbeam {

std::string to_string(RateMode mode) { return mode == RateMode::Exact ? "exact" : "lowsnr"; }

RateMode parse_rate_mode(const std::string& text) {
  if (text == "exact") return RateMode::Exact;
  if (text == "lowsnr" || text == "low-snr" || text == "lowSNR") return RateMode::LowSnr;
  throw ConfigError("unknown rate mode '" + text + "' (expected exact or lowsnr)");
}

std::size_t SinrTable::size() const {
  std::size_t n = 0;
  for (const auto& row : users) n += row.size();
  return n;
}

std::vector<double> SinrTable::user_sinrs(int k) const {
  std::vector<double> out;
  out.reserve(users.at(k).size());
  for (const auto& e : users[k]) out.push_back(e.sinr);
  return out;
}

double SinrTable::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& row : users) {
    for (const auto& e : row) m = std::min(m, e.sinr);
  }
  return m;
}

double mac_symmetric_rate(std::span<const double> sinrs) {
  if (sinrs.empty()) throw InvalidArgument("mac_symmetric_rate: empty SINR list");
  std::vector<double> sorted(sinrs.begin(), sinrs.end());
  std::sort(sorted.begin(), sorted.end());
  double prefix = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    prefix += sorted[j];
    best = std::min(best, std::log1p(prefix) / static_cast<double>(j + 1));
  }
  return best;
}

double symmetric_rate_lowsnr(std::span<const double> sinrs) {
  if (sinrs.empty()) throw InvalidArgument("symmetric_rate_lowsnr: empty SINR list");
  return *std::min_element(sinrs.begin(), sinrs.end());
}

double delivery_time(int P, double r_s) {
  if (!(r_s > 0.0)) return kInfiniteTime;
  return 1.0 / (P * r_s);
}

double effective_rate(const NetworkConfig& cfg, double T) {
  // K(1 - t/K) written as K - t so that R * T = L holds exactly.
  return static_cast<double>(cfg.K - cfg.t) / T;
}

RateResult evaluate_rates(const SinrTable& table, int P, const NetworkConfig& cfg, RateMode mode) {
  RateResult out;
  out.mode = mode;
  out.r_s = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < table.users.size(); ++k) {
    const auto s = table.user_sinrs(static_cast<int>(k));
    const double r = mode == RateMode::Exact ? mac_symmetric_rate(s) : symmetric_rate_lowsnr(s);
    out.per_user.push_back(r);
    out.r_s = std::min(out.r_s, r);
  }
  out.T = delivery_time(P, out.r_s);
  out.R = std::isfinite(out.T) ? effective_rate(cfg, out.T) : 0.0;
  return out;
}

}  // namespace ccbeam
