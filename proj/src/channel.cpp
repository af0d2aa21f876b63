#include "ccbeam/channel.hpp"

#include <cmath>
#include <ostream>

namespace ccbeam {

std::mt19937_64 derived_engine(const SeedSpec& seed, RngStream stream, std::uint64_t extra) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  const auto tag = static_cast<std::uint64_t>(stream);
  std::seed_seq seq{lo(seed.master), hi(seed.master), lo(seed.trial),  hi(seed.trial),
                    lo(seed.attempt), hi(seed.attempt), lo(tag),        lo(extra),
                    hi(extra)};
  return std::mt19937_64(seq);
}

ChannelMatrix sample_channel(const NetworkConfig& cfg, const SeedSpec& seed) {
  auto rng = derived_engine(seed, RngStream::Channel);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ChannelMatrix H(cfg.K, cfg.L);
  for (int k = 0; k < cfg.K; ++k) {
    for (int l = 0; l < cfg.L; ++l) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      H(k, l) = {re, im};
    }
  }
  return H;
}

void write_channel_csv(std::ostream& out, std::uint64_t trial, const ChannelMatrix& H) {
  const auto old = out.precision(17);
  for (Eigen::Index k = 0; k < H.rows(); ++k) {
    for (Eigen::Index l = 0; l < H.cols(); ++l) {
      out << trial << ',' << k << ',' << l << ',' << H(k, l).real() << ',' << H(k, l).imag()
          << '\n';
    }
  }
  out.precision(old);
}

}  // namespace ccbeam
