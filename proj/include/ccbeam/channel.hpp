#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>

#include <Eigen/Dense>

#include "ccbeam/network.hpp"

namespace ccbeam {

/// K x L complex gains; row k is h_k^T.
using ChannelMatrix = Eigen::MatrixXcd;

/// Identifies one realization: (master seed, trial) plus the resample
/// attempt used when a realization had to be discarded.
struct SeedSpec {
  std::uint64_t master = 0;
  std::uint64_t trial = 0;
  std::uint64_t attempt = 0;
};

/// Stream tags separate independent uses of the same SeedSpec.
enum class RngStream : std::uint64_t { Channel = 1, BeamformerRestarts = 2 };

/// Engine seeded from (seed, stream, extra) only, so results do not depend on
/// which thread handles a trial.
std::mt19937_64 derived_engine(const SeedSpec& seed, RngStream stream,
                               std::uint64_t extra = 0);

/// i.i.d. CN(0, 1) entries.
ChannelMatrix sample_channel(const NetworkConfig& cfg, const SeedSpec& seed);

/// Appends rows "trial,k,l,re,im" (no header).
void write_channel_csv(std::ostream& out, std::uint64_t trial, const ChannelMatrix& H);

}  // namespace ccbeam
