#pragma once

#include <stdexcept>
#include <string>

namespace ccbeam {

/// Malformed construction input: placements, subsets, configs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidPlacement : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidSubset : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A solver could not produce a result for this channel realization.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleRealization : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Physical scenario of a cache-enabled MISO broadcast: K single-antenna
/// users, an L-antenna server, coded-caching gain t, total power Po and
/// noise power N0 (both in watts).
struct NetworkConfig {
  int K = 0;
  int L = 0;
  int t = 0;
  double Po = 1.0;
  double N0 = 1.0;

  /// Throws ConfigError unless K = t + L, t >= 1, L >= 1, Po > 0, N0 > 0.
  void validate() const;

  double snr() const { return Po / N0; }

  /// Po/N0 = 10^(db/10) with N0 = 1.
  static NetworkConfig with_snr_db(int K, int t, int L, double snr_db);

  std::string describe() const;
};

}  // namespace ccbeam
