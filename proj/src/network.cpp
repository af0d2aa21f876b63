#include "ccbeam/network.hpp"

#include <cmath>
#include <sstream>

namespace ccbeam {

void NetworkConfig::validate() const {
  std::ostringstream why;
  if (t < 1) why << "t must be >= 1 (got " << t << "); ";
  if (L < 1) why << "L must be >= 1 (got " << L << "); ";
  if (K != t + L) {
    why << "the model assumes K = t + L, got K=" << K << ", t=" << t
        << ", L=" << L << "; ";
  }
  if (K > 32) why << "K > 32 is not supported; ";
  if (!(Po > 0.0) || !std::isfinite(Po)) why << "Po must be > 0; ";
  if (!(N0 > 0.0) || !std::isfinite(N0)) why << "N0 must be > 0; ";
  const std::string msg = why.str();
  if (!msg.empty()) throw ConfigError(msg.substr(0, msg.size() - 2));
}

NetworkConfig NetworkConfig::with_snr_db(int K, int t, int L, double snr_db) {
  NetworkConfig cfg{K, L, t, std::pow(10.0, snr_db / 10.0), 1.0};
  cfg.validate();
  return cfg;
}

std::string NetworkConfig::describe() const {
  std::ostringstream out;
  out << "K=" << K << " L=" << L << " t=" << t << " Po=" << Po << " N0=" << N0;
  return out.str();
}

}  // namespace ccbeam
