#include <cmath>
#include <sstream>

#include <doctest.h>

#include "ccbeam/beamform.hpp"

using namespace ccbeam;

TEST_CASE("network config validation") {
  CHECK_NOTHROW(NetworkConfig::with_snr_db(6, 2, 4, 0.0).validate());
  CHECK(NetworkConfig::with_snr_db(4, 2, 2, 10.0).snr() == doctest::Approx(10.0));
  CHECK_THROWS_AS(NetworkConfig::with_snr_db(6, 2, 3, 0.0).validate(), ConfigError);
  NetworkConfig bad{4, 2, 2, 1.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("channel draws are reproducible and CN(0,1)") {
  const auto cfg = NetworkConfig::with_snr_db(6, 2, 4, 0.0);
  const auto a = sample_channel(cfg, {7, 3, 0});
  const auto b = sample_channel(cfg, {7, 3, 0});
  const auto c = sample_channel(cfg, {7, 3, 1});
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.rows() == 6);
  CHECK(a.cols() == 4);

  double sum_re = 0, sum_im = 0, power = 0, cross = 0;
  const int draws = 5000;
  for (int i = 0; i < draws; ++i) {
    const auto H = sample_channel(cfg, {1, std::uint64_t(i), 0});
    sum_re += H.real().sum();
    sum_im += H.imag().sum();
    power += H.cwiseAbs2().sum();
    cross += (H.real().array() * H.imag().array()).sum();
  }
  const double n = draws * 24.0;
  CHECK(std::abs(sum_re / n) < 0.01);
  CHECK(std::abs(sum_im / n) < 0.01);
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(cross / n) < 0.01);
}

TEST_CASE("derived engines separate streams") {
  SeedSpec s{1, 2, 0};
  CHECK(derived_engine(s, RngStream::Channel)() != derived_engine(s, RngStream::BeamformerRestarts)());
  CHECK(derived_engine(s, RngStream::BeamformerRestarts, 1)() !=
        derived_engine(s, RngStream::BeamformerRestarts, 2)());
}

TEST_CASE("channel csv rows") {
  ChannelMatrix H(1, 2);
  H << std::complex<double>(0.5, -1.0), std::complex<double>(2.0, 0.0);
  std::ostringstream out;
  write_channel_csv(out, 4, H);
  CHECK(out.str() == "4,0,0,0.5,-1\n4,0,1,2,0\n");
}

TEST_CASE("zero-forcing on two-antenna examples") {
  ChannelMatrix H(2, 2);
  H << 1.0, 0.0, 0.3, 0.7;
  auto zf = zf_direction(H, UserSet{1});
  CHECK_FALSE(zf.degenerate);
  CHECK(std::abs(zf.u[0]) < 1e-12);
  CHECK(zf.u[1].real() == doctest::Approx(1.0));

  const double r = 1.0 / std::sqrt(2.0);
  H << r, r, 0.3, 0.7;
  zf = zf_direction(H, UserSet{1});
  CHECK(zf.u[0].real() == doctest::Approx(r));
  CHECK(zf.u[1].real() == doctest::Approx(-r));
  CHECK(std::abs(zf.u[0].imag()) < 1e-12);
  CHECK(std::abs(zf.u[1].imag()) < 1e-12);
}

TEST_CASE("zero-forcing nulls excluded users on random channels") {
  const auto cfg = NetworkConfig::with_snr_db(6, 3, 3, 0.0);
  const DeliveryPlan plan(build_combinatorial(6, 3));
  for (int i = 0; i < 50; ++i) {
    const auto H = sample_channel(cfg, {3, std::uint64_t(i), 0});
    const auto zf = zf_directions(plan, H);
    for (int s = 0; s < plan.num_streams(); ++s) {
      CHECK(zf[s].u.norm() == doctest::Approx(1.0));
      CHECK(zf[s].u[0].imag() == 0.0);
      for (int k = 0; k < 6; ++k) {
        if (!plan.streams[s].contains(k)) CHECK(std::abs(H.row(k).dot(zf[s].u.conjugate())) < 1e-12);
      }
    }
  }
}

TEST_CASE("zero-forcing edge cases") {
  ChannelMatrix H(3, 2);
  H << 1.0, 0.0, 2.0, 0.0, 0.0, 1.0;
  // Users 0 and 1 share a direction: rank-one exclusion set, unique null vector.
  auto zf = zf_direction(H, UserSet{2});
  CHECK_FALSE(zf.degenerate);
  CHECK(std::abs(zf.u[0]) < 1e-12);

  H.setZero();
  zf = zf_direction(H, UserSet{0});
  CHECK(zf.degenerate);
  CHECK(zf.u.norm() == doctest::Approx(1.0));

  H << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(zf_direction(H, UserSet{0}), NumericalError);
  H(0, 0) = std::nan("");
  CHECK_THROWS_AS(zf_direction(H, UserSet{0, 1}), NumericalError);
}
