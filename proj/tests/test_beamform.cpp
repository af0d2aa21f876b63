#include <cmath>

#include <doctest.h>

#include "ccbeam/beamform.hpp"

using namespace ccbeam;

namespace {

double alpha_sum(const BeamformerSolution& sol) {
  double s = 0.0;
  for (const auto& b : sol.streams) s += b.alpha;
  return s;
}

}  // namespace

TEST_CASE("gamma names") {
  CHECK(parse_gamma("BF") == Gamma::BF);
  CHECK(parse_gamma("pl") == Gamma::PL);
  CHECK(to_string(Gamma::EP) == "EP");
  CHECK_THROWS_AS(parse_gamma("MMSE"), ConfigError);
}

TEST_CASE("EP on V1 equals a quarter of the weakest ZF gain") {
  const auto cfg = NetworkConfig::with_snr_db(4, 2, 2, 3.0);
  const DeliveryPlan plan(build_stride_cyclic(4, 2, 2));
  const auto H = sample_channel(cfg, {2, 0, 0});
  const auto sol = solve_ep(plan, H, cfg);
  double weakest = INFINITY;
  for (int k = 0; k < 4; ++k) {
    const int s = plan.user_terms[k][0].stream;
    weakest = std::min(weakest, std::norm((H.row(k) * sol.streams[s].direction).value()));
  }
  CHECK(sol.objective == doctest::Approx(cfg.snr() * weakest / 4).epsilon(1e-12));
}

TEST_CASE("single-stream network: every structure agrees") {
  const auto cfg = NetworkConfig::with_snr_db(2, 1, 1, 0.0);
  const DeliveryPlan plan(build_stride_cyclic(2, 1, 1));
  REQUIRE(plan.num_streams() == 1);
  const auto H = sample_channel(cfg, {4, 0, 0});
  const double oracle = std::min(std::norm(H(0, 0)), std::norm(H(1, 0)));
  for (RateMode mode : {RateMode::LowSnr, RateMode::Exact}) {
    const auto ep = solve(Gamma::EP, plan, H, cfg, mode);
    const auto pl = solve(Gamma::PL, plan, H, cfg, mode);
    const auto bf = solve(Gamma::BF, plan, H, cfg, mode);
    CHECK(ep.objective == doctest::Approx(pl.objective).epsilon(1e-9));
    CHECK(bf.objective == doctest::Approx(pl.objective).epsilon(1e-6));
  }
  CHECK(solve_ep(plan, H, cfg).objective == doctest::Approx(oracle));
}

TEST_CASE("BF never loses to PL and reports a consistent objective") {
  const auto cfg = NetworkConfig::with_snr_db(6, 3, 3, 0.0);
  const DeliveryPlan plan(build_from_blocks(6, 3, "stride:3+stride:1"));
  BfOptions opt;
  opt.restarts = 2;
  for (int i = 0; i < 5; ++i) {
    const auto H = sample_channel(cfg, {21, std::uint64_t(i), 0});
    opt.seed = i;
    const auto pl = solve_pl_lowsnr(plan, H, cfg);
    const auto bf = solve_bf(plan, H, cfg, RateMode::LowSnr, opt);
    CHECK(bf.objective >= pl.objective * (1 - 1e-9));
    CHECK(alpha_sum(bf) == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& s : bf.streams) {
      CHECK(s.direction.norm() == doctest::Approx(1.0));
      CHECK(s.alpha >= 0.0);
    }
    CHECK(sinr_table(plan, H, bf, cfg).min() == doctest::Approx(bf.objective).epsilon(1e-9));
  }
}

TEST_CASE("BF exact on a small network") {
  const auto cfg = NetworkConfig::with_snr_db(4, 2, 2, 6.0);
  const DeliveryPlan plan(build_from_blocks(4, 2, "stride:2+stride:1"));
  BfOptions opt;
  opt.restarts = 1;
  for (int i = 0; i < 3; ++i) {
    const auto H = sample_channel(cfg, {8, std::uint64_t(i), 0});
    const auto pl = solve_pl_exact(plan, H, cfg);
    const auto bf = solve_bf(plan, H, cfg, RateMode::Exact, opt);
    CHECK(bf.objective >= pl.objective - 1e-9);
    const auto rates = evaluate_rates(sinr_table(plan, H, bf, cfg), plan.parts(), cfg, RateMode::Exact);
    CHECK(rates.r_s == doctest::Approx(bf.objective).epsilon(1e-9));
    CHECK(alpha_sum(bf) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("BF is deterministic for a fixed seed") {
  const auto cfg = NetworkConfig::with_snr_db(6, 3, 3, 0.0);
  const DeliveryPlan plan(build_stride_cyclic(6, 3, 3));
  const auto H = sample_channel(cfg, {1, 1, 0});
  BfOptions opt;
  opt.seed = 99;
  const auto a = solve_bf(plan, H, cfg, RateMode::LowSnr, opt);
  const auto b = solve_bf(plan, H, cfg, RateMode::LowSnr, opt);
  CHECK(a.objective == b.objective);
  CHECK(a.streams[0].direction == b.streams[0].direction);
}

TEST_CASE("ZF structures carry no interference; BF counts it") {
  const auto cfg = NetworkConfig::with_snr_db(4, 2, 2, 0.0);
  const DeliveryPlan plan(build_stride_cyclic(4, 2, 1));
  const auto H = sample_channel(cfg, {3, 0, 0});
  auto sol = solve_ep(plan, H, cfg);
  const auto zf_table = sinr_table(plan, H, sol, cfg);
  sol.gamma = Gamma::BF;
  const auto bf_table = sinr_table(plan, H, sol, cfg);
  // With ZF directions the interference terms vanish, so both tables agree.
  for (int k = 0; k < 4; ++k) {
    for (std::size_t j = 0; j < zf_table.users[k].size(); ++j) {
      CHECK(bf_table.users[k][j].sinr == doctest::Approx(zf_table.users[k][j].sinr).epsilon(1e-9));
    }
  }
  sol.streams.pop_back();
  CHECK_THROWS_AS(sinr_table(plan, H, sol, cfg), DimensionError);
}
