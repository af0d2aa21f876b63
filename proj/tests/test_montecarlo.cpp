#include <cmath>
#include <sstream>

#include <doctest.h>

#include "ccbeam/report.hpp"

using namespace ccbeam;

namespace {

ExperimentConfig small_v1_config() {
  ExperimentConfig ec;
  ec.network = {4, 2, 2, 1.0, 1.0};
  ec.placements = {{"stride:2", build_stride_cyclic(4, 2, 2)}, {"stride:1", build_stride_cyclic(4, 2, 1)}};
  ec.gammas = {Gamma::EP, Gamma::PL, Gamma::BF};
  ec.snr_db = {0.0, 5.0};
  ec.trials = 6;
  ec.seed = 12;
  ec.restarts = 1;
  return ec;
}

std::string csv(const std::vector<SampleRow>& rows) {
  std::ostringstream out;
  write_samples_csv(out, rows);
  return out.str();
}

}  // namespace

TEST_CASE("one EP trial on V1 reproduces the closed form") {
  auto ec = small_v1_config();
  ec.placements.erase(ec.placements.begin() + 1, ec.placements.end());
  ec.gammas = {Gamma::EP};
  ec.snr_db = {0.0};
  ec.trials = 1;
  const auto out = run_trial(ec, 0);
  REQUIRE(out.rows.size() == 1);
  REQUIRE(out.resamples == 0);

  // Two antennas: the direction orthogonal to h^T is [-h2, h1] up to phase.
  const auto H = sample_channel(ec.network, {ec.seed, 0, 0});
  const DeliveryPlan plan(ec.placements[0].V);
  double weakest = INFINITY;
  for (int k = 0; k < 4; ++k) {
    const UserSet S = plan.streams[plan.user_terms[k][0].stream];
    int other = -1;
    for (int j = 0; j < 4; ++j) {
      if (!S.contains(j)) other = j;
    }
    Eigen::Vector2cd u(-H(other, 1), H(other, 0));
    u.normalize();
    weakest = std::min(weakest, std::norm((H.row(k) * u).value()));
  }
  CHECK(std::abs(out.rows[0].maxmin - weakest / 4) <= 1e-12 * weakest);
}

TEST_CASE("serial and parallel drivers agree byte for byte") {
  const auto ec = small_v1_config();
  const auto serial = run_experiment_serial(ec);
  CHECK(serial.rows.size() == std::size_t(6 * 2 * 3 * 2));
  CHECK(serial.rows.front().trial == 0);
  CHECK(serial.rows.back().trial == 5);
  for (int workers : {1, 2, 3}) CHECK(csv(run_experiment(ec, workers).rows) == csv(serial.rows));
  CHECK(csv(run_experiment_serial(ec).rows) == csv(serial.rows));
}

TEST_CASE("ordering per realization") {
  const auto res = run_experiment_serial(small_v1_config());
  // Rows run over gamma then SNR inside each (trial, placement).
  const std::size_t nsnr = 2;
  for (std::size_t i = 0; i < res.rows.size(); i += 3 * nsnr) {
    for (std::size_t j = 0; j < nsnr; ++j) {
      const auto& ep = res.rows[i + j];
      const auto& pl = res.rows[i + nsnr + j];
      const auto& bf = res.rows[i + 2 * nsnr + j];
      REQUIRE(ep.gamma == Gamma::EP);
      REQUIRE(bf.gamma == Gamma::BF);
      CHECK(ep.snr_db == bf.snr_db);
      CHECK(ep.r_s <= pl.r_s + 1e-9);
      CHECK(pl.r_s <= bf.r_s + 1e-6);
      CHECK(bf.R == doctest::Approx(2.0 * bf.P * bf.r_s));
    }
  }
}

TEST_CASE("empty gamma list gives an empty table") {
  auto ec = small_v1_config();
  ec.gammas.clear();
  const auto res = run_experiment(ec);
  CHECK(res.rows.empty());
  std::ostringstream out;
  write_samples_csv(out, res.rows);
  CHECK(out.str() == "trial,gamma,P,snr_db,mode,maxmin,r_s,T,R\n");
}

TEST_CASE("experiment config validation") {
  auto ec = small_v1_config();
  CHECK_NOTHROW(ec.validate());
  ec.trials = 0;
  CHECK_THROWS_AS(ec.validate(), ConfigError);
  ec = small_v1_config();
  ec.placements.push_back(ec.placements.front());
  CHECK_THROWS_AS(ec.validate(), ConfigError);
  ec = small_v1_config();
  ec.placements.push_back({"comb", build_combinatorial(4, 1)});
  CHECK_THROWS_AS(ec.validate(), ConfigError);
  ec = small_v1_config();
  ec.placements = {{"twice", concat(build_stride_cyclic(4, 2, 1), build_stride_cyclic(4, 2, 1))}};
  CHECK_THROWS_AS(ec.validate(), ConfigError);
  ec = small_v1_config();
  ec.snr_db.clear();
  CHECK_THROWS_AS(ec.validate(), ConfigError);
}

TEST_CASE("empirical CDF") {
  const auto cdf = empirical_cdf({3.0, 1.0, 2.0}, false);
  CHECK(cdf.x == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(cdf.F[0] == doctest::Approx(1.0 / 3));
  CHECK(cdf.at(2.0) == doctest::Approx(2.0 / 3));
  CHECK(cdf.at(0.5) == 0.0);
  CHECK(cdf.at(10.0) == 1.0);
  CHECK(cdf.statistic == "raw");

  const auto scaled = empirical_cdf({3.0, 1.0, 2.0}, true, 4);
  CHECK(scaled.x == std::vector<double>{4.0, 8.0, 12.0});
  CHECK(scaled.statistic == "P-scaled");
  CHECK(scaled.P == 4);
  CHECK_THROWS_AS(empirical_cdf({}, false), InvalidArgument);
}

TEST_CASE("median and mean") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(mean({1.0, 2.0, 6.0}) == 3.0);
}

TEST_CASE("rate improvement against a baseline") {
  std::vector<SampleRow> rows;
  auto add = [&](int trial, int P, double R) {
    SampleRow r;
    r.trial = trial;
    r.gamma = Gamma::EP;
    r.P = P;
    r.R = R;
    rows.push_back(r);
  };
  add(0, 3, 1.0);
  add(1, 3, 3.0);
  add(0, 6, 3.0);
  add(1, 6, 3.0);
  const auto imp = rate_improvement(rows, 3);
  REQUIRE(imp.size() == 2);
  CHECK(imp[0].P == 3);
  CHECK(imp[0].improvement_pct == 0.0);
  CHECK(imp[1].mean_R == 3.0);
  CHECK(imp[1].improvement_pct == doctest::Approx(50.0));
  CHECK_THROWS_AS(rate_improvement(rows, 9), InvalidArgument);
}

TEST_CASE("identical placements give zero improvement") {
  auto ec = small_v1_config();
  ec.placements = {{"stride:1", build_stride_cyclic(4, 2, 1)}};
  ec.gammas = {Gamma::EP, Gamma::PL};
  const auto res = run_experiment_serial(ec);
  for (const auto& r : rate_improvement(res.rows, 4)) CHECK(r.improvement_pct == 0.0);
}

TEST_CASE("maxmin CDFs cover every (gamma, P)") {
  auto ec = small_v1_config();
  ec.gammas = {Gamma::EP, Gamma::PL};
  const auto res = run_experiment_serial(ec);
  const auto series = maxmin_cdfs(res.rows, 0.0);
  CHECK(series.size() == 2 * 2 * 2);
  for (const auto& s : series) {
    CHECK(s.x.size() == 6);
    CHECK(s.F.back() == 1.0);
  }
  CHECK(select_maxmin(res.rows, Gamma::PL, 4, 5.0).size() == 6);
}
