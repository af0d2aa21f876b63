#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <doctest.h>

#include "ccbeam/placement.hpp"

using namespace ccbeam;

namespace {

std::vector<UserSet> streams_of(const DeliveryPlan& plan, int k) {
  std::vector<UserSet> out;
  for (const auto& term : plan.user_terms[k]) out.push_back(plan.streams[term.stream]);
  return out;
}

// Brute force over the matrix entries, independent of phi().
std::vector<int> phi_oracle(const PlacementMatrix& V, const std::vector<int>& S) {
  std::vector<int> out;
  for (int p = 0; p < V.parts(); ++p) {
    bool inside = true;
    for (int k = 0; k < V.users(); ++k) {
      if (V.cached(p, k) && std::find(S.begin(), S.end(), k) == S.end()) inside = false;
    }
    if (inside) out.push_back(p);
  }
  return out;
}

int binom(int n, int k) {
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("UserSet basics") {
  UserSet s{0, 2, 3};
  CHECK(s.size() == 3);
  CHECK(s.contains(2));
  CHECK_FALSE(s.contains(1));
  CHECK(s.to_string() == "{0,2,3}");
  CHECK(s.without(2).with(1) == UserSet{0, 1, 3});
  CHECK(subsets_lex(4, 2).size() == 6);
  CHECK(subsets_lex(4, 2).front() == UserSet{0, 1});
  CHECK(subsets_lex(4, 2).back() == UserSet{2, 3});
}

TEST_CASE("four-user blocks have the expected rows") {
  const auto V1 = build_stride_cyclic(4, 2, 2);
  const auto V2 = build_stride_cyclic(4, 2, 1);
  REQUIRE(V1.parts() == 2);
  CHECK(V1.row(0) == UserSet{0, 2});
  CHECK(V1.row(1) == UserSet{1, 3});
  REQUIRE(V2.parts() == 4);
  CHECK(V2.row(0) == UserSet{0, 1});
  CHECK(V2.row(1) == UserSet{1, 2});
  CHECK(V2.row(2) == UserSet{2, 3});
  CHECK(V2.row(3) == UserSet{0, 3});
  const auto V3 = concat(V1, V2);
  CHECK(V3.parts() == 6);
  CHECK(V3.provenance() == std::vector<std::string>{"stride:2", "stride:1"});
  CHECK(build_from_blocks(4, 2, "stride:2 + stride:1").rows().size() == 6);
}

TEST_CASE("phi on the four-user examples") {
  const auto V1 = build_stride_cyclic(4, 2, 2);
  const auto V2 = build_stride_cyclic(4, 2, 1);
  const auto V3 = concat(V1, V2);
  CHECK(phi(V1, UserSet{0, 1, 3}) == std::vector<int>{1});
  CHECK(phi(V2, UserSet{0, 1, 2}) == std::vector<int>{0, 1});
  CHECK(phi(V3, UserSet{0, 1, 2}) == std::vector<int>{0, 2, 3});
  CHECK(phi(build_combinatorial(4, 2), UserSet{0, 1, 2}).size() == 3);
  for (const auto& V : {V1, V2, V3, build_combinatorial(4, 2)}) {
    for (UserSet S : subsets_lex(4, 3)) CHECK(phi(V, S) == phi_oracle(V, S.members()));
  }
  CHECK_THROWS_AS(phi(V1, UserSet{0, 1}), InvalidSubset);
}

TEST_CASE("codeword of V2 at {0,1,2} with distinct demands") {
  const auto V2 = build_stride_cyclic(4, 2, 1);
  const auto cw = build_codeword(V2, UserSet{0, 1, 2}, DemandVector::distinct(4));
  REQUIRE(cw.terms.size() == 2);
  // Part 0 = {0,1} is missing at user 2; part 1 = {1,2} at user 0.
  CHECK(cw.terms[0].part == 0);
  CHECK(cw.terms[0].user == 2);
  CHECK(cw.terms[0].file == 2);
  CHECK(cw.terms[1].part == 1);
  CHECK(cw.terms[1].user == 0);
}

TEST_CASE("per-user streams on the four-user examples") {
  const DeliveryPlan p1(build_stride_cyclic(4, 2, 2));
  CHECK(streams_of(p1, 0) == std::vector<UserSet>{UserSet{0, 1, 3}});
  CHECK(streams_of(p1, 1) == std::vector<UserSet>{UserSet{0, 1, 2}});
  CHECK(streams_of(p1, 2) == std::vector<UserSet>{UserSet{1, 2, 3}});
  CHECK(streams_of(p1, 3) == std::vector<UserSet>{UserSet{0, 2, 3}});

  const DeliveryPlan p2(build_stride_cyclic(4, 2, 1));
  auto sorted = [](std::vector<UserSet> v) {
    std::sort(v.begin(), v.end(), [](UserSet a, UserSet b) { return a.bits() < b.bits(); });
    return v;
  };
  CHECK(sorted(streams_of(p2, 0)) == sorted({UserSet{0, 1, 2}, UserSet{0, 2, 3}}));
  CHECK(sorted(streams_of(p2, 1)) == sorted({UserSet{1, 2, 3}, UserSet{0, 1, 3}}));
  CHECK(sorted(streams_of(p2, 2)) == sorted({UserSet{0, 1, 2}, UserSet{0, 2, 3}}));
  CHECK(sorted(streams_of(p2, 3)) == sorted({UserSet{0, 1, 3}, UserSet{1, 2, 3}}));
}

TEST_CASE("stream counts, MAC sizes and table sizes") {
  const auto V1 = build_stride_cyclic(4, 2, 2);
  const auto V2 = build_stride_cyclic(4, 2, 1);
  const auto V3 = concat(V1, V2);
  CHECK(n_of_v(V1) == 4);
  CHECK(n_of_v(V2) == 4);
  CHECK(n_of_v(V3) == 4);
  CHECK(n_of_v(build_combinatorial(6, 3)) == 15);
  CHECK(mac_size(V1) == 1);
  CHECK(mac_size(V2) == 2);
  CHECK(mac_size(V3) == 3);
  CHECK(DeliveryPlan(V1).table_size() == 4);
  CHECK(DeliveryPlan(V2).table_size() == 8);
  CHECK(DeliveryPlan(V3).table_size() == 12);
  for (int P : {3, 6, 9, 12, 15}) {
    std::string spec;
    for (const auto& b : decompose_parts(6, 2, P)) spec += (spec.empty() ? "" : "+") + b;
    const auto V = build_from_blocks(6, 2, spec);
    CHECK(V.parts() == P);
    const DeliveryPlan plan(V);
    for (int k = 0; k < 6; ++k) CHECK(plan.user_terms[k].size() == std::size_t(mac_size(V)));
  }
}

TEST_CASE("row and column sums hold for every builder") {
  for (int K = 3; K <= 8; ++K) {
    for (int t = 1; t < K; ++t) {
      for (const auto& [spec, rows] : base_blocks(K, t)) {
        const auto V = build_from_blocks(K, t, spec);
        CHECK(V.parts() == rows);
        std::vector<int> col(K, 0);
        for (UserSet r : V.rows()) {
          CHECK(r.size() == t);
          for (int k : r.members()) ++col[k];
        }
        for (int c : col) CHECK(c * K == V.parts() * t);
      }
    }
  }
  CHECK(build_combinatorial(6, 2).parts() == binom(6, 2));
}

TEST_CASE("invalid placements are rejected with every violation listed") {
  RawPlacement raw{2, 4, 2, {{1, 1, 0, 0}, {1, 0, 1, 0}}};
  const auto issues = check_placement(raw);
  CHECK(issues.size() >= 2);
  CHECK_THROWS_AS(PlacementMatrix::from_raw(raw), InvalidPlacement);
  CHECK_THROWS_AS(build_stride_cyclic(6, 2, 4), InvalidPlacement);
  CHECK_THROWS_AS(build_from_blocks(6, 2, "stride:1+"), InvalidPlacement);
  CHECK_THROWS_AS(build_from_blocks(6, 2, "circle:1"), InvalidPlacement);
  CHECK_THROWS_AS(concat(build_combinatorial(4, 2), build_combinatorial(4, 1)), DimensionError);
  RawPlacement ragged{1, 3, 1, {{1, 0}}};
  CHECK_FALSE(check_placement(ragged).empty());
}

TEST_CASE("placement text round trip") {
  const auto V = build_from_blocks(6, 3, "stride:3+stride:1");
  std::istringstream in(V.to_text());
  const auto back = PlacementMatrix::from_raw(parse_placement_text(in));
  CHECK(std::equal(back.rows().begin(), back.rows().end(), V.rows().begin(), V.rows().end()));
  std::istringstream bad("2 4 2\n1 1 0 x\n0 0 1 1\n");
  CHECK_THROWS_AS(parse_placement_text(bad), InvalidPlacement);
}

TEST_CASE("decompose_parts finds the fewest blocks") {
  const auto eight = decompose_parts(6, 3, 8);
  REQUIRE(eight.size() == 2);
  CHECK(build_from_blocks(6, 3, eight[0] + "+" + eight[1]).parts() == 8);
  CHECK(decompose_parts(6, 3, 20) == std::vector<std::string>{"comb"});
  CHECK(decompose_parts(6, 2, 9).size() == 2);
  CHECK(decompose_parts(6, 2, 1).empty());
}

TEST_CASE("decode_check accepts valid deliveries") {
  const auto V1 = build_stride_cyclic(4, 2, 2);
  std::vector<int> files{0, 1, 2, 3};
  do {
    CHECK(decode_check(V1, DemandVector{files}));
  } while (std::next_permutation(files.begin(), files.end()));
  CHECK(decode_check(build_combinatorial(5, 2), DemandVector::distinct(5)));
  CHECK_FALSE(decode_check(V1, DemandVector{{0, 1, 2}}));
}

TEST_CASE("repeated rows are valid but not decodable") {
  const auto V = build_stride_cyclic(4, 2, 1);
  const auto twice = concat(V, V);
  CHECK(twice.parts() == 8);
  CHECK(check_placement(twice.to_raw()).empty());
  CHECK(rows_distinct(V));
  CHECK_FALSE(rows_distinct(twice));
  CHECK_FALSE(decode_check(twice, DemandVector::distinct(4)));
  // The fewest-block search skips combinations that repeat a row.
  for (const auto& b : decompose_parts(6, 2, 12)) CHECK(b != "stride:1+stride:1");
  std::string spec;
  for (const auto& b : decompose_parts(6, 2, 12)) spec += (spec.empty() ? "" : "+") + b;
  CHECK(rows_distinct(build_from_blocks(6, 2, spec)));
}
