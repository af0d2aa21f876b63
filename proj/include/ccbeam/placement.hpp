#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccbeam/network.hpp"

namespace ccbeam {

/// A set of users {0, ..., K-1}, K <= 32, stored as a bit mask.
class UserSet {
 public:
  constexpr UserSet() = default;
  constexpr explicit UserSet(std::uint32_t bits) : bits_(bits) {}
  UserSet(std::initializer_list<int> users);

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains(int k) const { return (bits_ >> k) & 1u; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr UserSet with(int k) const { return UserSet(bits_ | (1u << k)); }
  constexpr UserSet without(int k) const { return UserSet(bits_ & ~(1u << k)); }

  /// Members in ascending order.
  std::vector<int> members() const;
  /// "{0,2,3}"; zero-based.
  std::string to_string() const;

  friend constexpr bool operator==(UserSet, UserSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

/// All subsets of {0..K-1} with `size` members, in lexicographic order of
/// their sorted member lists.
std::vector<UserSet> subsets_lex(int K, int size);

/// Requested file per user.
struct DemandVector {
  std::vector<int> files;

  /// User k requests file k (the worst case).
  static DemandVector distinct(int K);
};

/// Unvalidated P x K binary matrix as read from disk.
struct RawPlacement {
  int P = 0;
  int K = 0;
  int t = 0;
  std::vector<std::vector<int>> bits;
};

/// Invariant violations of a candidate placement; empty when valid.
std::vector<std::string> check_placement(const RawPlacement& raw);

/// Parses "P K t" followed by P lines of K 0/1 digits. Throws
/// InvalidPlacement on syntax errors only.
RawPlacement parse_placement_text(std::istream& in);

/// Cache placement: row p lists the users caching part p of every file.
/// Always valid: every row caches t users and every user caches P*t/K parts.
class PlacementMatrix {
 public:
  /// Throws InvalidPlacement listing every violated invariant.
  static PlacementMatrix from_rows(int K, int t, std::vector<UserSet> rows,
                                   std::vector<std::string> provenance = {});
  static PlacementMatrix from_raw(const RawPlacement& raw);

  int parts() const { return static_cast<int>(rows_.size()); }
  int users() const { return K_; }
  int gain() const { return t_; }
  int antennas() const { return K_ - t_; }

  bool cached(int p, int k) const { return rows_[p].contains(k); }
  UserSet row(int p) const { return rows_[p]; }
  std::span<const UserSet> rows() const { return rows_; }

  /// Base blocks this matrix was assembled from, e.g. {"stride:3", "comb"}.
  const std::vector<std::string>& provenance() const { return provenance_; }

  RawPlacement to_raw() const;
  std::string to_text() const;

 private:
  PlacementMatrix(int K, int t, std::vector<UserSet> rows,
                  std::vector<std::string> provenance)
      : K_(K), t_(t), rows_(std::move(rows)), provenance_(std::move(provenance)) {}

  int K_;
  int t_;
  std::vector<UserSet> rows_;
  std::vector<std::string> provenance_;
};

/// P = K/stride rows. Row p caches the users whose index modulo P falls in
/// the cyclic window {p, ..., p + t/stride - 1} (mod P). stride = 1 gives
/// the cyclic band of t consecutive users; for K = 4, t = 2, stride = 2 the
/// rows are {0,2} and {1,3}.
PlacementMatrix build_stride_cyclic(int K, int t, int stride);

/// Distinct cyclic shifts of {0, step, ..., (t-1)*step} (mod K).
PlacementMatrix build_cyclic_step(int K, int t, int step);

/// All C(K, t) t-subsets as rows, lexicographic.
PlacementMatrix build_combinatorial(int K, int t);

/// Rows of `a` followed by rows of `b`. Throws DimensionError when K or t
/// differ.
PlacementMatrix concat(const PlacementMatrix& a, const PlacementMatrix& b);

/// Parses a '+'-joined block list such as "stride:3+stride:1" or "comb"
/// (also "step:2") and concatenates the blocks in order.
PlacementMatrix build_from_blocks(int K, int t, std::string_view spec);

/// Base blocks available for (K, t) as (spec, rows) pairs, e.g.
/// {"stride:1", 6}. Used to report how a row count decomposes.
std::vector<std::pair<std::string, int>> base_blocks(int K, int t);

/// Distinct base blocks whose sizes sum to P and whose rows do not repeat,
/// using as few blocks as possible; empty if no such set exists.
std::vector<std::string> decompose_parts(int K, int t, int P);

/// Parts cached by nobody outside S. Throws InvalidSubset if |S| != t + 1.
std::vector<int> phi(const PlacementMatrix& V, UserSet S);

struct CodewordTerm {
  int user;
  int part;
  int file;
};

/// X(S): XOR of W_p(k) over k in S, p in phi(S), with V[p,k] = 0.
struct CodewordSpec {
  UserSet users;
  std::vector<int> phi;
  std::vector<CodewordTerm> terms;
};

CodewordSpec build_codeword(const PlacementMatrix& V, UserSet S,
                            const DemandVector& demands);

/// False when two parts are cached by the same users. Both parts then land
/// in one codeword for the same user, so XOR delivery cannot separate them.
bool rows_distinct(const PlacementMatrix& V);

/// Number of (t+1)-subsets with a nonempty phi.
int n_of_v(const PlacementMatrix& V);

/// Terms each user decodes jointly: P*L/K.
int mac_size(const PlacementMatrix& V);

/// Symbolic delivery: every user strips cached subfiles from the codewords
/// addressed to it and must be left with exactly one wanted subfile per
/// codeword, covering all missing parts of its file.
bool decode_check(const PlacementMatrix& V, const DemandVector& demands);

/// Index structures for one placement: transmitted streams (subsets with a
/// nonempty phi, lexicographic), the MAC terms of every user ordered by
/// (stream, part), and the streams interfering at every user (those not
/// containing it).
struct DeliveryPlan {
  struct Term {
    int stream;
    int part;
  };

  PlacementMatrix placement;
  std::vector<UserSet> streams;
  std::vector<std::vector<int>> stream_parts;
  std::vector<std::vector<Term>> user_terms;
  std::vector<std::vector<int>> interferers;
  /// Users with at least one term on the stream.
  std::vector<std::vector<int>> served_users;

  explicit DeliveryPlan(PlacementMatrix V);

  int users() const { return placement.users(); }
  int antennas() const { return placement.antennas(); }
  int parts() const { return placement.parts(); }
  int num_streams() const { return static_cast<int>(streams.size()); }
  int table_size() const;
};

}  // namespace ccbeam
