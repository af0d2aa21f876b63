#include "ccbeam/placement.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace ccbeam {

UserSet::UserSet(std::initializer_list<int> users) {
  for (int k : users) bits_ |= 1u << k;
}

std::vector<int> UserSet::members() const {
  std::vector<int> out;
  for (std::uint32_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(std::countr_zero(b));
  }
  return out;
}

std::string UserSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int k : members()) {
    if (!first) out += ',';
    out += std::to_string(k);
    first = false;
  }
  return out + "}";
}

std::vector<UserSet> subsets_lex(int K, int size) {
  std::vector<UserSet> out;
  if (size < 0 || size > K) return out;
  std::vector<int> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::uint32_t bits = 0;
    for (int k : idx) bits |= 1u << k;
    out.emplace_back(bits);
    int i = size - 1;
    while (i >= 0 && idx[i] == K - size + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

DemandVector DemandVector::distinct(int K) {
  DemandVector d;
  d.files.resize(K);
  std::iota(d.files.begin(), d.files.end(), 0);
  return d;
}

std::vector<std::string> check_placement(const RawPlacement& raw) {
  std::vector<std::string> issues;
  const int P = raw.P, K = raw.K, t = raw.t;
  if (K < 2 || K > 32) issues.push_back("K must be in [2, 32], got " + std::to_string(K));
  if (t < 1 || t >= K) issues.push_back("t must be in [1, K-1], got " + std::to_string(t));
  if (P < 1) issues.push_back("P must be >= 1, got " + std::to_string(P));
  if (static_cast<int>(raw.bits.size()) != P) {
    issues.push_back("expected " + std::to_string(P) + " rows, found " +
                     std::to_string(raw.bits.size()));
  }
  if (!issues.empty()) return issues;
  if ((P * t) % K != 0) {
    issues.push_back("P*t = " + std::to_string(P * t) + " is not divisible by K = " +
                     std::to_string(K));
  }
  std::vector<int> col(K, 0);
  for (int p = 0; p < P; ++p) {
    const auto& row = raw.bits[p];
    if (static_cast<int>(row.size()) != K) {
      issues.push_back("row " + std::to_string(p + 1) + " has " +
                       std::to_string(row.size()) + " entries, expected " +
                       std::to_string(K));
      continue;
    }
    int sum = 0;
    for (int k = 0; k < K; ++k) {
      if (row[k] != 0 && row[k] != 1) {
        issues.push_back("row " + std::to_string(p + 1) + " column " +
                         std::to_string(k + 1) + " is not binary");
      }
      sum += row[k];
      col[k] += row[k];
    }
    if (sum != t) {
      issues.push_back("row " + std::to_string(p + 1) + " sums to " +
                       std::to_string(sum) + ", expected t = " + std::to_string(t));
    }
  }
  if ((P * t) % K == 0) {
    const int want = P * t / K;
    for (int k = 0; k < K; ++k) {
      if (col[k] != want) {
        issues.push_back("column " + std::to_string(k + 1) + " sums to " +
                         std::to_string(col[k]) + ", expected P*t/K = " +
                         std::to_string(want));
      }
    }
  }
  return issues;
}

RawPlacement parse_placement_text(std::istream& in) {
  RawPlacement raw;
  if (!(in >> raw.P >> raw.K >> raw.t)) {
    throw InvalidPlacement("placement header must be 'P K t'");
  }
  if (raw.P < 0 || raw.K < 0 || raw.P > 100000 || raw.K > 32) {
    throw InvalidPlacement("placement header out of range");
  }
  raw.bits.assign(raw.P, std::vector<int>(raw.K));
  for (int p = 0; p < raw.P; ++p) {
    for (int k = 0; k < raw.K; ++k) {
      if (!(in >> raw.bits[p][k])) {
        throw InvalidPlacement("placement body truncated at row " + std::to_string(p + 1));
      }
    }
  }
  std::string extra;
  if (in >> extra) throw InvalidPlacement("trailing data after " + std::to_string(raw.P) + " rows");
  return raw;
}

PlacementMatrix PlacementMatrix::from_rows(int K, int t, std::vector<UserSet> rows,
                                           std::vector<std::string> provenance) {
  RawPlacement raw{static_cast<int>(rows.size()), K, t, {}};
  for (UserSet r : rows) {
    if (K < 32 && (r.bits() >> K) != 0) throw InvalidPlacement("row mentions a user >= K");
    std::vector<int> bits(K);
    for (int k = 0; k < K; ++k) bits[k] = r.contains(k) ? 1 : 0;
    raw.bits.push_back(std::move(bits));
  }
  auto issues = check_placement(raw);
  if (!issues.empty()) {
    std::string msg = "invalid placement:";
    for (const auto& s : issues) msg += " " + s + ";";
    throw InvalidPlacement(msg);
  }
  return PlacementMatrix(K, t, std::move(rows), std::move(provenance));
}

PlacementMatrix PlacementMatrix::from_raw(const RawPlacement& raw) {
  auto issues = check_placement(raw);
  if (!issues.empty()) {
    std::string msg = "invalid placement:";
    for (const auto& s : issues) msg += " " + s + ";";
    throw InvalidPlacement(msg);
  }
  std::vector<UserSet> rows;
  for (const auto& r : raw.bits) {
    std::uint32_t bits = 0;
    for (int k = 0; k < raw.K; ++k) {
      if (r[k]) bits |= 1u << k;
    }
    rows.emplace_back(bits);
  }
  return PlacementMatrix(raw.K, raw.t, std::move(rows), {"file"});
}

RawPlacement PlacementMatrix::to_raw() const {
  RawPlacement raw{parts(), K_, t_, {}};
  for (UserSet r : rows_) {
    std::vector<int> bits(K_);
    for (int k = 0; k < K_; ++k) bits[k] = r.contains(k) ? 1 : 0;
    raw.bits.push_back(std::move(bits));
  }
  return raw;
}

std::string PlacementMatrix::to_text() const {
  std::ostringstream out;
  out << parts() << ' ' << K_ << ' ' << t_ << '\n';
  for (UserSet r : rows_) {
    for (int k = 0; k < K_; ++k) {
      if (k) out << ' ';
      out << (r.contains(k) ? 1 : 0);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

void require_model(int K, int t) {
  if (K < 2 || K > 32 || t < 1 || t >= K) {
    throw InvalidPlacement("need 1 <= t < K <= 32, got K=" + std::to_string(K) +
                           " t=" + std::to_string(t));
  }
}

}  // namespace

PlacementMatrix build_stride_cyclic(int K, int t, int stride) {
  require_model(K, t);
  if (stride < 1 || K % stride != 0 || t % stride != 0) {
    throw InvalidPlacement("stride " + std::to_string(stride) + " must divide both K=" +
                           std::to_string(K) + " and t=" + std::to_string(t));
  }
  const int P = K / stride;
  const int window = t / stride;
  std::vector<UserSet> rows;
  for (int p = 0; p < P; ++p) {
    std::uint32_t bits = 0;
    for (int k = 0; k < K; ++k) {
      if (((k % P) - p + P) % P < window) bits |= 1u << k;
    }
    rows.emplace_back(bits);
  }
  return PlacementMatrix::from_rows(K, t, std::move(rows),
                                    {"stride:" + std::to_string(stride)});
}

PlacementMatrix build_cyclic_step(int K, int t, int step) {
  require_model(K, t);
  if (step < 1 || step >= K) {
    throw InvalidPlacement("step must be in [1, K-1], got " + std::to_string(step));
  }
  std::uint32_t base = 0;
  for (int j = 0; j < t; ++j) base |= 1u << ((j * step) % K);
  if (std::popcount(base) != t) {
    throw InvalidPlacement("step " + std::to_string(step) + " repeats users within a row");
  }
  const std::uint32_t full = K == 32 ? ~0u : ((1u << K) - 1);
  std::vector<UserSet> rows;
  std::set<std::uint32_t> seen;
  std::uint32_t row = base;
  for (int p = 0; p < K; ++p) {
    if (seen.insert(row).second) rows.emplace_back(row);
    row = ((row << 1) | (row >> (K - 1))) & full;
  }
  return PlacementMatrix::from_rows(K, t, std::move(rows),
                                    {"step:" + std::to_string(step)});
}

PlacementMatrix build_combinatorial(int K, int t) {
  require_model(K, t);
  return PlacementMatrix::from_rows(K, t, subsets_lex(K, t), {"comb"});
}

PlacementMatrix concat(const PlacementMatrix& a, const PlacementMatrix& b) {
  if (a.users() != b.users() || a.gain() != b.gain()) {
    throw DimensionError("concat needs equal K and t: (" + std::to_string(a.users()) + "," +
                         std::to_string(a.gain()) + ") vs (" + std::to_string(b.users()) +
                         "," + std::to_string(b.gain()) + ")");
  }
  std::vector<UserSet> rows(a.rows().begin(), a.rows().end());
  rows.insert(rows.end(), b.rows().begin(), b.rows().end());
  auto prov = a.provenance();
  prov.insert(prov.end(), b.provenance().begin(), b.provenance().end());
  return PlacementMatrix::from_rows(a.users(), a.gain(), std::move(rows), std::move(prov));
}

namespace {

PlacementMatrix build_block(int K, int t, std::string_view block) {
  auto parse_arg = [&](std::string_view prefix) {
    std::string arg(block.substr(prefix.size()));
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || arg.empty()) {
      throw InvalidPlacement("bad block argument in '" + std::string(block) + "'");
    }
    return v;
  };
  if (block == "comb") return build_combinatorial(K, t);
  if (block.starts_with("stride:")) return build_stride_cyclic(K, t, parse_arg("stride:"));
  if (block.starts_with("step:")) return build_cyclic_step(K, t, parse_arg("step:"));
  throw InvalidPlacement("unknown placement block '" + std::string(block) +
                         "' (expected comb, stride:N or step:N)");
}

}  // namespace

PlacementMatrix build_from_blocks(int K, int t, std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = spec.find('+', start);
    auto piece = spec.substr(start, pos == std::string_view::npos ? pos : pos - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    if (piece.empty()) throw InvalidPlacement("empty block in '" + std::string(spec) + "'");
    parts.push_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  PlacementMatrix out = build_block(K, t, parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) out = concat(out, build_block(K, t, parts[i]));
  return out;
}

std::vector<std::pair<std::string, int>> base_blocks(int K, int t) {
  std::vector<std::pair<std::string, int>> out;
  if (K < 2 || K > 32 || t < 1 || t >= K) return out;
  for (int s = 1; s <= t; ++s) {
    if (K % s == 0 && t % s == 0) out.emplace_back("stride:" + std::to_string(s), K / s);
  }
  for (int step = 2; step < K; ++step) {
    try {
      auto V = build_cyclic_step(K, t, step);
      out.emplace_back("step:" + std::to_string(step), V.parts());
    } catch (const InvalidPlacement&) {
    }
  }
  long long comb = 1;
  for (int i = 1; i <= t; ++i) comb = comb * (K - t + i) / i;
  if (comb <= 100000) out.emplace_back("comb", static_cast<int>(comb));
  return out;
}

std::vector<std::string> decompose_parts(int K, int t, int P) {
  const auto blocks = base_blocks(K, t);
  if (P <= 0 || blocks.empty()) return {};
  std::vector<std::vector<std::uint32_t>> rows;
  for (const auto& [spec, size] : blocks) {
    const auto V = build_from_blocks(K, t, spec);
    std::vector<std::uint32_t> r;
    for (UserSet u : V.rows()) r.push_back(u.bits());
    rows.push_back(std::move(r));
  }
  // Depth-limited search over block subsets in index order; the first hit
  // at the smallest depth wins.
  std::vector<int> pick;
  std::set<std::uint32_t> used;
  std::function<bool(std::size_t, int, int)> search = [&](std::size_t from, int left, int depth) {
    if (left == 0) return true;
    if (depth == 0) return false;
    for (std::size_t b = from; b < blocks.size(); ++b) {
      if (blocks[b].second > left) continue;
      if (std::any_of(rows[b].begin(), rows[b].end(), [&](auto r) { return used.count(r) > 0; })) {
        continue;
      }
      used.insert(rows[b].begin(), rows[b].end());
      pick.push_back(static_cast<int>(b));
      if (search(b + 1, left - blocks[b].second, depth - 1)) return true;
      pick.pop_back();
      for (auto r : rows[b]) used.erase(r);
    }
    return false;
  };
  for (int depth = 1; depth <= static_cast<int>(blocks.size()); ++depth) {
    if (search(0, P, depth)) {
      std::vector<std::string> out;
      for (int b : pick) out.push_back(blocks[b].first);
      return out;
    }
  }
  return {};
}

bool rows_distinct(const PlacementMatrix& V) {
  std::set<std::uint32_t> seen;
  for (UserSet r : V.rows()) {
    if (!seen.insert(r.bits()).second) return false;
  }
  return true;
}

std::vector<int> phi(const PlacementMatrix& V, UserSet S) {
  if (S.size() != V.gain() + 1) {
    throw InvalidSubset("phi needs |S| = t+1 = " + std::to_string(V.gain() + 1) + ", got " +
                        std::to_string(S.size()));
  }
  std::vector<int> out;
  for (int p = 0; p < V.parts(); ++p) {
    if ((V.row(p).bits() & ~S.bits()) == 0) out.push_back(p);
  }
  return out;
}

CodewordSpec build_codeword(const PlacementMatrix& V, UserSet S, const DemandVector& demands) {
  CodewordSpec cw{S, phi(V, S), {}};
  for (int p : cw.phi) {
    for (int k : S.members()) {
      if (!V.cached(p, k)) cw.terms.push_back({k, p, demands.files.at(k)});
    }
  }
  return cw;
}

int n_of_v(const PlacementMatrix& V) {
  int n = 0;
  for (UserSet S : subsets_lex(V.users(), V.gain() + 1)) {
    if (!phi(V, S).empty()) ++n;
  }
  return n;
}

int mac_size(const PlacementMatrix& V) { return V.parts() * V.antennas() / V.users(); }

bool decode_check(const PlacementMatrix& V, const DemandVector& demands) {
  const int K = V.users();
  if (static_cast<int>(demands.files.size()) != K) return false;
  std::vector<CodewordSpec> codewords;
  for (UserSet S : subsets_lex(K, V.gain() + 1)) {
    auto cw = build_codeword(V, S, demands);
    if (!cw.terms.empty()) codewords.push_back(std::move(cw));
  }
  for (int k = 0; k < K; ++k) {
    std::vector<bool> have(V.parts());
    for (int p = 0; p < V.parts(); ++p) have[p] = V.cached(p, k);
    for (const auto& cw : codewords) {
      if (!cw.users.contains(k)) continue;
      // XOR of (file, part) symbols left after cancelling cached subfiles.
      std::set<std::pair<int, int>> residual;
      for (const auto& term : cw.terms) {
        if (V.cached(term.part, k)) continue;
        auto sym = std::make_pair(term.file, term.part);
        if (!residual.insert(sym).second) residual.erase(sym);
      }
      if (residual.empty()) continue;
      if (residual.size() != 1) return false;
      const auto [file, part] = *residual.begin();
      if (file != demands.files[k]) return false;
      have[part] = true;
    }
    if (std::find(have.begin(), have.end(), false) != have.end()) return false;
  }
  return true;
}

DeliveryPlan::DeliveryPlan(PlacementMatrix V) : placement(std::move(V)) {
  const int K = placement.users();
  user_terms.resize(K);
  interferers.resize(K);
  for (UserSet S : subsets_lex(K, placement.gain() + 1)) {
    auto parts = phi(placement, S);
    if (parts.empty()) continue;
    const int s = static_cast<int>(streams.size());
    streams.push_back(S);
    std::vector<int> served;
    for (int p : parts) {
      // |S| = t+1 and row p caches t of them: exactly one member lacks p.
      const int k = std::countr_zero(S.bits() & ~placement.row(p).bits());
      user_terms[k].push_back({s, p});
      served.push_back(k);
    }
    std::sort(served.begin(), served.end());
    served.erase(std::unique(served.begin(), served.end()), served.end());
    served_users.push_back(std::move(served));
    stream_parts.push_back(std::move(parts));
  }
  for (int k = 0; k < K; ++k) {
    for (int s = 0; s < num_streams(); ++s) {
      if (!streams[s].contains(k)) interferers[k].push_back(s);
    }
  }
}

int DeliveryPlan::table_size() const {
  int n = 0;
  for (const auto& terms : user_terms) n += static_cast<int>(terms.size());
  return n;
}

}  // namespace ccbeam
