#include "ccbeam/experiment_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace ccbeam {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

PlacementCase make_case(int K, int t, const std::string& spec) {
  return {spec, build_from_blocks(K, t, spec)};
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

struct Entry {
  int line;
  std::string key;
  std::string value;
};

std::vector<Entry> read_entries(std::istream& in) {
  std::vector<Entry> out;
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    const auto hash = raw.find('#');
    const std::string text = trim(std::string_view(raw).substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    }
    out.push_back({line, trim(std::string_view(text).substr(0, eq)),
                   trim(std::string_view(text).substr(eq + 1))});
  }
  return out;
}

// Applies the entries on top of a preset. Placement keys are resolved last
// because they depend on K and t.
ScenarioSpec apply_entries(const std::vector<Entry>& entries) {
  ScenarioSpec spec;
  for (const auto& e : entries) {
    if (e.key == "scenario") spec = preset_scenario(e.value);
  }
  auto& ex = spec.experiment;
  std::optional<int> L;
  const Entry* placements = nullptr;
  const Entry* parts = nullptr;
  for (const auto& e : entries) {
    const std::string where = "line " + std::to_string(e.line) + ": ";
    try {
      if (e.key == "scenario") {
        continue;
      } else if (e.key == "K") {
        ex.network.K = parse_number<int>(e.key, e.value);
      } else if (e.key == "t") {
        ex.network.t = parse_number<int>(e.key, e.value);
      } else if (e.key == "L") {
        L = parse_number<int>(e.key, e.value);
      } else if (e.key == "placements") {
        placements = &e;
      } else if (e.key == "P") {
        parts = &e;
      } else if (e.key == "gammas") {
        ex.gammas = parse_gamma_list(e.value);
      } else if (e.key == "snr_db") {
        ex.snr_db = parse_number_list(e.value);
      } else if (e.key == "trials") {
        ex.trials = parse_number<int>(e.key, e.value);
      } else if (e.key == "seed") {
        ex.seed = parse_number<std::uint64_t>(e.key, e.value);
      } else if (e.key == "mode") {
        ex.mode = parse_rate_mode(e.value);
      } else if (e.key == "restarts") {
        ex.restarts = parse_number<int>(e.key, e.value);
      } else if (e.key == "baseline_P") {
        spec.baseline_P = parse_number<int>(e.key, e.value);
      } else {
        throw ConfigError("unknown key '" + e.key + "'");
      }
    } catch (const InvalidArgument& err) {
      throw ConfigError(where + err.what());
    }
  }
  ex.network.L = L.value_or(ex.network.K - ex.network.t);
  if (placements && parts) {
    throw ConfigError("line " + std::to_string(parts->line) +
                      ": give either 'placements' or 'P', not both");
  }
  const int K = ex.network.K, t = ex.network.t;
  try {
    if (placements) {
      ex.placements.clear();
      for (const auto& s : split(placements->value, ',')) ex.placements.push_back(make_case(K, t, s));
    } else if (parts) {
      ex.placements.clear();
      for (double p : parse_number_list(parts->value)) {
        const auto blocks = decompose_parts(K, t, static_cast<int>(p));
        if (blocks.empty() || p != static_cast<int>(p)) {
          throw ConfigError("P=" + std::to_string(p) + " is not a sum of base placements for K=" +
                            std::to_string(K) + ", t=" + std::to_string(t));
        }
        ex.placements.push_back(make_case(K, t, join(blocks, "+")));
      }
    }
  } catch (const InvalidArgument& err) {
    const int line = placements ? placements->line : parts->line;
    throw ConfigError("line " + std::to_string(line) + ": " + err.what());
  }
  return spec;
}

}  // namespace

int ScenarioSpec::baseline() const {
  if (baseline_P) return *baseline_P;
  int best = std::numeric_limits<int>::max();
  for (const auto& pc : experiment.placements) best = std::min(best, pc.V.parts());
  return best;
}

std::vector<std::string> preset_names() { return {"bars-fig1to3", "cdf-fig4to6", "custom"}; }

ScenarioSpec preset_scenario(const std::string& name) {
  ScenarioSpec spec;
  spec.name = name;
  auto& ex = spec.experiment;
  ex.gammas = {Gamma::EP, Gamma::PL, Gamma::BF};
  if (name == "bars-fig1to3") {
    ex.network = {6, 4, 2, 1.0, 1.0};
    for (const char* s : {"stride:2", "stride:1", "stride:2+stride:1", "stride:1+step:2", "comb"}) {
      ex.placements.push_back(make_case(6, 2, s));
    }
    ex.snr_db = {0.0, 4.0, 8.0};
    ex.mode = RateMode::Exact;
    ex.trials = 500;
    spec.baseline_P = 3;
  } else if (name == "cdf-fig4to6") {
    ex.network = {6, 3, 3, 1.0, 1.0};
    for (const char* s : {"stride:3", "stride:3+stride:1", "comb"}) {
      ex.placements.push_back(make_case(6, 3, s));
    }
    ex.snr_db = {0.0};
    ex.mode = RateMode::LowSnr;
    ex.trials = 1000;
  } else if (name == "custom") {
    ex.snr_db = {0.0};
  } else {
    throw ConfigError("unknown scenario '" + name + "' (expected " + join(preset_names(), ", ") + ")");
  }
  return spec;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<double>("list", item));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<Gamma> parse_gamma_list(const std::string& text) {
  std::vector<Gamma> out;
  for (const auto& item : split(text, ',')) {
    const Gamma g = parse_gamma(item);
    if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
  }
  return out;
}

ScenarioSpec parse_scenario(std::istream& in) {
  auto spec = apply_entries(read_entries(in));
  spec.experiment.validate();
  return spec;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_scenario(in);
}

namespace {

bool looks_like_placement(const std::string& text) {
  std::istringstream in(text);
  std::string first;
  if (!std::getline(in, first)) return false;
  std::istringstream header(first);
  int a, b, c;
  std::string rest;
  return static_cast<bool>(header >> a >> b >> c) && !(header >> rest);
}

void describe_parts(int K, int t, int P, ValidationReport& report) {
  const auto blocks = decompose_parts(K, t, P);
  if (blocks.empty()) {
    report.passed.push_back("P=" + std::to_string(P) + " has no decomposition into base blocks");
  } else {
    report.passed.push_back("P=" + std::to_string(P) + " decomposes as " + join(blocks, " + "));
  }
}

}  // namespace

ValidationReport validate_file(const std::string& path) {
  ValidationReport report;
  std::ifstream file(path);
  if (!file) {
    report.failed.push_back("cannot open '" + path + "'");
    return report;
  }
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string text = buffer.str();

  if (looks_like_placement(text)) {
    std::istringstream in(text);
    RawPlacement raw;
    try {
      raw = parse_placement_text(in);
    } catch (const InvalidArgument& e) {
      report.failed.push_back(e.what());
      return report;
    }
    auto issues = check_placement(raw);
    if (issues.empty()) {
      report.passed.push_back("every row caches t=" + std::to_string(raw.t) + " users");
      report.passed.push_back("every user caches P*t/K=" + std::to_string(raw.P * raw.t / raw.K) +
                              " parts");
      report.passed.push_back("K=" + std::to_string(raw.K) + " = t + L with L=" +
                              std::to_string(raw.K - raw.t));
      describe_parts(raw.K, raw.t, raw.P, report);
      if (!rows_distinct(PlacementMatrix::from_raw(raw))) {
        report.failed.push_back("two rows are identical; their codewords would not be decodable");
      }
    }
    for (auto& s : issues) report.failed.push_back(std::move(s));
    return report;
  }

  std::istringstream in(text);
  std::vector<Entry> entries;
  try {
    entries = read_entries(in);
  } catch (const InvalidArgument& e) {
    report.failed.push_back(e.what());
    return report;
  }
  // Check the network first so a K != t + L config is reported as such even
  // though its placements cannot be built.
  NetworkConfig net;
  bool have_L = false;
  for (const auto& e : entries) {
    try {
      if (e.key == "K") net.K = parse_number<int>(e.key, e.value);
      if (e.key == "t") net.t = parse_number<int>(e.key, e.value);
      if (e.key == "L") net.L = parse_number<int>(e.key, e.value), have_L = true;
      if (e.key == "scenario") {
        const auto preset = preset_scenario(e.value).experiment.network;
        net.K = preset.K;
        net.t = preset.t;
      }
    } catch (const InvalidArgument& err) {
      report.failed.push_back("line " + std::to_string(e.line) + ": " + err.what());
    }
  }
  if (!have_L) net.L = net.K - net.t;
  try {
    net.validate();
    report.passed.push_back("K=" + std::to_string(net.K) + " = t + L (t=" + std::to_string(net.t) +
                            ", L=" + std::to_string(net.L) + ")");
  } catch (const ConfigError& e) {
    report.failed.push_back(e.what());
    return report;
  }
  try {
    const auto spec = apply_entries(entries);
    spec.experiment.validate();
    for (const auto& pc : spec.experiment.placements) {
      report.passed.push_back("placement '" + pc.label + "': P=" + std::to_string(pc.V.parts()) +
                              ", row sums t, column sums P*t/K");
      describe_parts(net.K, net.t, pc.V.parts(), report);
    }
    if (spec.experiment.placements.empty()) report.failed.push_back("no placements configured");
  } catch (const InvalidArgument& e) {
    report.failed.push_back(e.what());
  }
  return report;
}

}  // namespace ccbeam
