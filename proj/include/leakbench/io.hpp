// Copyright 2026 The leakbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEAKBENCH_IO_HPP_
#define LEAKBENCH_IO_HPP_

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <optional>
#include <system_error>
#include <variant>
#include <vector>

#include "json.hpp"
#include "leakbench/fit.hpp"
#include "leakbench/noise.hpp"
#include "leakbench/protocol.hpp"
#include "leakbench/spam.hpp"

namespace leakbench {

using Json = nlohmann::ordered_json;

// 0 selects the order automatically.
struct FitOptions {
  int order = 1;
  std::string model = "none";  // none, corollary1, iswap, cz, crosstalk_free
  double ratio = 1.0;
};

struct RunSpec {
  ExperimentConfig experiment;
  FitOptions fit;
  std::string preset;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// ---- numbers ----

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

inline std::uint64_t parse_uint(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kHex[v & 15u];
    v >>= 4;
  }
  return s;
}

// ---- CSV ----

inline void write_dataset_csv(const SurvivalDataset& ds, std::ostream& out) {
  out << "m,p,stderr,circuits,shots\n";
  for (const auto& pt : ds.points) {
    out << pt.m << ',' << format_double(pt.p) << ',' << format_double(pt.std_err) << ',' << pt.circuits << ','
        << pt.shots << '\n';
  }
}

inline SurvivalDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "m,p,stderr,circuits,shots") throw std::invalid_argument("unexpected CSV header '" + line + "'");
  SurvivalDataset ds;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw std::invalid_argument("CSV row " + std::to_string(row) + " needs 5 columns");
    try {
      SurvivalPoint pt;
      pt.m = parse_uint(cells[0]);
      pt.p = parse_double(cells[1]);
      pt.std_err = parse_double(cells[2]);
      pt.circuits = parse_uint(cells[3]);
      pt.shots = parse_uint(cells[4]);
      ds.points.push_back(pt);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("CSV row " + std::to_string(row) + ": " + e.what());
    }
  }
  return ds;
}

// ---- JSON ----

inline Json to_json(const TritString& t) { return t.str(); }

inline Json transitions_json(const SingleSiteLeakageSpec& s) {
  Json arr = Json::array();
  for (const auto& t : s.transitions) arr.push_back({{"from", t.from.str()}, {"to", t.to.str()}, {"p", t.p}});
  return arr;
}

inline Json to_json(const NoiseSpec& spec) {
  struct Visitor {
    Json operator()(const IdentityNoise&) const { return {{"type", "identity"}}; }
    Json operator()(const SingleSiteLeakageSpec& s) const {
      return {{"type", "single_site"}, {"transitions", transitions_json(s)}};
    }
    Json operator()(const SimplifiedSpec& s) const {
      Json u = Json::array();
      for (const auto& x : s.u) u.push_back(x.str());
      return {{"type", "simplified"}, {"p", s.p}, {"u0", s.u0.str()}, {"u", u}};
    }
    Json operator()(const TwoQubitLeakSpec& s) const {
      return {{"type", "two_qubit"}, {"eps1", s.eps1}, {"eps2", s.eps2}, {"eps3", s.eps3}};
    }
    Json operator()(const CrosstalkFreeSpec& s) const {
      Json sites = Json::array();
      for (const auto& x : s.sites) sites.push_back({{"transitions", transitions_json(x)}});
      return {{"type", "crosstalk_free"}, {"sites", sites}};
    }
  };
  return std::visit(Visitor{}, spec);
}

inline Json to_json(const MeasConfusion& c) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < 3; ++r) rows.push_back({c.m(r, 0), c.m(r, 1), c.m(r, 2)});
  return rows;
}

// Everything that determines the dataset; threads are excluded.
inline Json to_json(const RunSpec& spec) {
  const auto& c = spec.experiment;
  Json j;
  j["schema"] = 1;
  j["mode"] = c.mode == Mode::kLrb ? "lrb" : "ilrb";
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["lengths"] = c.lengths;
  j["circuits"] = c.circuits_per_length;
  if (c.shots) {
    j["shots"] = *c.shots;
  } else {
    j["shots"] = "exact";
  }
  j["reuse_prefixes"] = c.reuse_prefixes;
  if (c.mode == Mode::kIlrb) {
    j["target"] = c.target;
    j["target_noise"] = to_json(c.target_noise);
  }
  j["pauli_noise"] = to_json(c.pauli_noise);
  j["prep"] = {{"p_c", c.prep.p_c}, {"p_l", c.prep.p_l}, {"ideal", ideal_state(c.prep, c.n).str()}};
  Json conf = Json::array();
  for (const auto& m : effective_confusions(c)) conf.push_back(to_json(m));
  j["measurement"] = {{"matrices", conf}};
  j["fit"] = {{"order", spec.fit.order == 0 ? Json("auto") : Json(spec.fit.order)},
              {"model", spec.fit.model},
              {"ratio", spec.fit.ratio}};
  if (!spec.preset.empty()) j["preset"] = spec.preset;
  return j;
}

inline std::string config_hash(const RunSpec& spec) { return hex64(fnv1a(to_json(spec).dump())); }

inline Json fit_json(const DecayFit& fit) {
  Json j;
  j["order"] = fit.order;
  j["A0"] = fit.offset;
  j["amplitudes"] = fit.amplitudes;
  j["lambdas"] = fit.exponents;
  Json amp_se = Json::array();
  Json lam_se = Json::array();
  for (std::size_t k = 0; k < fit.exponents.size(); ++k) {
    amp_se.push_back(fit.amplitude_stderr(k));
    lam_se.push_back(fit.exponent_stderr(k));
  }
  j["stderr"] = {{"A0", fit.offset_stderr()}, {"amplitudes", amp_se}, {"lambdas", lam_se}};
  j["residual_rms"] = fit.residual_rms;
  j["converged"] = fit.converged;
  j["identifiable"] = fit.identifiable;
  return j;
}

inline void add_rates(Json& j, const std::optional<RateReport>& r, const std::string& model) {
  if (r) {
    j["L"] = r->leakage;
    j["S"] = r->seepage;
    j["L_err"] = r->leakage_err;
    j["S_err"] = r->seepage_err;
  } else {
    j["L"] = nullptr;
    j["S"] = nullptr;
    j["L_err"] = nullptr;
    j["S_err"] = nullptr;
  }
  j["model"] = model;
}

// ---- YAML config ----

namespace detail {

[[noreturn]] inline void fail(const YAML::Node& node, const std::string& what) {
  const auto mark = node.Mark();
  throw ConfigError(what, mark.is_null() ? 0 : mark.line + 1);
}

inline void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) fail(node, where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

inline YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& where) {
  const YAML::Node v = parent[key];
  if (!v) fail(parent, "missing key '" + key + "' in " + where);
  return v;
}

inline std::string scalar(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be a scalar");
  return node.Scalar();
}

inline double as_double(const YAML::Node& node, const std::string& what) {
  const auto s = scalar(node, what);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(node, what + " must be a number, got '" + s + "'");
  }
}

inline std::uint64_t as_uint(const YAML::Node& node, const std::string& what) {
  const auto s = scalar(node, what);
  try {
    return parse_uint(s);
  } catch (const std::exception&) {
    fail(node, what + " must be a non-negative integer, got '" + s + "'");
  }
}

inline bool as_bool(const YAML::Node& node, const std::string& what) {
  const auto s = scalar(node, what);
  if (s == "true") return true;
  if (s == "false") return false;
  fail(node, what + " must be true or false");
}

inline TritString as_trits(const YAML::Node& node, int n, const std::string& what) {
  try {
    auto t = TritString::from_string(scalar(node, what));
    if (t.size() != n) fail(node, what + " must have " + std::to_string(n) + " trits");
    return t;
  } catch (const std::invalid_argument& e) {
    fail(node, what + ": " + e.what());
  }
}

inline SingleSiteLeakageSpec parse_transitions(const YAML::Node& node, int n) {
  SingleSiteLeakageSpec s;
  s.n = n;
  if (!node.IsSequence()) fail(node, "transitions must be a list");
  for (const auto& t : node) {
    check_keys(t, {"from", "to", "p"}, "transition");
    s.transitions.push_back({as_trits(require(t, "from", "transition"), n, "from"),
                             as_trits(require(t, "to", "transition"), n, "to"),
                             as_double(require(t, "p", "transition"), "p")});
  }
  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    fail(node, e.what());
  }
  return s;
}

inline NoiseSpec parse_noise(const YAML::Node& node, int n, const std::string& where) {
  if (!node.IsMap()) fail(node, where + " must be a mapping");
  const auto type = scalar(require(node, "type", where), "type");
  try {
    if (type == "identity") {
      check_keys(node, {"type"}, where);
      return IdentityNoise{};
    }
    if (type == "single_site") {
      check_keys(node, {"type", "transitions"}, where);
      return parse_transitions(require(node, "transitions", where), n);
    }
    if (type == "simplified") {
      check_keys(node, {"type", "p", "u0", "u"}, where);
      auto s = SimplifiedSpec::standard(n, as_double(require(node, "p", where), "p"));
      if (node["u0"]) s.u0 = as_trits(node["u0"], n, "u0");
      if (node["u"]) {
        if (!node["u"].IsSequence()) fail(node["u"], "u must be a list");
        s.u.clear();
        for (const auto& x : node["u"]) s.u.push_back(as_trits(x, n, "u"));
      }
      validate(s);
      return s;
    }
    if (type == "two_qubit") {
      check_keys(node, {"type", "eps1", "eps2", "eps3"}, where);
      if (n != 2) fail(node, "two_qubit noise needs n = 2");
      TwoQubitLeakSpec s;
      s.eps1 = as_double(require(node, "eps1", where), "eps1");
      s.eps2 = as_double(require(node, "eps2", where), "eps2");
      if (node["eps3"]) s.eps3 = as_double(node["eps3"], "eps3");
      validate(s);
      return s;
    }
    if (type == "crosstalk_free") {
      check_keys(node, {"type", "sites"}, where);
      const auto sites = require(node, "sites", where);
      if (!sites.IsSequence() || static_cast<int>(sites.size()) != n) fail(sites, "sites must list one entry per site");
      CrosstalkFreeSpec s;
      for (const auto& site : sites) {
        check_keys(site, {"transitions"}, "site");
        s.sites.push_back(parse_transitions(require(site, "transitions", "site"), 1));
      }
      return s;
    }
  } catch (const std::invalid_argument& e) {
    fail(node, where + ": " + e.what());
  }
  fail(node, "unknown noise type '" + type + "'");
}

inline MeasConfusion parse_confusion(const YAML::Node& node) {
  try {
    if (node.IsSequence()) {
      if (node.size() != 3) fail(node, "confusion matrix needs 3 rows");
      MeasConfusion c;
      for (std::size_t r = 0; r < 3; ++r) {
        if (!node[r].IsSequence() || node[r].size() != 3) fail(node[r], "confusion row needs 3 entries");
        for (std::size_t s = 0; s < 3; ++s) {
          c.m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = as_double(node[r][s], "confusion entry");
        }
      }
      MeasConfusion::validate(c);
      return c;
    }
    check_keys(node, {"eta0", "eta1", "eta_l0", "eta_l1", "eta_s0", "eta_s1"}, "confusion");
    auto get = [&](const char* k) { return node[k] ? as_double(node[k], k) : 0.0; };
    return MeasConfusion::from_rates(get("eta0"), get("eta1"), get("eta_l0"), get("eta_l1"), get("eta_s0"),
                                     get("eta_s1"));
  } catch (const std::invalid_argument& e) {
    fail(node, e.what());
  }
}

}  // namespace detail

inline RunSpec parse_config(const std::string& text) {
  using namespace detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
  }
  if (!root || !root.IsMap()) throw ConfigError("config must be a mapping", 1);
  check_keys(root, {"schema", "mode", "n", "seed", "lengths", "circuits", "shots", "reuse_prefixes", "threads",
                    "target", "target_noise", "pauli_noise", "prep", "measurement", "fit", "preset"},
             "config");
  if (as_uint(require(root, "schema", "config"), "schema") != 1) fail(root["schema"], "unsupported schema version");

  RunSpec spec;
  auto& c = spec.experiment;
  const auto mode = scalar(require(root, "mode", "config"), "mode");
  if (mode == "lrb") {
    c.mode = Mode::kLrb;
  } else if (mode == "ilrb") {
    c.mode = Mode::kIlrb;
  } else {
    fail(root["mode"], "mode must be lrb or ilrb");
  }
  const auto n = as_uint(require(root, "n", "config"), "n");
  if (n < 1 || n > 8) fail(root["n"], "n must lie in [1, 8]");
  c.n = static_cast<int>(n);
  if (root["seed"]) c.seed = as_uint(root["seed"], "seed");
  if (root["preset"]) spec.preset = scalar(root["preset"], "preset");

  const auto lengths = require(root, "lengths", "config");
  if (lengths.IsSequence()) {
    for (const auto& v : lengths) c.lengths.push_back(as_uint(v, "length"));
  } else if (lengths.IsMap()) {
    check_keys(lengths, {"max", "count"}, "lengths");
    const auto top = as_uint(require(lengths, "max", "lengths"), "max");
    const auto count = as_uint(require(lengths, "count", "lengths"), "count");
    if (top < 1 || count < 1) fail(lengths, "lengths need max >= 1 and count >= 1");
    c.lengths = geometric_lengths(top, count);
  } else {
    fail(lengths, "lengths must be a list or {max, count}");
  }
  for (std::size_t i = 0; i < c.lengths.size(); ++i) {
    if (c.lengths[i] < 1 || (i > 0 && c.lengths[i] <= c.lengths[i - 1])) {
      fail(lengths, "lengths must be >= 1 and strictly increasing");
    }
  }
  c.circuits_per_length = as_uint(require(root, "circuits", "config"), "circuits");
  if (c.circuits_per_length < 1) fail(root["circuits"], "circuits must be >= 1");
  if (root["shots"]) {
    const auto s = scalar(root["shots"], "shots");
    if (s != "exact") {
      c.shots = as_uint(root["shots"], "shots");
      if (*c.shots < 1) fail(root["shots"], "shots must be >= 1 or exact");
    }
  }
  if (root["reuse_prefixes"]) c.reuse_prefixes = as_bool(root["reuse_prefixes"], "reuse_prefixes");
  if (root["threads"]) c.threads = static_cast<unsigned>(as_uint(root["threads"], "threads"));

  if (root["pauli_noise"]) c.pauli_noise = parse_noise(root["pauli_noise"], c.n, "pauli_noise");
  if (c.mode == Mode::kIlrb) {
    c.target = scalar(require(root, "target", "config"), "target");
    try {
      gate_from_name(c.target, c.n);
    } catch (const std::invalid_argument& e) {
      fail(root["target"], e.what());
    }
    if (root["target_noise"]) c.target_noise = parse_noise(root["target_noise"], c.n, "target_noise");
  } else if (root["target"] || root["target_noise"]) {
    fail(root["target"] ? root["target"] : root["target_noise"], "target is only valid in ilrb mode");
  }

  if (const auto prep = root["prep"]) {
    check_keys(prep, {"p_c", "p_l", "ideal"}, "prep");
    if (prep["p_c"]) c.prep.p_c = as_double(prep["p_c"], "p_c");
    if (prep["p_l"]) c.prep.p_l = as_double(prep["p_l"], "p_l");
    if (prep["ideal"]) c.prep.ideal = as_trits(prep["ideal"], c.n, "ideal");
    try {
      validate(c.prep);
    } catch (const std::invalid_argument& e) {
      fail(prep, e.what());
    }
  }

  if (const auto meas = root["measurement"]) {
    check_keys(meas, {"confusion", "matrices"}, "measurement");
    if (meas["confusion"] && meas["matrices"]) fail(meas, "give either confusion or matrices");
    if (meas["confusion"]) {
      c.confusions.assign(static_cast<std::size_t>(c.n), parse_confusion(meas["confusion"]));
    } else if (meas["matrices"]) {
      const auto list = meas["matrices"];
      if (!list.IsSequence() || static_cast<int>(list.size()) != c.n) fail(list, "matrices must list one matrix per site");
      for (const auto& m : list) c.confusions.push_back(parse_confusion(m));
    }
  }

  if (const auto fit = root["fit"]) {
    check_keys(fit, {"order", "model", "ratio"}, "fit");
    if (fit["order"]) {
      const auto o = scalar(fit["order"], "order");
      if (o == "auto") {
        spec.fit.order = 0;
      } else if (o == "1" || o == "2") {
        spec.fit.order = o == "1" ? 1 : 2;
      } else {
        fail(fit["order"], "fit order must be 1, 2 or auto");
      }
    }
    if (fit["model"]) {
      spec.fit.model = scalar(fit["model"], "model");
      static const std::set<std::string> models{"none", "corollary1", "iswap", "cz", "crosstalk_free"};
      if (!models.count(spec.fit.model)) fail(fit["model"], "unknown rate model '" + spec.fit.model + "'");
      if (spec.fit.model == "iswap" && c.mode != Mode::kIlrb) fail(fit["model"], "iswap model needs ilrb mode");
    }
    if (fit["ratio"]) {
      spec.fit.ratio = as_double(fit["ratio"], "ratio");
      if (!(spec.fit.ratio >= 0.0)) fail(fit["ratio"], "ratio must be non-negative");
    }
  }

  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0);
  }
  return spec;
}

inline RunSpec load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace leakbench

#endif  // LEAKBENCH_IO_HPP_
