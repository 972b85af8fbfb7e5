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

#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "leakbench/io.hpp"
#include "leakbench/leakbench.hpp"
#include "leakbench/presets.hpp"

namespace leakbench {
namespace {

const char* kMinimal = R"(schema: 1
mode: lrb
n: 2
lengths: [1, 10, 100]
circuits: 5
)";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

TEST(Numbers, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 0.9999878097123, 1e-300, 0.0, 1.0, 5e-324,
                   std::numeric_limits<double>::max()}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_THROW(parse_double("1.0x"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
  EXPECT_EQ(parse_uint("42"), 42u);
  EXPECT_THROW(parse_uint("-1"), std::invalid_argument);
}

TEST(Hash, KnownValues) {
  EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
  EXPECT_EQ(hex64(0), "0000000000000000");
}

TEST(Csv, RoundTripIsBitExact) {
  SurvivalDataset ds;
  ds.points = {{1, 0.9999878097123, 1.234e-9, 200, 0}, {150000, 1.0 / 3.0, 0.0, 7, 1000}};
  std::stringstream out;
  write_dataset_csv(ds, out);
  EXPECT_EQ(out.str().substr(0, 26), "m,p,stderr,circuits,shots\n");
  std::stringstream in(out.str());
  const auto back = read_dataset_csv(in);
  ASSERT_EQ(back.points.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.points[i].m, ds.points[i].m);
    EXPECT_EQ(back.points[i].p, ds.points[i].p);
    EXPECT_EQ(back.points[i].std_err, ds.points[i].std_err);
    EXPECT_EQ(back.points[i].circuits, ds.points[i].circuits);
    EXPECT_EQ(back.points[i].shots, ds.points[i].shots);
  }
  std::stringstream again;
  write_dataset_csv(back, again);
  EXPECT_EQ(again.str(), out.str());
}

TEST(Csv, Errors) {
  std::stringstream bad_header("m,p\n1,0.5\n");
  EXPECT_THROW(read_dataset_csv(bad_header), std::invalid_argument);
  std::stringstream short_row("m,p,stderr,circuits,shots\n1,0.5,0\n");
  EXPECT_THROW(read_dataset_csv(short_row), std::invalid_argument);
  std::stringstream bad_number("m,p,stderr,circuits,shots\n1,abc,0,1,0\n");
  EXPECT_THROW(read_dataset_csv(bad_number), std::invalid_argument);
  std::stringstream crlf("m,p,stderr,circuits,shots\r\n3,0.5,0.1,2,0\r\n");
  EXPECT_EQ(read_dataset_csv(crlf).points.at(0).m, 3u);
}

TEST(Config, Minimal) {
  const auto spec = parse_config(kMinimal);
  const auto& c = spec.experiment;
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.mode, Mode::kLrb);
  EXPECT_EQ(c.lengths, (std::vector<std::uint64_t>{1, 10, 100}));
  EXPECT_EQ(c.circuits_per_length, 5u);
  EXPECT_FALSE(c.shots);
  EXPECT_FALSE(c.reuse_prefixes);
  EXPECT_TRUE(std::holds_alternative<IdentityNoise>(c.pauli_noise));
  EXPECT_EQ(spec.fit.order, 1);
  EXPECT_EQ(spec.fit.model, "none");
}

TEST(Config, Full) {
  const auto spec = parse_config(R"(schema: 1
mode: ilrb
n: 2
seed: 17
lengths: {max: 1000, count: 8}
circuits: 20
shots: 100
reuse_prefixes: true
threads: 3
target: iswap
target_noise: {type: two_qubit, eps1: 2.0e-4, eps2: 1.0e-4}
pauli_noise: {type: simplified, p: 2.0e-5}
prep: {p_c: 1.0e-4, p_l: 2.0e-4, ideal: "01"}
measurement:
  confusion: {eta0: 0.05, eta1: 0.1, eta_l0: 1.0e-4, eta_l1: 5.0e-4, eta_s0: 1.0e-4, eta_s1: 5.0e-4}
fit: {order: auto, model: iswap}
)");
  const auto& c = spec.experiment;
  EXPECT_EQ(c.mode, Mode::kIlrb);
  EXPECT_EQ(c.seed, 17u);
  EXPECT_EQ(c.lengths, geometric_lengths(1000, 8));
  EXPECT_EQ(*c.shots, 100u);
  EXPECT_TRUE(c.reuse_prefixes);
  EXPECT_EQ(c.threads, 3u);
  EXPECT_EQ(c.target, "iswap");
  EXPECT_EQ(std::get<TwoQubitLeakSpec>(c.target_noise).eps1, 2.0e-4);
  EXPECT_EQ(std::get<SimplifiedSpec>(c.pauli_noise).p, 2.0e-5);
  EXPECT_EQ(c.prep.ideal->str(), "01");
  ASSERT_EQ(c.confusions.size(), 2u);
  EXPECT_EQ(c.confusions[1].m, reference_confusion().m);
  EXPECT_EQ(spec.fit.order, 0);
  EXPECT_EQ(spec.fit.model, "iswap");
}

TEST(Config, NoiseTypes) {
  const auto single = parse_config(std::string(kMinimal) + R"(pauli_noise:
  type: single_site
  transitions:
    - {from: "00", to: "20", p: 0.01}
    - {from: "20", to: "00", p: 0.02}
)");
  const auto& s = std::get<SingleSiteLeakageSpec>(single.experiment.pauli_noise);
  ASSERT_EQ(s.transitions.size(), 2u);
  EXPECT_EQ(s.transitions[1].from.str(), "20");
  EXPECT_EQ(s.transitions[1].p, 0.02);

  const auto cf = parse_config(std::string(kMinimal) + R"(pauli_noise:
  type: crosstalk_free
  sites:
    - transitions: [{from: "0", to: "2", p: 0.01}]
    - transitions: [{from: "2", to: "1", p: 0.03}]
)");
  EXPECT_EQ(std::get<CrosstalkFreeSpec>(cf.experiment.pauli_noise).sites.size(), 2u);

  const auto custom = parse_config(std::string(kMinimal) + R"(pauli_noise: {type: simplified, p: 0.01, u0: "10", u: ["20", "02"]}
measurement:
  matrices:
    - [[0.9, 0.1, 0.0], [0.1, 0.9, 0.0], [0.0, 0.0, 1.0]]
    - [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
)");
  const auto& sp = std::get<SimplifiedSpec>(custom.experiment.pauli_noise);
  EXPECT_EQ(sp.u0.str(), "10");
  ASSERT_EQ(sp.u.size(), 2u);
  EXPECT_EQ(custom.experiment.confusions[0].m(1, 0), 0.1);

  const auto id = parse_config(std::string(kMinimal) + "pauli_noise: {type: identity}\n");
  EXPECT_TRUE(std::holds_alternative<IdentityNoise>(id.experiment.pauli_noise));
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line(std::string(kMinimal) + "bogus: 1\n"), 6);
  EXPECT_EQ(error_line(std::string(kMinimal) + "shots: many\n"), 6);
  EXPECT_EQ(error_line("schema: 2\nmode: lrb\nn: 1\nlengths: [1]\ncircuits: 1\n"), 1);
  EXPECT_EQ(error_line("schema: 1\nmode: rb\nn: 1\nlengths: [1]\ncircuits: 1\n"), 2);
  EXPECT_EQ(error_line("schema: 1\nmode: lrb\nn: 9\nlengths: [1]\ncircuits: 1\n"), 3);
  EXPECT_EQ(error_line("schema: 1\nmode: lrb\nn: 1\nlengths: [3, 2]\ncircuits: 1\n"), 4);
  EXPECT_EQ(error_line("schema: 1\nmode: lrb\nn: 1\nlengths: [1]\ncircuits: 0\n"), 5);
  EXPECT_EQ(error_line(std::string(kMinimal) + "pauli_noise:\n  type: single_site\n  transitions:\n"
                                               "    - {from: \"00\", to: \"22\", p: 0.1}\n"),
            9);
  EXPECT_EQ(error_line(std::string(kMinimal) + "pauli_noise: {type: warp}\n"), 6);
  EXPECT_EQ(error_line(std::string(kMinimal) + "target: iswap\n"), 6);
  EXPECT_EQ(error_line(std::string(kMinimal) + "fit: {order: 3}\n"), 6);
  EXPECT_EQ(error_line(std::string(kMinimal) + "fit: {model: iswap}\n"), 6);
  EXPECT_EQ(error_line(std::string(kMinimal) + "prep: {p_c: 2}\n"), 6);
  EXPECT_EQ(error_line(std::string(kMinimal) + "measurement: {confusion: [[1, 0], [0, 1]]}\n"), 6);
  EXPECT_GT(error_line("schema: 1\nmode: [lrb\n"), 0);
  EXPECT_GT(error_line("- 1\n- 2\n"), 0);
  EXPECT_EQ(error_line("schema: 1\nmode: lrb\nn: 1\nlengths: [1]\n"), 1);
  EXPECT_EQ(error_line(kMinimal), -1);
  try {
    parse_config(std::string(kMinimal) + "bogus: 1\n");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config_file("/nonexistent/leakbench.yaml"), ConfigError); }

TEST(Config, HashIgnoresThreadsAndFormatting) {
  auto a = parse_config(kMinimal);
  auto b = parse_config("# comment\nschema: 1\nmode: lrb\nn: 2\nlengths:\n  - 1\n  - 10\n  - 100\ncircuits: 5\nthreads: 4\n");
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.experiment.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Json, RunSpecLayout) {
  const auto j = to_json(make_preset("iswap", 1));
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["mode"], "ilrb");
  EXPECT_EQ(j["target"], "iswap");
  EXPECT_EQ(j["shots"], "exact");
  EXPECT_EQ(j["fit"]["model"], "iswap");
  EXPECT_FALSE(j.contains("threads"));
}

TEST(Json, FitAndRates) {
  std::vector<SurvivalPoint> pts;
  for (auto m : geometric_lengths(1000, 10)) pts.push_back({m, 0.5 + 0.5 * std::pow(0.99, m), 0.0, 1, 0});
  const auto f = fit_decay(pts, 1);
  auto j = fit_json(f);
  EXPECT_EQ(j["order"], 1);
  EXPECT_NEAR(j["lambdas"][0].get<double>(), 0.99, 1e-9);
  EXPECT_TRUE(j["converged"].get<bool>());
  add_rates(j, std::nullopt, "none");
  EXPECT_TRUE(j["L"].is_null());
  add_rates(j, rates_from_fit(f, Corollary1Model{2, 1.0}), "corollary1");
  EXPECT_NEAR(j["L"].get<double>(), 0.005, 1e-9);
}

TEST(Presets, Shapes) {
  EXPECT_EQ(preset_names().size(), 3u);
  const auto e1 = make_preset("example1", 1);
  EXPECT_EQ(e1.experiment.n, 4);
  EXPECT_EQ(e1.experiment.lengths.size(), 12u);
  EXPECT_EQ(e1.experiment.lengths.back(), 150000u);
  EXPECT_EQ(e1.experiment.circuits_per_length, 200u);
  const auto r = site_rates(std::get<SingleSiteLeakageSpec>(e1.experiment.pauli_noise));
  // raw Kraus probabilities, averaged over the 2^4 spectator strings
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_GE(r.p[i], 2.5e-5 / 16);
    EXPECT_LE(r.p[i], 3.75e-5 / 16);
    EXPECT_GE(r.q[i], 2.5e-5 / 16);
    EXPECT_LE(r.q[i], 3.75e-5 / 16);
  }
  EXPECT_NO_THROW(validate(e1.experiment));
  EXPECT_EQ(config_hash(e1), config_hash(make_preset("example1", 1)));
  EXPECT_NE(config_hash(e1), config_hash(make_preset("example1", 2)));

  const auto e2 = make_preset("example2", 3);
  EXPECT_EQ(e2.experiment.n, 3);
  EXPECT_NO_THROW(validate(e2.experiment));
  const auto iswap = make_preset("iswap", 1);
  EXPECT_EQ(iswap.experiment.mode, Mode::kIlrb);
  EXPECT_NEAR(std::get<SimplifiedSpec>(iswap.experiment.pauli_noise).pbar(), 5e-6, 1e-20);
  EXPECT_THROW(make_preset("example3", 1), std::invalid_argument);
}

TEST(Presets, RoundTripThroughConfigJson) {
  // The JSON form of a single-site spec lists the same transitions.
  const auto e1 = make_preset("example1", 5);
  const auto j = to_json(e1.experiment.pauli_noise);
  EXPECT_EQ(j["type"], "single_site");
  EXPECT_EQ(j["transitions"].size(), 8u);
}

}  // namespace
}  // namespace leakbench
