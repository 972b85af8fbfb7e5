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

#ifndef LEAKBENCH_PRESETS_HPP_
#define LEAKBENCH_PRESETS_HPP_

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "leakbench/io.hpp"
#include "leakbench/noise.hpp"
#include "leakbench/protocol.hpp"
#include "leakbench/rng.hpp"
#include "leakbench/spam.hpp"
#include "leakbench/theory.hpp"

namespace leakbench {

inline constexpr std::uint64_t kPresetStream = 3;

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"example1", "example2", "iswap"};
  return names;
}

namespace detail {

inline double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline void paper_spam(ExperimentConfig& c, double prep) {
  c.prep.p_c = prep;
  c.prep.p_l = prep;
  c.confusions.assign(static_cast<std::size_t>(c.n), reference_confusion());
}

}  // namespace detail

// Leak/seep exchange on n = 4 with rates drawn from [2.5e-5, 3.75e-5].
inline RunSpec example1_preset(std::uint64_t seed) {
  Rng rng(seed, {kPresetStream, 1});
  std::vector<double> p(4);
  std::vector<double> q(4);
  for (std::size_t i = 0; i < 4; ++i) {
    p[i] = detail::uniform_in(rng, 2.5e-5, 3.75e-5);
    q[i] = detail::uniform_in(rng, 2.5e-5, 3.75e-5);
  }
  RunSpec spec;
  spec.preset = "example1";
  auto& c = spec.experiment;
  c.n = 4;
  c.seed = seed;
  c.mode = Mode::kLrb;
  c.pauli_noise = example1_spec(p, q);
  detail::paper_spam(c, 1e-4);
  c.lengths = geometric_lengths(150000, 12);
  c.circuits_per_length = 200;
  // shared prefixes keep the 1.5e5-step sequences affordable
  c.reuse_prefixes = true;
  spec.fit = {1, "corollary1", 1.0};
  return spec;
}

// n = 3: every computational <-> single-leak flip at ~1e-3 and flips inside
// the computational block and inside each single-leak block at ~1e-6.
inline SingleSiteLeakageSpec example2_spec(std::uint64_t seed) {
  constexpr int n = 3;
  Rng rng(seed, {kPresetStream, 2});
  SingleSiteLeakageSpec spec;
  spec.n = n;
  const auto d = ipow(3, n);
  for (std::size_t a = 0; a < d; ++a) {
    const auto from = TritString::from_index(a, n);
    for (std::size_t b = 0; b < d; ++b) {
      if (a == b) continue;
      const auto to = TritString::from_index(b, n);
      if (!allowed_transition(from, to)) continue;
      const bool cross = from.is_computational() != to.is_computational();
      const double base = cross ? 1e-3 : 1e-6;
      spec.transitions.push_back({from, to, detail::uniform_in(rng, base, base * (1.0 + 1e-5))});
    }
  }
  return spec;
}

inline RunSpec example2_preset(std::uint64_t seed) {
  RunSpec spec;
  spec.preset = "example2";
  auto& c = spec.experiment;
  c.n = 3;
  c.seed = seed;
  c.mode = Mode::kLrb;
  const auto noise = example2_spec(seed);
  c.pauli_noise = noise;
  detail::paper_spam(c, 1e-4);
  const auto rates = site_rates(noise);
  const auto summary = eigen_bounds(rates.p, rates.q);
  // slowest non-stationary mode sets the length range
  double lambda0 = 0.0;
  for (double v : summary.eigenvalues) {
    if (v < 1.0 - 1e-12) lambda0 = std::max(lambda0, v);
  }
  c.lengths = default_lengths(lambda0);
  c.circuits_per_length = 200;
  double ps = 0.0;
  double qs = 0.0;
  for (std::size_t i = 0; i < rates.p.size(); ++i) {
    ps += rates.p[i];
    qs += rates.q[i];
  }
  spec.fit = {1, "corollary1", qs / ps};
  return spec;
}

// Two-qubit iSWAP interleaved run: eps_T = 5e-5 on the gate, pbar = 5e-6 on
// the Paulis.
inline RunSpec iswap_preset(std::uint64_t seed) {
  RunSpec spec;
  spec.preset = "iswap";
  auto& c = spec.experiment;
  c.n = 2;
  c.seed = seed;
  c.mode = Mode::kIlrb;
  c.target = "iswap";
  c.target_noise = TwoQubitLeakSpec{2e-4, 2e-4, 0.0};
  c.pauli_noise = SimplifiedSpec::standard(2, 2e-5);
  detail::paper_spam(c, 1e-6);
  c.lengths = geometric_lengths(150000, 16);
  c.circuits_per_length = 500;
  spec.fit = {1, "iswap", 1.0};
  return spec;
}

inline RunSpec make_preset(std::string_view name, std::uint64_t seed) {
  if (name == "example1") return example1_preset(seed);
  if (name == "example2") return example2_preset(seed);
  if (name == "iswap") return iswap_preset(seed);
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace leakbench

#endif  // LEAKBENCH_PRESETS_HPP_
