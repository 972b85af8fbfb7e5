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

#ifndef LEAKBENCH_SPAM_HPP_
#define LEAKBENCH_SPAM_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "leakbench/linalg.hpp"
#include "leakbench/qspace.hpp"

namespace leakbench {

// rho0 = (1 - p_c - p_l)|ideal><ideal| + p_c Pi_c/d_c + p_l Pi_l/d_l
struct PrepSpec {
  double p_c = 0.0;
  double p_l = 0.0;
  std::optional<TritString> ideal;  // all zeros when unset
};

inline void validate(const PrepSpec& s) {
  if (!(s.p_c >= 0.0 && s.p_c <= 1.0 && s.p_l >= 0.0 && s.p_l <= 1.0)) {
    throw std::invalid_argument("preparation probabilities out of [0,1]");
  }
  if (s.p_c + s.p_l > 1.0 + kNegativeClamp) throw std::invalid_argument("p_c + p_l exceeds 1");
}

inline TritString ideal_state(const PrepSpec& s, int n) {
  if (!s.ideal) return TritString::zeros(n);
  if (s.ideal->size() != n) throw std::invalid_argument("ideal state has the wrong number of sites");
  return *s.ideal;
}

// Diagonal of the (diagonal) noisy initial state.
inline std::vector<double> initial_populations(const PrepSpec& s, int n) {
  validate(s);
  const std::size_t d = ipow(3, n);
  const double dc = static_cast<double>(ipow(2, n));
  const double dl = static_cast<double>(d) - dc;
  const auto labels = basis_labels(n);
  std::vector<double> pop(d, 0.0);
  for (std::size_t a = 0; a < d; ++a) pop[a] = labels[a] == 0 ? s.p_c / dc : s.p_l / dl;
  pop[ideal_state(s, n).index()] += 1.0 - s.p_c - s.p_l;
  return pop;
}

inline CMatrix noisy_initial_state(const PrepSpec& s, int n) {
  const auto pop = initial_populations(s, n);
  CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(pop.size()), static_cast<Eigen::Index>(pop.size()));
  for (std::size_t a = 0; a < pop.size(); ++a) rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = pop[a];
  return rho;
}

// Entry (o, s): probability of recording o when the true level is s.
struct MeasConfusion {
  RMatrix m = RMatrix::Identity(3, 3);

  static MeasConfusion identity() { return {}; }

  // eta0: 0 -> 1, eta1: 1 -> 0, eta_l*: {0,1} -> 2, eta_s*: 2 -> {0,1}.
  static MeasConfusion from_rates(double eta0, double eta1, double eta_l0, double eta_l1,
                                  double eta_s0, double eta_s1) {
    MeasConfusion c;
    c.m << 1.0 - eta0 - eta_l0, eta1, eta_s0,
           eta0, 1.0 - eta1 - eta_l1, eta_s1,
           eta_l0, eta_l1, 1.0 - eta_s0 - eta_s1;
    validate(c);
    return c;
  }

  static void validate(const MeasConfusion& c) {
    if (c.m.rows() != 3 || c.m.cols() != 3) throw std::invalid_argument("confusion matrix must be 3x3");
    if ((c.m.array() < 0.0).any()) throw std::invalid_argument("confusion matrix has negative entries");
    for (Eigen::Index s = 0; s < 3; ++s) {
      if (std::abs(c.m.col(s).sum() - 1.0) > kCheckTol) {
        throw std::invalid_argument("confusion matrix column does not sum to 1");
      }
    }
  }
};

// Readout parameters used for the benchmarking examples.
inline MeasConfusion reference_confusion() { return MeasConfusion::from_rates(0.05, 0.1, 1e-4, 5e-4, 1e-4, 5e-4); }

// Probability that every recorded trit is 0 or 1, per true basis state.
inline std::vector<double> effect_diagonal(const std::vector<MeasConfusion>& confusions) {
  if (confusions.empty()) throw std::invalid_argument("need one confusion matrix per site");
  const int n = static_cast<int>(confusions.size());
  std::vector<std::array<double, 3>> site(confusions.size());
  for (std::size_t j = 0; j < confusions.size(); ++j) {
    MeasConfusion::validate(confusions[j]);
    for (Eigen::Index s = 0; s < 3; ++s) site[j][static_cast<std::size_t>(s)] = confusions[j].m(0, s) + confusions[j].m(1, s);
  }
  const std::size_t d = ipow(3, n);
  std::vector<double> diag(d);
  for (std::size_t a = 0; a < d; ++a) {
    std::size_t rest = a;
    double v = 1.0;
    for (int k = n - 1; k >= 0; --k) {
      v *= site[static_cast<std::size_t>(k)][rest % 3];
      rest /= 3;
    }
    diag[a] = v;
  }
  return diag;
}

inline CMatrix computational_effect(const std::vector<MeasConfusion>& confusions) {
  const auto diag = effect_diagonal(confusions);
  const auto d = static_cast<Eigen::Index>(diag.size());
  CMatrix e = CMatrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) e(a, a) = diag[static_cast<std::size_t>(a)];
  return e;
}

}  // namespace leakbench

#endif  // LEAKBENCH_SPAM_HPP_
