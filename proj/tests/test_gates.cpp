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

#include <random>

#include "leakbench/leakbench.hpp"
#include "test_util.hpp"

namespace leakbench {
namespace {

using testing::random_density;
using testing::random_spec;

Eigen::Index idx(const char* s) { return static_cast<Eigen::Index>(TritString::from_string(s).index()); }

TEST(Pauli, Labels) {
  const auto l = PauliLabel::from_string("XZ");
  EXPECT_EQ(l.index(), 7u);
  EXPECT_EQ(PauliLabel::from_index(7, 2).str(), "XZ");
  EXPECT_THROW(PauliLabel::from_string("XQ"), std::invalid_argument);
  std::set<std::string> seen;
  for (std::uint64_t k = 0; k < 16; ++k) seen.insert(PauliLabel::from_index(k, 2).str());
  EXPECT_EQ(seen.size(), 16u);
}

TEST(Pauli, Embedding) {
  EXPECT_EQ(max_abs_diff(embed_pauli(PauliLabel::from_string("III")).unitary, CMatrix::Identity(27, 27)), 0.0);
  const CMatrix x = embed_pauli(PauliLabel::from_string("X")).unitary;
  CMatrix expect = CMatrix::Zero(3, 3);
  expect(0, 1) = 1.0;
  expect(1, 0) = 1.0;
  expect(2, 2) = 1.0;
  EXPECT_EQ(max_abs_diff(x, expect), 0.0);
  const CMatrix xz = embed_pauli(PauliLabel::from_string("XZ")).unitary;
  EXPECT_EQ(max_abs_diff(xz, kron(x, embed_pauli(PauliLabel::from_string("Z")).unitary)), 0.0);
  EXPECT_TRUE(is_unitary(xz));
}

TEST(Pauli, MonomialActionMatchesMatrix) {
  for (std::uint64_t k = 0; k < 16; ++k) {
    const auto label = PauliLabel::from_index(k, 2);
    const CMatrix u = embed_pauli_matrix(label);
    const auto act = pauli_action(label);
    CMatrix rebuilt = CMatrix::Zero(9, 9);
    for (std::size_t b = 0; b < 9; ++b) {
      rebuilt(static_cast<Eigen::Index>(act.target[b]), static_cast<Eigen::Index>(b)) = act.phase[b];
    }
    EXPECT_EQ(max_abs_diff(rebuilt, u), 0.0) << label.str();
    ASSERT_TRUE(monomial_action(u).has_value());
  }
  CMatrix h = CMatrix::Identity(3, 3);
  h(0, 1) = 1.0;
  EXPECT_FALSE(monomial_action(h).has_value());
}

TEST(Pauli, CondensedRepIsIdentity) {
  for (std::uint64_t k = 0; k < 64; ++k) {
    const auto q = condensed_rep(embed_pauli(PauliLabel::from_index(k, 3)).channel());
    EXPECT_EQ((q.entries() - RMatrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Gates, Unitary) {
  for (const char* name : {"iswap", "sqisw", "cz", "physical_iswap"}) {
    const CMatrix u = two_qubit_gate(name).unitary;
    EXPECT_LT(max_abs_diff(u.adjoint() * u, CMatrix::Identity(9, 9)), 1e-12) << name;
  }
  EXPECT_THROW(two_qubit_gate("cnot"), std::invalid_argument);
}

TEST(Gates, IswapSwaps01And10) {
  const CMatrix u = iswap_matrix();
  EXPECT_EQ(u(idx("10"), idx("01")), Complex(1.0, 0.0));
  EXPECT_EQ(u(idx("01"), idx("10")), Complex(1.0, 0.0));
  EXPECT_EQ(u(idx("11"), idx("11")), Complex(1.0, 0.0));
  EXPECT_EQ(u(idx("02"), idx("02")), Complex(1.0, 0.0));
  const CMatrix phys = physical_iswap_matrix();
  EXPECT_EQ(phys(idx("10"), idx("01")), Complex(0.0, 1.0));
}

TEST(Gates, SqiswSquaredIsIswapOnSwapBlock) {
  const CMatrix s2 = sqisw_matrix() * sqisw_matrix();
  const CMatrix phys = physical_iswap_matrix();
  for (const char* a : {"01", "10"}) {
    for (const char* b : {"01", "10"}) EXPECT_LT(std::abs(s2(idx(a), idx(b)) - phys(idx(a), idx(b))), 1e-15);
  }
  EXPECT_NEAR(std::abs(sqisw_matrix()(idx("01"), idx("01"))), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Gates, CzSquaredIsIdentity) {
  const CMatrix cz = cz_matrix();
  EXPECT_EQ(cz(4, 4), Complex(-1.0, 0.0));
  EXPECT_EQ(max_abs_diff(cz * cz, CMatrix::Identity(9, 9)), 0.0);
}

TEST(Gates, PreserveSubspaces) {
  for (const char* name : {"iswap", "sqisw", "cz", "physical_iswap"}) {
    const auto q = condensed_rep(two_qubit_gate(name).channel());
    EXPECT_LT((q.entries() - RMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15) << name;
  }
}

TEST(Gates, FromName) {
  EXPECT_EQ(gate_from_name("pauli:XY", 2).name, "pauli:XY");
  EXPECT_THROW(gate_from_name("pauli:X", 2), std::invalid_argument);
  EXPECT_THROW(gate_from_name("iswap", 3), std::invalid_argument);
  EXPECT_THROW(gate_from_name("toffoli", 2), std::invalid_argument);
}

TEST(NoisyGate, IdentityNoise) {
  const auto g = two_qubit_gate("iswap");
  const auto ch = noisy_gate(g, KrausChannel::identity(2), NoiseSide::kRight);
  ASSERT_EQ(ch.ops().size(), 1u);
  EXPECT_EQ(max_abs_diff(ch.ops()[0], g.unitary), 0.0);
  EXPECT_THROW(noisy_gate(g, KrausChannel::identity(1), NoiseSide::kLeft), std::invalid_argument);
}

TEST(NoisyGate, OrderAndComposition) {
  SingleSiteLeakageSpec spec;
  spec.n = 1;
  spec.add("0", "2", 0.2);
  const auto noise = build_single_site_channel(spec);
  const auto x = embed_pauli(PauliLabel::from_string("X"));
  // Noise first leaks |0>; gate first sends |0> to |1>, which does not leak.
  CMatrix rho = CMatrix::Zero(3, 3);
  rho(0, 0) = 1.0;
  const CMatrix right = noisy_gate(x, noise, NoiseSide::kRight).apply(rho);
  const CMatrix left = noisy_gate(x, noise, NoiseSide::kLeft).apply(rho);
  EXPECT_NEAR(right(2, 2).real(), 0.2, 1e-15);
  EXPECT_NEAR(left(2, 2).real(), 0.0, 1e-15);
}

TEST(NoisyGate, IswapNoiseCommutesWithIswap) {
  const auto g = two_qubit_gate("iswap");
  const auto noise = iswap_noise(0.07);
  const auto l = condensed_rep(noisy_gate(g, noise, NoiseSide::kLeft));
  const auto r = condensed_rep(noisy_gate(g, noise, NoiseSide::kRight));
  EXPECT_LT((l.entries() - r.entries()).cwiseAbs().maxCoeff(), 1e-15);
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix rho = random_density(gen, 9);
    const CMatrix a = g.unitary * noise.apply(rho) * g.unitary.adjoint();
    const CMatrix b = noise.apply(g.unitary * rho * g.unitary.adjoint());
    EXPECT_LE(max_abs_diff(a, b), 1e-12);
  }
}

TEST(NoisyGate, PauliDoesNotChangeCondensedRep) {
  std::mt19937_64 gen(6);
  const auto noise = build_single_site_channel(random_spec(gen, 2));
  const auto g = embed_pauli(PauliLabel::from_string("XI"));
  const auto q = condensed_rep(noisy_gate(g, noise, NoiseSide::kRight));
  EXPECT_LT((q.entries() - condensed_rep(noise).entries()).cwiseAbs().maxCoeff(), 1e-15);
}

}  // namespace
}  // namespace leakbench
