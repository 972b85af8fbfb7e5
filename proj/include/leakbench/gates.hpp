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

#ifndef LEAKBENCH_GATES_HPP_
#define LEAKBENCH_GATES_HPP_

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "leakbench/channel.hpp"
#include "leakbench/linalg.hpp"
#include "leakbench/pauli.hpp"

namespace leakbench {

// Ideal unitary on the full register with optional noise applied first.
struct GateChannel {
  std::string name;
  CMatrix unitary;
  std::optional<KrausChannel> noise;

  KrausChannel channel() const {
    KrausChannel u = KrausChannel::unitary(unitary);
    return noise ? compose(u, *noise) : u;
  }
};

inline GateChannel embed_pauli(const PauliLabel& label) {
  return GateChannel{"pauli:" + label.str(), embed_pauli_matrix(label), std::nullopt};
}

// Basis order 00,01,02,10,11,12,20,21,22.
inline CMatrix iswap_matrix() {
  CMatrix u = CMatrix::Identity(9, 9);
  u(1, 1) = u(3, 3) = 0.0;
  u(1, 3) = u(3, 1) = 1.0;
  return u;
}

// |01> -> i|10>, |10> -> i|01>.
inline CMatrix physical_iswap_matrix() {
  CMatrix u = CMatrix::Identity(9, 9);
  u(1, 1) = u(3, 3) = 0.0;
  u(1, 3) = u(3, 1) = Complex(0.0, 1.0);
  return u;
}

inline CMatrix sqisw_matrix() {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix u = CMatrix::Identity(9, 9);
  u(1, 1) = u(3, 3) = r;
  u(1, 3) = u(3, 1) = Complex(0.0, r);
  return u;
}

inline CMatrix cz_matrix() {
  CMatrix u = CMatrix::Identity(9, 9);
  u(4, 4) = -1.0;
  return u;
}

inline GateChannel two_qubit_gate(std::string_view name) {
  if (name == "iswap") return {"iswap", iswap_matrix(), std::nullopt};
  if (name == "sqisw") return {"sqisw", sqisw_matrix(), std::nullopt};
  if (name == "cz") return {"cz", cz_matrix(), std::nullopt};
  if (name == "physical_iswap") return {"physical_iswap", physical_iswap_matrix(), std::nullopt};
  throw std::invalid_argument("unknown two-qubit gate '" + std::string(name) + "'");
}

// Accepts iswap, sqisw, cz, physical_iswap (n = 2) and pauli:<IXYZ...>.
inline GateChannel gate_from_name(std::string_view name, int n) {
  if (name.starts_with("pauli:")) {
    auto label = PauliLabel::from_string(name.substr(6));
    if (label.size() != n) throw std::invalid_argument("Pauli gate length does not match n");
    return embed_pauli(label);
  }
  if (n != 2) throw std::invalid_argument("gate '" + std::string(name) + "' needs n = 2");
  return two_qubit_gate(name);
}

enum class NoiseSide { kLeft, kRight };

// kRight: {U E_i}, noise acts first. kLeft: {E_i U}.
inline KrausChannel noisy_gate(const GateChannel& gate, const KrausChannel& noise, NoiseSide side) {
  if (static_cast<std::size_t>(gate.unitary.rows()) != noise.dim()) {
    throw std::invalid_argument("gate and noise dimensions differ");
  }
  const KrausChannel u = KrausChannel::unitary(gate.unitary);
  return side == NoiseSide::kRight ? compose(u, noise) : compose(noise, u);
}

}  // namespace leakbench

#endif  // LEAKBENCH_GATES_HPP_
