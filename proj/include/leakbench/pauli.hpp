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

#ifndef LEAKBENCH_PAULI_HPP_
#define LEAKBENCH_PAULI_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "leakbench/linalg.hpp"

namespace leakbench {

// Unsigned n-qubit Pauli label. Codes: 0=I, 1=X, 2=Y, 3=Z; site 0 is leftmost.
class PauliLabel {
 public:
  PauliLabel() = default;
  explicit PauliLabel(std::vector<std::uint8_t> codes) : codes_(std::move(codes)) {
    if (codes_.empty()) throw std::invalid_argument("Pauli label needs n >= 1");
    for (auto c : codes_) {
      if (c > 3) throw std::invalid_argument("Pauli code out of range");
    }
  }

  static PauliLabel from_string(std::string_view s) {
    std::vector<std::uint8_t> codes;
    for (char ch : s) {
      switch (ch) {
        case 'I': codes.push_back(0); break;
        case 'X': codes.push_back(1); break;
        case 'Y': codes.push_back(2); break;
        case 'Z': codes.push_back(3); break;
        default:
          throw std::invalid_argument("bad Pauli character '" + std::string(1, ch) + "'");
      }
    }
    return PauliLabel(std::move(codes));
  }

  // Big-endian base-4 decoding.
  static PauliLabel from_index(std::uint64_t index, int n) {
    if (n < 1) throw std::invalid_argument("Pauli label needs n >= 1");
    std::vector<std::uint8_t> codes(static_cast<std::size_t>(n));
    for (int k = n - 1; k >= 0; --k) {
      codes[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(index & 3u);
      index >>= 2;
    }
    if (index != 0) throw std::invalid_argument("Pauli index out of range");
    return PauliLabel(std::move(codes));
  }

  int size() const { return static_cast<int>(codes_.size()); }
  std::uint8_t operator[](int site) const { return codes_[static_cast<std::size_t>(site)]; }

  std::uint64_t index() const {
    std::uint64_t idx = 0;
    for (auto c : codes_) idx = idx * 4 + c;
    return idx;
  }

  std::string str() const {
    static constexpr char kChars[] = {'I', 'X', 'Y', 'Z'};
    std::string s;
    for (auto c : codes_) s.push_back(kChars[c]);
    return s;
  }

  bool operator==(const PauliLabel&) const = default;

 private:
  std::vector<std::uint8_t> codes_;
};

inline CMatrix pauli_matrix(std::uint8_t code) {
  const Complex i(0.0, 1.0);
  CMatrix p(2, 2);
  switch (code) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, -i, i, 0; break;
    case 3: p << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("Pauli code out of range");
  }
  return p;
}

// [[P, 0], [0, 1]] on one qutrit.
inline CMatrix embed_pauli_site(std::uint8_t code) {
  CMatrix e = CMatrix::Zero(3, 3);
  e.topLeftCorner(2, 2) = pauli_matrix(code);
  e(2, 2) = 1.0;
  return e;
}

inline CMatrix embed_pauli_matrix(const PauliLabel& label) {
  CMatrix u = embed_pauli_site(label[0]);
  for (int k = 1; k < label.size(); ++k) u = kron(u, embed_pauli_site(label[k]));
  return u;
}

// U|k> = phase[k] |target[k]>.
struct MonomialAction {
  std::vector<std::uint32_t> target;
  std::vector<Complex> phase;
};

inline std::optional<MonomialAction> monomial_action(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::nullopt;
  const auto d = static_cast<std::size_t>(u.rows());
  MonomialAction act;
  act.target.assign(d, 0);
  act.phase.assign(d, Complex(0.0, 0.0));
  std::vector<int> row_hits(d, 0);
  for (std::size_t c = 0; c < d; ++c) {
    int nz = 0;
    for (std::size_t r = 0; r < d; ++r) {
      const Complex v = u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (v != Complex(0.0, 0.0)) {
        ++nz;
        ++row_hits[r];
        act.target[c] = static_cast<std::uint32_t>(r);
        act.phase[c] = v;
      }
    }
    if (nz != 1) return std::nullopt;
  }
  for (int h : row_hits) {
    if (h != 1) return std::nullopt;
  }
  return act;
}

// Action of an embedded Pauli built site by site without forming the matrix.
inline MonomialAction pauli_action(const PauliLabel& label) {
  const int n = label.size();
  const std::size_t d = ipow(3, n);
  MonomialAction act;
  act.target.resize(d);
  act.phase.resize(d);
  const Complex i(0.0, 1.0);
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t rest = k;
    std::size_t out = 0;
    std::size_t place = 1;
    Complex ph(1.0, 0.0);
    for (int s = n - 1; s >= 0; --s) {
      const auto digit = static_cast<std::uint8_t>(rest % 3);
      rest /= 3;
      std::uint8_t od = digit;
      if (digit < 2) {
        switch (label[s]) {
          case 1: od = digit ^ 1u; break;
          case 2: od = digit ^ 1u; ph *= (digit == 0) ? i : -i; break;
          case 3: if (digit == 1) ph *= -1.0; break;
          default: break;
        }
      }
      out += od * place;
      place *= 3;
    }
    act.target[k] = static_cast<std::uint32_t>(out);
    act.phase[k] = ph;
  }
  return act;
}

}  // namespace leakbench

#endif  // LEAKBENCH_PAULI_HPP_
