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

#ifndef LEAKBENCH_CHANNEL_HPP_
#define LEAKBENCH_CHANNEL_HPP_

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "leakbench/linalg.hpp"

namespace leakbench {

// A quantum channel on a register of n qutrits given by its Kraus operators.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<CMatrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw std::invalid_argument("channel needs at least one Kraus operator");
    sites_ = check_square_register(ops_.front());
    for (const auto& e : ops_) {
      if (e.rows() != ops_.front().rows() || e.cols() != ops_.front().cols()) {
        throw std::invalid_argument("Kraus operators have different shapes");
      }
    }
  }

  static KrausChannel identity(int n) {
    if (n < 1) throw std::invalid_argument("register needs n >= 1");
    auto d = static_cast<Eigen::Index>(ipow(3, n));
    return KrausChannel({CMatrix::Identity(d, d)});
  }

  static KrausChannel unitary(const CMatrix& u) { return KrausChannel({u}); }

  int sites() const { return sites_; }
  std::size_t dim() const { return static_cast<std::size_t>(ops_.front().rows()); }
  const std::vector<CMatrix>& ops() const { return ops_; }

  CMatrix apply(const CMatrix& rho) const {
    if (static_cast<std::size_t>(rho.rows()) != dim() || rho.rows() != rho.cols()) {
      throw std::invalid_argument("state dimension does not match channel");
    }
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& e : ops_) out += e * rho * e.adjoint();
    return out;
  }

  // sum_i E_i^dagger E_i
  CMatrix completeness() const {
    CMatrix s = CMatrix::Zero(ops_.front().rows(), ops_.front().cols());
    for (const auto& e : ops_) s += e.adjoint() * e;
    return s;
  }

  // True when every Kraus operator has at most one nonzero entry per row.
  // Such channels map diagonal states to diagonal states and the diagonal
  // evolves on its own.
  bool row_monomial() const {
    for (const auto& e : ops_) {
      for (Eigen::Index r = 0; r < e.rows(); ++r) {
        int nz = 0;
        for (Eigen::Index c = 0; c < e.cols(); ++c) {
          if (e(r, c) != Complex(0.0, 0.0)) ++nz;
        }
        if (nz > 1) return false;
      }
    }
    return true;
  }

 private:
  std::vector<CMatrix> ops_;
  int sites_ = 0;
};

// (after o before)(rho) = after(before(rho)). Products that vanish are dropped.
inline KrausChannel compose(const KrausChannel& after, const KrausChannel& before) {
  if (after.dim() != before.dim()) throw std::invalid_argument("channel dimension mismatch");
  std::vector<CMatrix> ops;
  for (const auto& a : after.ops()) {
    for (const auto& b : before.ops()) {
      CMatrix ab = a * b;
      if (ab.cwiseAbs().maxCoeff() > 0.0) ops.push_back(std::move(ab));
    }
  }
  if (ops.empty()) ops.push_back(CMatrix::Zero(after.dim(), after.dim()));
  return KrausChannel(std::move(ops));
}

// Channel on the joined register; a acts on the leftmost sites.
inline KrausChannel tensor(const KrausChannel& a, const KrausChannel& b) {
  std::vector<CMatrix> ops;
  for (const auto& x : a.ops()) {
    for (const auto& y : b.ops()) ops.push_back(kron(x, y));
  }
  return KrausChannel(std::move(ops));
}

}  // namespace leakbench

#endif  // LEAKBENCH_CHANNEL_HPP_
