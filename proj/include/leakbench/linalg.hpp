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

#ifndef LEAKBENCH_LINALG_HPP_
#define LEAKBENCH_LINALG_HPP_

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace leakbench {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Absolute tolerance for projector, unitarity and stochasticity checks.
inline constexpr double kCheckTol = 1e-10;
// Diagonal deficits above this are rounding and clamp to zero.
inline constexpr double kNegativeClamp = 1e-12;

inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Number of qutrit sites for a register of dimension dim, or throws.
inline int sites_for_dim(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("register dimension must be a power of 3");
  int n = 0;
  std::size_t d = dim;
  while (d % 3 == 0) {
    d /= 3;
    ++n;
  }
  if (d != 1 || n == 0) {
    throw std::invalid_argument("register dimension " + std::to_string(dim) +
                                " is not a power of 3");
  }
  return n;
}

inline int check_square_register(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("operator is not square");
  return sites_for_dim(static_cast<std::size_t>(m.rows()));
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename A, typename B>
double max_abs_diff(const A& a, const B& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

inline bool is_unitary(const CMatrix& u, double tol = kCheckTol) {
  if (u.rows() != u.cols()) return false;
  CMatrix id = CMatrix::Identity(u.rows(), u.cols());
  return max_abs_diff(u.adjoint() * u, id) <= tol;
}

}  // namespace leakbench

#endif  // LEAKBENCH_LINALG_HPP_
