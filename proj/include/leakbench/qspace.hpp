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

#ifndef LEAKBENCH_QSPACE_HPP_
#define LEAKBENCH_QSPACE_HPP_

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "leakbench/channel.hpp"
#include "leakbench/linalg.hpp"
#include "leakbench/pauli.hpp"

namespace leakbench {

// Basis state of n qutrits. Site 0 is the leftmost digit; the basis index is
// the big-endian base-3 value of the digits.
class TritString {
 public:
  TritString() = default;
  explicit TritString(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {
    if (digits_.empty()) throw std::invalid_argument("trit string needs n >= 1");
    for (auto t : digits_) {
      if (t > 2) throw std::invalid_argument("trit out of range");
    }
  }

  static TritString from_string(std::string_view s) {
    std::vector<std::uint8_t> d;
    for (char ch : s) {
      if (ch < '0' || ch > '2') {
        throw std::invalid_argument("bad trit character '" + std::string(1, ch) + "'");
      }
      d.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    return TritString(std::move(d));
  }

  static TritString from_index(std::size_t index, int n) {
    if (n < 1) throw std::invalid_argument("trit string needs n >= 1");
    std::vector<std::uint8_t> d(static_cast<std::size_t>(n));
    for (int k = n - 1; k >= 0; --k) {
      d[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(index % 3);
      index /= 3;
    }
    if (index != 0) throw std::invalid_argument("basis index out of range");
    return TritString(std::move(d));
  }

  static TritString zeros(int n) { return TritString(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)); }

  int size() const { return static_cast<int>(digits_.size()); }
  std::uint8_t operator[](int site) const { return digits_[static_cast<std::size_t>(site)]; }
  const std::vector<std::uint8_t>& digits() const { return digits_; }

  std::size_t index() const {
    std::size_t idx = 0;
    for (auto t : digits_) idx = idx * 3 + t;
    return idx;
  }

  std::string str() const {
    std::string s;
    for (auto t : digits_) s.push_back(static_cast<char>('0' + t));
    return s;
  }

  int leak_count() const {
    int c = 0;
    for (auto t : digits_) c += (t == 2);
    return c;
  }
  bool is_computational() const { return leak_count() == 0; }

  // Site of the only leaked digit, -1 if there is none or more than one.
  int single_leak_site() const {
    int site = -1;
    for (int k = 0; k < size(); ++k) {
      if (digits_[static_cast<std::size_t>(k)] == 2) {
        if (site >= 0) return -1;
        site = k;
      }
    }
    return site;
  }

  auto operator<=>(const TritString&) const = default;

 private:
  std::vector<std::uint8_t> digits_;
};

// Pattern in {c,l}^n. Index is big-endian binary with c=0, l=1, so "cc..c"
// is 0 and the single-leak label of site k is 1 << (n-1-k).
class SubspaceLabel {
 public:
  SubspaceLabel() = default;
  SubspaceLabel(int n, std::uint32_t index) : n_(n), index_(index) {
    if (n < 1 || n > 30) throw std::invalid_argument("label size out of range");
    if (index >= (1u << n)) throw std::invalid_argument("label index out of range");
  }

  static SubspaceLabel from_string(std::string_view s) {
    std::uint32_t idx = 0;
    for (char ch : s) {
      if (ch != 'c' && ch != 'l') {
        throw std::invalid_argument("bad subspace character '" + std::string(1, ch) + "'");
      }
      idx = idx * 2 + (ch == 'l');
    }
    return SubspaceLabel(static_cast<int>(s.size()), idx);
  }

  static SubspaceLabel of(const TritString& t) {
    std::uint32_t idx = 0;
    for (int k = 0; k < t.size(); ++k) idx = idx * 2 + (t[k] == 2);
    return SubspaceLabel(t.size(), idx);
  }

  static SubspaceLabel single_leak(int n, int site) {
    return SubspaceLabel(n, 1u << (n - 1 - site));
  }

  int size() const { return n_; }
  std::uint32_t index() const { return index_; }
  bool leaked(int site) const { return (index_ >> (n_ - 1 - site)) & 1u; }
  int leak_count() const { return __builtin_popcount(index_); }
  std::size_t dim() const { return ipow(2, n_ - leak_count()); }

  std::string str() const {
    std::string s;
    for (int k = 0; k < n_; ++k) s.push_back(leaked(k) ? 'l' : 'c');
    return s;
  }

  auto operator<=>(const SubspaceLabel&) const = default;

 private:
  int n_ = 1;
  std::uint32_t index_ = 0;
};

// Label index of every basis state.
inline std::vector<std::uint32_t> basis_labels(int n) {
  const std::size_t d = ipow(3, n);
  std::vector<std::uint32_t> out(d);
  for (std::size_t a = 0; a < d; ++a) {
    std::size_t rest = a;
    std::uint32_t lab = 0;
    for (int k = 0; k < n; ++k) {
      if (rest % 3 == 2) lab |= 1u << k;
      rest /= 3;
    }
    out[a] = lab;
  }
  return out;
}

inline std::vector<double> label_dims(int n) {
  std::vector<double> dims(ipow(2, n));
  for (std::size_t i = 0; i < dims.size(); ++i) {
    dims[i] = static_cast<double>(SubspaceLabel(n, static_cast<std::uint32_t>(i)).dim());
  }
  return dims;
}

inline CMatrix subspace_projector(const SubspaceLabel& label) {
  const int n = label.size();
  const auto labels = basis_labels(n);
  const auto d = static_cast<Eigen::Index>(labels.size());
  CMatrix p = CMatrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    if (labels[static_cast<std::size_t>(a)] == label.index()) p(a, a) = 1.0;
  }
  return p;
}

// Projector onto span{|0>,|1>}^n.
inline CMatrix computational_projector(int n) { return subspace_projector(SubspaceLabel(n, 0)); }

// Complement of the computational projector.
inline CMatrix leakage_projector(int n) {
  const auto d = static_cast<Eigen::Index>(ipow(3, n));
  return CMatrix::Identity(d, d) - computational_projector(n);
}

// rho -> sum_i tr(Pi_i rho) Pi_i / dim(i)
inline CMatrix twirl_project(const CMatrix& rho) {
  const int n = check_square_register(rho);
  const auto labels = basis_labels(n);
  const auto dims = label_dims(n);
  std::vector<Complex> w(dims.size(), Complex(0.0, 0.0));
  for (std::size_t a = 0; a < labels.size(); ++a) {
    w[labels[a]] += rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
  }
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < labels.size(); ++a) {
    out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = w[labels[a]] / dims[labels[a]];
  }
  return out;
}

// Average of U rho U^dagger over the per-site group {1, i, -1, -i} x {I, X, Y, Z},
// each element acting as [[w P, 0], [0, 1]] on its qutrit. The phase only
// touches the computational block; without it the 4^n unsigned Paulis leave
// coherences between computational and leaked levels in place.
inline CMatrix pauli_average(const CMatrix& rho, int n) {
  if (check_square_register(rho) != n) throw std::invalid_argument("state size does not match n");
  if (n > 2) throw std::invalid_argument("pauli_average is limited to n <= 2");
  static const Complex kPhases[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  const std::uint64_t count = ipow(16, n);
  CMatrix acc = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::uint64_t k = 0; k < count; ++k) {
    CMatrix u = CMatrix::Identity(1, 1);
    std::uint64_t rest = k;
    for (int site = 0; site < n; ++site) {
      CMatrix e = CMatrix::Zero(3, 3);
      e.topLeftCorner(2, 2) = kPhases[rest & 3u] * pauli_matrix(static_cast<std::uint8_t>((rest >> 2) & 3u));
      e(2, 2) = 1.0;
      rest >>= 4;
      u = kron(u, e);
    }
    acc += u * rho * u.adjoint();
  }
  return acc / static_cast<double>(count);
}

enum class QLayout { kFull, kSingleSite };

// Transition matrix between subspace projectors. Full layout is indexed by
// SubspaceLabel index; the single-site layout by {c^n, site 0 leaked, ...,
// site n-1 leaked}.
class CondensedQ {
 public:
  CondensedQ(RMatrix entries, std::vector<double> dims, int n, QLayout layout)
      : entries_(std::move(entries)), dims_(std::move(dims)), n_(n), layout_(layout) {
    if (entries_.rows() != entries_.cols()) throw std::invalid_argument("Q must be square");
    if (static_cast<std::size_t>(entries_.rows()) != dims_.size()) {
      throw std::invalid_argument("Q size does not match dims");
    }
    const auto expected = layout == QLayout::kFull ? ipow(2, n) : static_cast<std::size_t>(n + 1);
    if (dims_.size() != expected) throw std::invalid_argument("Q size does not match layout");
  }

  const RMatrix& entries() const { return entries_; }
  const std::vector<double>& dims() const { return dims_; }
  int sites() const { return n_; }
  QLayout layout() const { return layout_; }
  Eigen::Index size() const { return entries_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  double max_column_sum_error() const {
    return (entries_.colwise().sum().array() - 1.0).abs().maxCoeff();
  }

 private:
  RMatrix entries_;
  std::vector<double> dims_;
  int n_;
  QLayout layout_;
};

// Q_ij = tr(Pi_i Lambda(Pi_j / dim j)).
inline CondensedQ condensed_rep(const KrausChannel& channel) {
  const int n = channel.sites();
  const auto labels = basis_labels(n);
  auto dims = label_dims(n);
  const auto nl = static_cast<Eigen::Index>(dims.size());
  RMatrix q = RMatrix::Zero(nl, nl);
  for (const auto& e : channel.ops()) {
    for (Eigen::Index b = 0; b < e.cols(); ++b) {
      const auto j = labels[static_cast<std::size_t>(b)];
      for (Eigen::Index a = 0; a < e.rows(); ++a) {
        const double w = std::norm(e(a, b));
        if (w != 0.0) q(labels[static_cast<std::size_t>(a)], j) += w;
      }
    }
  }
  for (Eigen::Index j = 0; j < nl; ++j) q.col(j) /= dims[static_cast<std::size_t>(j)];
  return CondensedQ(std::move(q), std::move(dims), n, QLayout::kFull);
}

// Rows/columns of c^n and the n single-leak labels.
inline CondensedQ single_site_restriction(const CondensedQ& full) {
  if (full.layout() != QLayout::kFull) throw std::invalid_argument("expected full layout");
  const int n = full.sites();
  std::vector<Eigen::Index> idx{0};
  for (int k = 0; k < n; ++k) idx.push_back(SubspaceLabel::single_leak(n, k).index());
  const auto m = static_cast<Eigen::Index>(idx.size());
  RMatrix q(m, m);
  std::vector<double> dims;
  for (Eigen::Index r = 0; r < m; ++r) {
    dims.push_back(full.dims()[static_cast<std::size_t>(idx[r])]);
    for (Eigen::Index c = 0; c < m; ++c) q(r, c) = full(idx[r], idx[c]);
  }
  return CondensedQ(std::move(q), std::move(dims), n, QLayout::kSingleSite);
}

inline CondensedQ compose_condensed(const CondensedQ& q1, const CondensedQ& q2) {
  if (q1.layout() != q2.layout() || q1.sites() != q2.sites() || q1.size() != q2.size()) {
    throw std::invalid_argument("condensed representations have different shapes");
  }
  return CondensedQ(q1.entries() * q2.entries(), q1.dims(), q1.sites(), q1.layout());
}

// v_i = tr(Pi_i rho), full layout. Hermitian input assumed.
inline RVector ket_coordinates(const CMatrix& rho) {
  const int n = check_square_register(rho);
  const auto labels = basis_labels(n);
  RVector v = RVector::Zero(static_cast<Eigen::Index>(ipow(2, n)));
  for (std::size_t a = 0; a < labels.size(); ++a) {
    v(labels[a]) += rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
  }
  return v;
}

// alpha_i = tr(Pi_i M) / dim(i), full layout. Hermitian M assumed.
inline RVector bra_coordinates(const CMatrix& effect) {
  const int n = check_square_register(effect);
  RVector a = ket_coordinates(effect);
  const auto dims = label_dims(n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) /= dims[static_cast<std::size_t>(i)];
  return a;
}

// <<M| Q |rho>> in the full layout.
inline double condensed_expectation(const CMatrix& effect, const CondensedQ& q, const CMatrix& rho) {
  if (q.layout() != QLayout::kFull) throw std::invalid_argument("expected full layout");
  const RVector a = bra_coordinates(effect);
  const RVector v = ket_coordinates(rho);
  if (a.size() != q.size() || v.size() != q.size()) throw std::invalid_argument("dimension mismatch");
  return a.dot(q.entries() * v);
}

}  // namespace leakbench

#endif  // LEAKBENCH_QSPACE_HPP_
