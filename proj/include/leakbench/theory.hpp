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

#ifndef LEAKBENCH_THEORY_HPP_
#define LEAKBENCH_THEORY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "leakbench/linalg.hpp"
#include "leakbench/noise.hpp"
#include "leakbench/qspace.hpp"

namespace leakbench {

// Q over {c^n, site 1 leaked, ..., site n leaked} for single-site leakage
// with per-site leak rates p and seep rates q.
struct SingleSiteQ {
  RMatrix entries;
  std::vector<double> p;
  std::vector<double> q;
};

inline void validate_site_rates(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.empty() || p.size() != q.size()) throw std::invalid_argument("p and q must be non-empty and of equal length");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) throw std::invalid_argument("rates must be non-negative");
    if (2.0 * q[i] > 1.0 + kNegativeClamp) throw std::invalid_argument("2 q_i exceeds 1");
    sum += p[i];
  }
  if (sum > 1.0 + kNegativeClamp) throw std::invalid_argument("sum of p exceeds 1");
}

inline SingleSiteQ single_site_q(const std::vector<double>& p, const std::vector<double>& q) {
  validate_site_rates(p, q);
  const auto n = static_cast<Eigen::Index>(p.size());
  RMatrix m = RMatrix::Zero(n + 1, n + 1);
  m(0, 0) = 1.0 - std::accumulate(p.begin(), p.end(), 0.0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    m(0, i) = 2.0 * q[static_cast<std::size_t>(i - 1)];
    m(i, 0) = p[static_cast<std::size_t>(i - 1)];
    m(i, i) = 1.0 - 2.0 * q[static_cast<std::size_t>(i - 1)];
  }
  return {m, p, q};
}

// Wraps a single-site Q with the subspace dimensions needed by rates_from_q.
inline CondensedQ as_condensed(const SingleSiteQ& sq) {
  const int n = static_cast<int>(sq.p.size());
  std::vector<double> dims{static_cast<double>(ipow(2, n))};
  for (int i = 0; i < n; ++i) dims.push_back(static_cast<double>(ipow(2, n - 1)));
  return CondensedQ(sq.entries, std::move(dims), n, QLayout::kSingleSite);
}

// f(x) = prod_i (x_i - x) - sum_i p_i prod_{j != i} (x_j - x), x_i = 1 - 2 q_i.
inline double char_poly_f(const std::vector<double>& p, const std::vector<double>& q, double x) {
  if (p.size() != q.size()) throw std::invalid_argument("p and q must have equal length");
  const std::size_t n = p.size();
  double prod = 1.0;
  for (std::size_t i = 0; i < n; ++i) prod *= (1.0 - 2.0 * q[i]) - x;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double t = p[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) t *= (1.0 - 2.0 * q[j]) - x;
    }
    sum += t;
  }
  return prod - sum;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SpectralSummary {
  std::vector<double> eigenvalues;  // ascending, repeated by multiplicity
  std::vector<Interval> bounds;     // one per eigenvalue
  std::vector<std::string> notes;

  // Distinct eigenvalues (within tol) with their multiplicities.
  std::vector<std::pair<double, int>> multiplicities(double tol = 1e-12) const {
    std::vector<std::pair<double, int>> out;
    for (double v : eigenvalues) {
      if (!out.empty() && std::abs(out.back().first - v) <= tol) {
        ++out.back().second;
      } else {
        out.emplace_back(v, 1);
      }
    }
    return out;
  }
};

namespace detail {

inline void sort_summary(SpectralSummary& s) {
  std::vector<std::size_t> order(s.eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.eigenvalues[a] < s.eigenvalues[b]; });
  SpectralSummary out;
  out.notes = s.notes;
  for (auto k : order) {
    out.eigenvalues.push_back(s.eigenvalues[k]);
    out.bounds.push_back(s.bounds[k]);
  }
  s = std::move(out);
}

// Root of f in [lo, hi] given a sign change; stops at width 1e-14.
template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::runtime_error("bisection interval has no sign change");
  for (int it = 0; it < 400 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Distinct q (descending) and p > 0: roots of f in the interlacing intervals.
inline void interlaced_roots(const std::vector<double>& p, const std::vector<double>& q, SpectralSummary& s) {
  const std::size_t r = p.size();
  const double psum = std::accumulate(p.begin(), p.end(), 0.0);
  std::vector<double> x(r);
  for (std::size_t i = 0; i < r; ++i) x[i] = 1.0 - 2.0 * q[i];
  if (r == 1) {
    s.eigenvalues.push_back(x[0] - p[0]);
    s.bounds.push_back({x[0] - p[0], x[0]});
    return;
  }
  auto f = [&](double v) { return char_poly_f(p, q, v); };
  const double lo0 = x[0] - psum;
  const double hi0 = std::min(x[0], x[r - 1] - psum);
  double root0;
  try {
    root0 = bisect(f, lo0, hi0);
  } catch (const std::runtime_error&) {
    root0 = bisect(f, lo0, x[0]);
  }
  s.eigenvalues.push_back(root0);
  s.bounds.push_back({lo0, hi0});
  for (std::size_t i = 0; i + 1 < r; ++i) {
    s.eigenvalues.push_back(bisect(f, x[i], x[i + 1]));
    s.bounds.push_back({x[i], x[i + 1]});
  }
}

}  // namespace detail

inline constexpr double kDegenerateSeepage = 1e-13;

// Spectrum of single_site_q(p, q) from the roots of f, with the interlacing
// bounds x_i < lambda_i < x_{i+1} and x_1 - sum p < lambda_0 < min(x_1, x_n - sum p)
// (sites ordered by decreasing q). Sites with equal q are merged first; each
// merge and each site with p_i = 0 contributes the isolated eigenvalue x_i.
inline SpectralSummary eigen_bounds(const std::vector<double>& p, const std::vector<double>& q) {
  validate_site_rates(p, q);
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q[a] > q[b]; });

  SpectralSummary s;
  std::vector<double> rp;
  std::vector<double> rq;
  for (auto k : order) {
    const double x = 1.0 - 2.0 * q[k];
    if (p[k] == 0.0) {
      s.eigenvalues.push_back(x);
      s.bounds.push_back({x, x});
      s.notes.push_back("site " + std::to_string(k + 1) +
                        " has p = 0: its eigenvalue may not appear in the survival decay");
      continue;
    }
    if (!rq.empty() && std::abs(rq.back() - q[k]) < kDegenerateSeepage) {
      rp.back() += p[k];
      s.eigenvalues.push_back(x);
      s.bounds.push_back({x, x});
      continue;
    }
    rp.push_back(p[k]);
    rq.push_back(q[k]);
  }
  if (!rp.empty()) detail::interlaced_roots(rp, rq, s);
  s.eigenvalues.push_back(1.0);
  s.bounds.push_back({1.0, 1.0});
  detail::sort_summary(s);
  return s;
}

// Similarity A Q A^{-1} that decouples site i+1 from site i when q_i = q_{i+1}
// (0-based i). The result is Q with p_i -> p_i + p_{i+1}, p_{i+1} -> 0 and the
// (i+1) row and column reduced to the diagonal entry 1 - 2 q_i.
struct SiteMerge {
  RMatrix similarity;
  RMatrix merged;
};

inline SiteMerge merge_equal_seepage_sites(const std::vector<double>& p, const std::vector<double>& q, int site) {
  validate_site_rates(p, q);
  const int n = static_cast<int>(p.size());
  if (site < 0 || site + 1 >= n) throw std::invalid_argument("merge site out of range");
  const auto i = static_cast<std::size_t>(site);
  if (std::abs(q[i] - q[i + 1]) >= kDegenerateSeepage) throw std::invalid_argument("sites do not share q");
  if (p[i] + p[i + 1] <= 0.0) throw std::invalid_argument("merge needs p_i + p_{i+1} > 0");
  const Eigen::Index a = site + 1;
  const Eigen::Index b = site + 2;
  RMatrix sim = RMatrix::Identity(n + 1, n + 1);
  sim(a, a) = 1.0;
  sim(a, b) = 1.0;
  sim(b, a) = p[i + 1];
  sim(b, b) = -p[i];
  std::vector<double> mp = p;
  std::vector<double> mq = q;
  mp[i] = p[i] + p[i + 1];
  mp[i + 1] = 0.0;
  mq[i + 1] = q[i];
  RMatrix merged = single_site_q(mp, mq).entries;
  merged(0, b) = 0.0;
  return {sim, merged};
}

// Eigenbasis of single_site_q with p_i = pbar, q_i = qbar. Columns of V:
// v (eigenvalue 1 - 2qbar - n pbar), u^(1..n-1) (1 - 2qbar), w (1).
struct UniformEigenbasis {
  RMatrix v;
  RMatrix v_inv;
  RVector eigenvalues;
};

inline UniformEigenbasis uniform_eigenbasis(int n, double pbar, double qbar) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(pbar > 0.0)) throw std::invalid_argument("uniform eigenbasis needs pbar > 0");
  const double r = 2.0 * qbar / pbar;
  const double nn = n;
  UniformEigenbasis e;
  e.v = RMatrix::Zero(n + 1, n + 1);
  e.v_inv = RMatrix::Zero(n + 1, n + 1);
  e.eigenvalues = RVector::Constant(n + 1, 1.0 - 2.0 * qbar);
  e.eigenvalues(0) = 1.0 - 2.0 * qbar - nn * pbar;
  e.eigenvalues(n) = 1.0;
  e.v(0, 0) = -nn;
  e.v(0, n) = r;
  for (int k = 1; k <= n; ++k) {
    e.v(k, 0) = 1.0;
    e.v(k, n) = 1.0;
  }
  for (int s = 1; s < n; ++s) {
    e.v(1, s) = 1.0;
    e.v(s + 1, s) = -1.0;
  }
  e.v_inv(0, 0) = -1.0 / (nn + r);
  for (int k = 1; k <= n; ++k) {
    e.v_inv(0, k) = r / (nn * (nn + r));
    e.v_inv(n, k) = 1.0 / (nn + r);
  }
  e.v_inv(n, 0) = 1.0 / (nn + r);
  for (int s = 1; s < n; ++s) {
    for (int k = 1; k <= n; ++k) e.v_inv(s, k) = 1.0 / nn;
    e.v_inv(s, s + 1) -= 1.0;
  }
  return e;
}

// L = 1 - Q_{c,c}, S = sum_{i != c} dim(i) Q_{c,i} / (3^n - 2^n).
inline LeakageRates rates_from_q(const CondensedQ& q) {
  const int n = q.sites();
  const double dl = static_cast<double>(ipow(3, n) - ipow(2, n));
  LeakageRates r;
  r.leakage = 1.0 - q(0, 0);
  double s = 0.0;
  for (Eigen::Index i = 1; i < q.size(); ++i) s += q.dims()[static_cast<std::size_t>(i)] * q(0, i);
  r.seepage = s / dl;
  return r;
}

// Q of the composed simplified channels (reference noise pbar, target eps)
// on {c^n, single-leak labels}.
inline SingleSiteQ ilrb_q(double pbar, double eps, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(pbar >= 0.0) || !(eps >= 0.0)) throw std::invalid_argument("rates must be non-negative");
  const double nn = n;
  const double cross = std::pow(2.0, nn + 1.0) * pbar * eps;
  const double up = 2.0 * (eps + pbar) - (nn + 1.0) * cross;
  RMatrix m = RMatrix::Zero(n + 1, n + 1);
  for (int i = 1; i <= n; ++i) {
    m(0, i) = up;
    m(i, 0) = 0.5 * up;
    for (int j = 1; j <= n; ++j) {
      if (i != j) m(i, j) = cross;
    }
  }
  for (int j = 0; j <= n; ++j) m(j, j) = 1.0 - (m.col(j).sum() - m(j, j));
  if ((m.array() < -kNegativeClamp).any() || (m.array() > 1.0 + kNegativeClamp).any()) {
    throw std::invalid_argument("iLRB Q entries leave [0,1]");
  }
  SingleSiteQ out;
  out.entries = m;
  out.p.assign(static_cast<std::size_t>(n), 0.5 * up);
  out.q.assign(static_cast<std::size_t>(n), 0.5 * up);
  return out;
}

// {lambda_2, lambda_1 (x n-1), 1}
inline SpectralSummary ilrb_eigenvalues(double pbar, double eps, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const double nn = n;
  const double l1 = 1.0 - 2.0 * (eps + pbar) + std::pow(2.0, nn + 1.0) * pbar * eps;
  const double l2 = 1.0 - (nn + 2.0) * (pbar + eps) + (nn + 1.0) * (nn + 2.0) * std::pow(2.0, nn) * pbar * eps;
  SpectralSummary s;
  s.eigenvalues.push_back(l2);
  s.bounds.push_back({l2, l2});
  for (int k = 1; k < n; ++k) {
    s.eigenvalues.push_back(l1);
    s.bounds.push_back({l1, l1});
  }
  s.eigenvalues.push_back(1.0);
  s.bounds.push_back({1.0, 1.0});
  detail::sort_summary(s);
  return s;
}

// Uniform rates with qbar = ratio * pbar: 1 - lambda = 2 qbar + n pbar.
inline LeakageRates corollary1_estimates(double lambda, int n, double ratio = 1.0) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0 + 1e-6)) throw std::invalid_argument("lambda must lie in (0, 1]");
  const double nn = n;
  const double pbar = (1.0 - lambda) / (2.0 * ratio + nn);
  const double dl = static_cast<double>(ipow(3, n) - ipow(2, n));
  return {nn * pbar, nn * std::pow(2.0, nn) * ratio * pbar / dl};
}

struct CrosstalkFreeRates {
  LeakageRates rates;
  std::vector<double> site_exponents;
};

// Independent per-site channels with leak p_k and seep q_k.
inline CrosstalkFreeRates crosstalk_free_rates(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.empty() || p.size() != q.size()) throw std::invalid_argument("p and q must be non-empty and of equal length");
  CrosstalkFreeRates out;
  double keep = 1.0;
  double with_seep = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] >= 0.0 && p[k] <= 1.0 && q[k] >= 0.0 && 2.0 * q[k] <= 1.0)) {
      throw std::invalid_argument("site rates out of range");
    }
    keep *= 1.0 - p[k];
    with_seep *= 1.0 - p[k] + q[k];
    out.site_exponents.push_back(1.0 - p[k] - 2.0 * q[k]);
  }
  const int n = static_cast<int>(p.size());
  const double dc = static_cast<double>(ipow(2, n));
  const double dl = static_cast<double>(ipow(3, n)) - dc;
  out.rates = {1.0 - keep, dc / dl * (with_seep - keep)};
  return out;
}

// Q of the two-qubit exchange model over (cc, cl, lc).
inline RMatrix gen3_q(double eps1, double eps2, double eps3) {
  validate(TwoQubitLeakSpec{eps1, eps2, eps3});
  RMatrix m(3, 3);
  m << 1.0 - eps1 / 4.0 - eps2 / 4.0, eps1 / 2.0, eps2 / 2.0,
       eps1 / 4.0, 1.0 - eps1 / 2.0 - eps3 / 2.0, eps3 / 2.0,
       eps2 / 4.0, eps3 / 2.0, 1.0 - eps2 / 2.0 - eps3 / 2.0;
  return m;
}

inline SpectralSummary gen3_eigenvalues(double eps1, double eps2, double eps3) {
  validate(TwoQubitLeakSpec{eps1, eps2, eps3});
  const double centre = 1.0 - 0.375 * (eps1 + eps2) - 0.5 * eps3;
  const double disc = 9.0 * eps1 * eps1 + 9.0 * eps2 * eps2 + 16.0 * eps3 * eps3 - 14.0 * eps1 * eps2 -
                      8.0 * eps1 * eps3 - 8.0 * eps2 * eps3;
  const double half = std::sqrt(std::max(0.0, disc)) / 8.0;
  SpectralSummary s;
  for (double v : {centre - half, centre + half, 1.0}) {
    s.eigenvalues.push_back(v);
    s.bounds.push_back({v, v});
  }
  detail::sort_summary(s);
  return s;
}

inline SpectralSummary cz_eigenvalues(double eps1, double eps2) { return gen3_eigenvalues(eps1, eps2, 0.0); }

// L = (eps1 + eps2)/4, S = (eps1 + eps2)/5; eps3 never crosses Pi_c.
inline LeakageRates two_qubit_rates(double eps1, double eps2, double eps3 = 0.0) {
  validate(TwoQubitLeakSpec{eps1, eps2, eps3});
  return {(eps1 + eps2) / 4.0, (eps1 + eps2) / 5.0};
}

inline LeakageRates iswap_rates_from_lambdas(double lambda, double lambda_p) {
  if (!(lambda_p > 2.0 / 3.0 && lambda_p <= 1.0 + 1e-6)) throw std::invalid_argument("lambda_P must lie in (2/3, 1]");
  const double den = 3.0 * lambda_p - 2.0;
  return {(lambda_p - lambda) / (2.0 * den), 2.0 * (lambda_p - lambda) / (5.0 * den)};
}

// Population moved from |11> to each of |02>, |20> by the double-excitation
// Hamiltonian after time t (g, eta angular frequencies).
inline double hamiltonian_epsilon(double g, double eta, double t) {
  if (!(g > 0.0)) throw std::invalid_argument("coupling g must be positive");
  const double w2 = 16.0 * g * g + eta * eta;
  return 4.0 * g * g / w2 * (1.0 - std::cos(std::sqrt(w2) * t));
}

// Diagonal (|11>, |02>, |20>) after exp(-i H2 t) rho0 exp(i H2 t).
inline std::array<double, 3> h2_evolution_oracle(double g, double eta, double omega, double t,
                                                 double rho11, double rho02, double rho20) {
  if (std::abs(rho02 - rho20) > kNegativeClamp) {
    throw std::invalid_argument("initial |02> and |20> weights must be equal");
  }
  const double s2g = std::sqrt(2.0) * g;
  RMatrix h(3, 3);
  h << 2.0 * omega, s2g, s2g,
       s2g, 2.0 * omega - eta, 0.0,
       s2g, 0.0, 2.0 * omega - eta;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
  const Eigen::VectorXcd phases = (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
  const CMatrix vecs = es.eigenvectors().cast<Complex>();
  const CMatrix u = vecs * phases.asDiagonal() * vecs.adjoint();
  CMatrix rho = CMatrix::Zero(3, 3);
  rho(0, 0) = rho11;
  rho(1, 1) = rho02;
  rho(2, 2) = rho20;
  const CMatrix out = u * rho * u.adjoint();
  return {out(0, 0).real(), out(1, 1).real(), out(2, 2).real()};
}

inline std::array<double, 3> h2_evolution_oracle(double g, double eta, double omega, double t, double rho11,
                                                 double rho_prime) {
  return h2_evolution_oracle(g, eta, omega, t, rho11, rho_prime, rho_prime);
}

// ((1 - 2e) rho11 + 2 e rho', rho'(1 - e) + e rho11, same) with e = hamiltonian_epsilon.
inline std::array<double, 3> h2_closed_form(double g, double eta, double t, double rho11, double rho_prime) {
  const double e = hamiltonian_epsilon(g, eta, t);
  const double side = rho_prime * (1.0 - e) + e * rho11;
  return {(1.0 - 2.0 * e) * rho11 + 2.0 * e * rho_prime, side, side};
}

}  // namespace leakbench

#endif  // LEAKBENCH_THEORY_HPP_
