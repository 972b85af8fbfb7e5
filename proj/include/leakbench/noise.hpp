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

#ifndef LEAKBENCH_NOISE_HPP_
#define LEAKBENCH_NOISE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "leakbench/channel.hpp"
#include "leakbench/linalg.hpp"
#include "leakbench/qspace.hpp"

namespace leakbench {

struct Transition {
  TritString from;
  TritString to;
  double p = 0.0;
};

// Leakage damping noise: each transition k -> k' gets the Kraus operator
// sqrt(p)|k'><k|, and E0 takes up the remaining weight on the diagonal.
struct SingleSiteLeakageSpec {
  int n = 1;
  std::vector<Transition> transitions;

  SingleSiteLeakageSpec& add(std::string_view from, std::string_view to, double p) {
    transitions.push_back({TritString::from_string(from), TritString::from_string(to), p});
    return *this;
  }
};

// Allowed pairs: computational <-> single leak, single leak on the same site,
// and computational <-> computational.
inline bool allowed_transition(const TritString& from, const TritString& to) {
  const bool fc = from.is_computational();
  const bool tc = to.is_computational();
  const int fs = from.single_leak_site();
  const int ts = to.single_leak_site();
  if (fc && tc) return true;
  if (fc && ts >= 0) return true;
  if (fs >= 0 && tc) return true;
  return fs >= 0 && fs == ts;
}

inline void validate(const SingleSiteLeakageSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("noise spec needs n >= 1");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::map<std::size_t, double> out_sum;
  std::map<std::size_t, double> in_sum;
  for (const auto& t : spec.transitions) {
    if (t.from.size() != spec.n || t.to.size() != spec.n) {
      throw std::invalid_argument("transition " + t.from.str() + "->" + t.to.str() +
                                  " does not have n = " + std::to_string(spec.n) + " sites");
    }
    if (!(t.p >= 0.0 && t.p <= 1.0)) {
      throw std::invalid_argument("transition probability out of [0,1] for " + t.from.str() +
                                  "->" + t.to.str());
    }
    if (t.from == t.to) throw std::invalid_argument("transition from a state to itself: " + t.from.str());
    if (!allowed_transition(t.from, t.to)) {
      throw std::invalid_argument("transition " + t.from.str() + "->" + t.to.str() +
                                  " is not a single-site leakage transition");
    }
    if (!seen.insert({t.from.index(), t.to.index()}).second) {
      throw std::invalid_argument("duplicate transition " + t.from.str() + "->" + t.to.str());
    }
    out_sum[t.from.index()] += t.p;
    in_sum[t.to.index()] += t.p;
  }
  for (const auto& [k, s] : out_sum) {
    if (1.0 - s < -kNegativeClamp) {
      throw std::invalid_argument("outgoing probabilities of " + TritString::from_index(k, spec.n).str() +
                                  " exceed 1");
    }
  }
  for (const auto& [k, s] : in_sum) {
    if (1.0 - s < -kNegativeClamp) {
      throw std::invalid_argument("incoming probabilities of " + TritString::from_index(k, spec.n).str() +
                                  " exceed 1");
    }
  }
}

// Kraus list {E0} followed by the transitions in spec order.
inline KrausChannel build_single_site_channel(const SingleSiteLeakageSpec& spec) {
  validate(spec);
  const auto d = static_cast<Eigen::Index>(ipow(3, spec.n));
  std::vector<double> keep(static_cast<std::size_t>(d), 1.0);
  std::vector<CMatrix> ops;
  ops.emplace_back(CMatrix::Zero(d, d));
  for (const auto& t : spec.transitions) {
    keep[t.from.index()] -= t.p;
    if (t.p == 0.0) continue;
    CMatrix e = CMatrix::Zero(d, d);
    e(static_cast<Eigen::Index>(t.to.index()), static_cast<Eigen::Index>(t.from.index())) = std::sqrt(t.p);
    ops.push_back(std::move(e));
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    double v = keep[static_cast<std::size_t>(k)];
    if (v < -kNegativeClamp) throw std::invalid_argument("over-subscribed transition probabilities");
    if (v < 0.0) v = 0.0;
    ops.front()(k, k) = std::sqrt(v);
  }
  return KrausChannel(std::move(ops));
}

// Per-site averaged leak/seep rates of a single-site spec:
// p_i = 2^-n sum over computational k and k' leaked at site i of p_kk',
// q_i the same sum with the direction reversed.
struct SiteRates {
  std::vector<double> p;
  std::vector<double> q;
};

inline SiteRates site_rates(const SingleSiteLeakageSpec& spec) {
  validate(spec);
  SiteRates r{std::vector<double>(static_cast<std::size_t>(spec.n), 0.0),
              std::vector<double>(static_cast<std::size_t>(spec.n), 0.0)};
  const double scale = 1.0 / static_cast<double>(ipow(2, spec.n));
  for (const auto& t : spec.transitions) {
    if (t.from.is_computational() && t.to.single_leak_site() >= 0) {
      r.p[static_cast<std::size_t>(t.to.single_leak_site())] += t.p * scale;
    } else if (t.to.is_computational() && t.from.single_leak_site() >= 0) {
      r.q[static_cast<std::size_t>(t.from.single_leak_site())] += t.p * scale;
    }
  }
  return r;
}

// Two-level exchanges between u0 and each u_i with common probability p.
struct SimplifiedSpec {
  int n = 1;
  double p = 0.0;
  TritString u0;
  std::vector<TritString> u;

  // u0 = 1...1 and u_i = 2 at site i, 0 elsewhere; for n = 2 this is the
  // |11> <-> |20>, |02> exchange of the iSWAP noise model.
  static SimplifiedSpec standard(int n, double p) {
    SimplifiedSpec s;
    s.n = n;
    s.p = p;
    s.u0 = TritString(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1));
    for (int i = 0; i < n; ++i) {
      std::vector<std::uint8_t> d(static_cast<std::size_t>(n), 0);
      d[static_cast<std::size_t>(i)] = 2;
      s.u.emplace_back(std::move(d));
    }
    return s;
  }

  // p / 2^n
  double pbar() const { return p / static_cast<double>(ipow(2, n)); }
};

inline void validate(const SimplifiedSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("noise spec needs n >= 1");
  if (!(spec.p >= 0.0)) throw std::invalid_argument("p must be non-negative");
  if (spec.n * spec.p > 1.0 + kNegativeClamp) throw std::invalid_argument("n*p exceeds 1");
  if (spec.u0.size() != spec.n || !spec.u0.is_computational()) {
    throw std::invalid_argument("u0 must be a computational string of n sites");
  }
  if (static_cast<int>(spec.u.size()) != spec.n) throw std::invalid_argument("need one u_i per site");
  for (int i = 0; i < spec.n; ++i) {
    const auto& ui = spec.u[static_cast<std::size_t>(i)];
    if (ui.size() != spec.n || ui.single_leak_site() != i) {
      throw std::invalid_argument("u_" + std::to_string(i) + " must be leaked exactly at site " +
                                  std::to_string(i));
    }
  }
}

inline SingleSiteLeakageSpec to_single_site_spec(const SimplifiedSpec& spec) {
  validate(spec);
  SingleSiteLeakageSpec out;
  out.n = spec.n;
  for (const auto& ui : spec.u) {
    out.transitions.push_back({spec.u0, ui, spec.p});
    out.transitions.push_back({ui, spec.u0, spec.p});
  }
  return out;
}

// Kraus list {E0, E_01, E_10, E_02, E_20, ...}.
inline KrausChannel build_simplified_channel(const SimplifiedSpec& spec) {
  validate(spec);
  const auto d = static_cast<Eigen::Index>(ipow(3, spec.n));
  const auto u0 = static_cast<Eigen::Index>(spec.u0.index());
  std::vector<CMatrix> ops;
  CMatrix e0 = CMatrix::Identity(d, d);
  e0(u0, u0) = std::sqrt(std::max(0.0, 1.0 - spec.n * spec.p));
  for (const auto& ui : spec.u) {
    const auto k = static_cast<Eigen::Index>(ui.index());
    e0(k, k) = std::sqrt(1.0 - spec.p);
  }
  ops.push_back(std::move(e0));
  if (spec.p == 0.0) return KrausChannel(std::move(ops));
  for (const auto& ui : spec.u) {
    const auto k = static_cast<Eigen::Index>(ui.index());
    CMatrix up = CMatrix::Zero(d, d);
    up(k, u0) = std::sqrt(spec.p);
    CMatrix down = CMatrix::Zero(d, d);
    down(u0, k) = std::sqrt(spec.p);
    ops.push_back(std::move(up));
    ops.push_back(std::move(down));
  }
  return KrausChannel(std::move(ops));
}

// Two-qubit exchange model: |11> <-> |02> (eps1), |11> <-> |20> (eps2),
// |12> <-> |21> (eps3).
struct TwoQubitLeakSpec {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps3 = 0.0;
};

inline void validate(const TwoQubitLeakSpec& s) {
  for (double e : {s.eps1, s.eps2, s.eps3}) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("two-qubit leak probability out of [0,1]");
  }
  if (s.eps1 + s.eps2 > 1.0 + kNegativeClamp) {
    throw std::invalid_argument("eps1 + eps2 exceeds 1 on |11>");
  }
}

inline KrausChannel build_two_qubit_channel(const TwoQubitLeakSpec& s) {
  validate(s);
  constexpr Eigen::Index k02 = 2, k11 = 4, k12 = 5, k20 = 6, k21 = 7;
  CMatrix e0 = CMatrix::Identity(9, 9);
  e0(k02, k02) = std::sqrt(1.0 - s.eps1);
  e0(k11, k11) = std::sqrt(std::max(0.0, 1.0 - s.eps1 - s.eps2));
  e0(k20, k20) = std::sqrt(1.0 - s.eps2);
  e0(k12, k12) = std::sqrt(1.0 - s.eps3);
  e0(k21, k21) = std::sqrt(1.0 - s.eps3);
  std::vector<CMatrix> ops{e0};
  auto jump = [&](Eigen::Index from, Eigen::Index to, double p) {
    if (p == 0.0) return;
    CMatrix e = CMatrix::Zero(9, 9);
    e(to, from) = std::sqrt(p);
    ops.push_back(std::move(e));
  };
  jump(k02, k11, s.eps1);
  jump(k11, k02, s.eps1);
  jump(k20, k11, s.eps2);
  jump(k11, k20, s.eps2);
  jump(k12, k21, s.eps3);
  jump(k21, k12, s.eps3);
  return KrausChannel(std::move(ops));
}

// iSWAP noise: eps1 = eps2 = eps.
inline KrausChannel iswap_noise(double eps) { return build_two_qubit_channel({eps, eps, 0.0}); }

struct CptpReport {
  double deviation = 0.0;
  bool pass = false;
};

inline CptpReport validate_cptp(const KrausChannel& channel) {
  const auto d = static_cast<Eigen::Index>(channel.dim());
  CptpReport r;
  r.deviation = max_abs_diff(channel.completeness(), CMatrix::Identity(d, d));
  r.pass = r.deviation <= kCheckTol;
  return r;
}

struct LeakageRates {
  double leakage = 0.0;
  double seepage = 0.0;
};

// L = tr(Pi_l Lambda(Pi_c / 2^n)), S = tr(Pi_c Lambda(Pi_l / (3^n - 2^n))).
inline LeakageRates direct_rates(const KrausChannel& channel) {
  const int n = channel.sites();
  const double dc = static_cast<double>(ipow(2, n));
  const double dl = static_cast<double>(ipow(3, n)) - dc;
  const CMatrix pc = computational_projector(n);
  const CMatrix pl = leakage_projector(n);
  LeakageRates r;
  r.leakage = (pl * channel.apply(pc / dc)).trace().real();
  r.seepage = (pc * channel.apply(pl / dl)).trace().real();
  return r;
}

// Leak/seep exchange f_i <-> g_i with raw probabilities p_i, q_i. Positions
// count from the right: g_i has its 2 at position i, f_i has 1s at positions
// i and i-1, and f_1 = f_2 = 0...011.
inline SingleSiteLeakageSpec example1_spec(const std::vector<double>& p, const std::vector<double>& q) {
  const int n = static_cast<int>(p.size());
  if (n < 2 || q.size() != p.size()) throw std::invalid_argument("example 1 needs n >= 2 and |p| = |q|");
  SingleSiteLeakageSpec spec;
  spec.n = n;
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint8_t> f(static_cast<std::size_t>(n), 0);
    std::vector<std::uint8_t> g(static_cast<std::size_t>(n), 0);
    const int hi = std::max(i, 2);
    f[static_cast<std::size_t>(n - hi)] = 1;
    f[static_cast<std::size_t>(n - hi + 1)] = 1;
    g[static_cast<std::size_t>(n - i)] = 2;
    spec.transitions.push_back({TritString(f), TritString(g), p[static_cast<std::size_t>(i - 1)]});
    spec.transitions.push_back({TritString(g), TritString(f), q[static_cast<std::size_t>(i - 1)]});
  }
  return spec;
}

struct IdentityNoise {};

// Independent single-site channels, one per site (each with n = 1).
struct CrosstalkFreeSpec {
  std::vector<SingleSiteLeakageSpec> sites;
};

inline KrausChannel build_crosstalk_free_channel(const CrosstalkFreeSpec& spec) {
  if (spec.sites.empty()) throw std::invalid_argument("cross-talk-free spec needs at least one site");
  for (const auto& s : spec.sites) {
    if (s.n != 1) throw std::invalid_argument("cross-talk-free site specs must have n = 1");
  }
  KrausChannel out = build_single_site_channel(spec.sites.front());
  for (std::size_t k = 1; k < spec.sites.size(); ++k) out = tensor(out, build_single_site_channel(spec.sites[k]));
  return out;
}

using NoiseSpec = std::variant<IdentityNoise, SingleSiteLeakageSpec, SimplifiedSpec, TwoQubitLeakSpec, CrosstalkFreeSpec>;

inline KrausChannel build_noise(const NoiseSpec& spec, int n) {
  struct Visitor {
    int n;
    KrausChannel operator()(const IdentityNoise&) const { return KrausChannel::identity(n); }
    KrausChannel operator()(const SingleSiteLeakageSpec& s) const {
      if (s.n != n) throw std::invalid_argument("noise spec site count does not match register");
      return build_single_site_channel(s);
    }
    KrausChannel operator()(const SimplifiedSpec& s) const {
      if (s.n != n) throw std::invalid_argument("noise spec site count does not match register");
      return build_simplified_channel(s);
    }
    KrausChannel operator()(const TwoQubitLeakSpec& s) const {
      if (n != 2) throw std::invalid_argument("two-qubit noise needs n = 2");
      return build_two_qubit_channel(s);
    }
    KrausChannel operator()(const CrosstalkFreeSpec& s) const {
      if (static_cast<int>(s.sites.size()) != n) {
        throw std::invalid_argument("cross-talk-free spec needs one channel per site");
      }
      return build_crosstalk_free_channel(s);
    }
  };
  return std::visit(Visitor{n}, spec);
}

}  // namespace leakbench

#endif  // LEAKBENCH_NOISE_HPP_
