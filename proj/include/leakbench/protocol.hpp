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

#ifndef LEAKBENCH_PROTOCOL_HPP_
#define LEAKBENCH_PROTOCOL_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "leakbench/channel.hpp"
#include "leakbench/gates.hpp"
#include "leakbench/linalg.hpp"
#include "leakbench/noise.hpp"
#include "leakbench/pauli.hpp"
#include "leakbench/qspace.hpp"
#include "leakbench/rng.hpp"
#include "leakbench/spam.hpp"

namespace leakbench {

enum class Mode { kLrb, kIlrb };
enum class Sequence { kReference, kInterleaved };

struct ExperimentConfig {
  int n = 1;
  std::vector<std::uint64_t> lengths;
  std::uint64_t circuits_per_length = 1;
  std::optional<std::uint64_t> shots;  // unset: exact expectation per circuit
  std::uint64_t seed = 0;
  Mode mode = Mode::kLrb;
  std::string target;  // ilrb only
  NoiseSpec target_noise = IdentityNoise{};
  NoiseSpec pauli_noise = IdentityNoise{};
  PrepSpec prep;
  std::vector<MeasConfusion> confusions;  // empty: ideal readout
  bool reuse_prefixes = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline void validate(const ExperimentConfig& c) {
  if (c.n < 1 || c.n > 8) throw std::invalid_argument("n must lie in [1, 8]");
  if (c.lengths.empty()) throw std::invalid_argument("no sequence lengths given");
  for (std::size_t i = 0; i < c.lengths.size(); ++i) {
    if (c.lengths[i] < 1) throw std::invalid_argument("sequence lengths must be >= 1");
    if (i > 0 && c.lengths[i] <= c.lengths[i - 1]) {
      throw std::invalid_argument("sequence lengths must be strictly increasing");
    }
  }
  if (c.circuits_per_length < 1) throw std::invalid_argument("circuits_per_length must be >= 1");
  if (c.shots && *c.shots < 1) throw std::invalid_argument("shots must be >= 1");
  if (c.mode == Mode::kIlrb && c.target.empty()) throw std::invalid_argument("ilrb needs a target gate");
  if (!c.confusions.empty() && static_cast<int>(c.confusions.size()) != c.n) {
    throw std::invalid_argument("need one confusion matrix per site");
  }
  for (const auto& m : c.confusions) MeasConfusion::validate(m);
  validate(c.prep);
  build_noise(c.pauli_noise, c.n);
  if (c.mode == Mode::kIlrb) {
    gate_from_name(c.target, c.n);
    build_noise(c.target_noise, c.n);
  }
}

inline std::vector<MeasConfusion> effective_confusions(const ExperimentConfig& c) {
  return c.confusions.empty() ? std::vector<MeasConfusion>(static_cast<std::size_t>(c.n)) : c.confusions;
}

// Channel of one step before the random Pauli: Lambda_P for the reference
// sequence, Lambda_P o T o Lambda_T for the interleaved one.
inline KrausChannel step_channel(const ExperimentConfig& c, Sequence kind) {
  KrausChannel pauli_noise = build_noise(c.pauli_noise, c.n);
  if (kind == Sequence::kReference) return pauli_noise;
  const GateChannel gate = gate_from_name(c.target, c.n);
  const KrausChannel target = noisy_gate(gate, build_noise(c.target_noise, c.n), NoiseSide::kRight);
  return compose(pauli_noise, target);
}

struct SurvivalPoint {
  std::uint64_t m = 0;
  double p = 0.0;
  double std_err = 0.0;
  std::uint64_t circuits = 0;
  std::uint64_t shots = 0;  // 0: exact expectation
};

struct SurvivalDataset {
  std::vector<SurvivalPoint> points;
  std::string label;  // "lrb", "interleaved" or "reference"
  std::string config_hash;
};

struct IlrbResult {
  SurvivalDataset interleaved;
  SurvivalDataset reference;
};

// m labels, each uniform over the 4^n unsigned Paulis.
inline std::vector<PauliLabel> sample_pauli_sequence(Rng& rng, std::uint64_t m, int n) {
  if (m < 1) throw std::invalid_argument("sequence length must be >= 1");
  std::vector<PauliLabel> seq;
  seq.reserve(m);
  for (std::uint64_t k = 0; k < m; ++k) seq.push_back(PauliLabel::from_index(rng.pauli_index(n), n));
  return seq;
}

// Roughly log-spaced distinct integers from 1 to m_max.
inline std::vector<std::uint64_t> geometric_lengths(std::uint64_t m_max, std::size_t count) {
  if (m_max < 1 || count < 1) throw std::invalid_argument("need m_max >= 1 and count >= 1");
  if (count == 1) return {m_max};
  std::vector<std::uint64_t> out;
  const double ratio = std::log(static_cast<double>(m_max)) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    auto v = static_cast<std::uint64_t>(std::llround(std::exp(ratio * static_cast<double>(k))));
    v = std::clamp<std::uint64_t>(v, 1, m_max);
    if (!out.empty() && v <= out.back()) v = out.back() + 1;
    if (v > m_max) break;
    out.push_back(v);
  }
  out.back() = m_max;
  return out;
}

// 12 lengths up to 3/(1 - lambda) when a theory exponent is known, else up to 1e5.
inline std::vector<std::uint64_t> default_lengths(std::optional<double> lambda_theory = std::nullopt) {
  std::uint64_t top = 100000;
  if (lambda_theory && *lambda_theory < 1.0) {
    top = static_cast<std::uint64_t>(std::ceil(3.0 / (1.0 - *lambda_theory)));
    top = std::max<std::uint64_t>(top, 12);
  }
  return geometric_lengths(top, 12);
}

namespace detail {

// Runs f(i) for i in [0, count) on up to `threads` workers.
template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

// Embedded Pauli permutations and phases, cached when small.
class PauliTable {
 public:
  explicit PauliTable(int n) : n_(n) {
    if (ipow(4, n) * ipow(3, n) <= (1u << 22)) {
      for (std::uint64_t k = 0; k < ipow(4, n); ++k) table_.push_back(pauli_action(PauliLabel::from_index(k, n)));
    }
  }
  MonomialAction get(std::uint64_t index) const {
    if (!table_.empty()) return table_[index];
    return pauli_action(PauliLabel::from_index(index, n_));
  }
  const MonomialAction* cached(std::uint64_t index) const {
    return table_.empty() ? nullptr : &table_[index];
  }

 private:
  int n_;
  std::vector<MonomialAction> table_;
};

// Sparse row storage of a column-stochastic transition matrix.
struct SparseTransitions {
  std::vector<std::uint32_t> row_start;
  std::vector<std::uint32_t> col;
  std::vector<double> weight;
};

// T_ab = sum_E |E_ab|^2 for a channel whose Kraus operators are row-monomial.
inline RMatrix transition_matrix(const KrausChannel& ch) {
  const auto d = static_cast<Eigen::Index>(ch.dim());
  RMatrix t = RMatrix::Zero(d, d);
  for (const auto& e : ch.ops()) t += e.cwiseAbs2();
  return t;
}

inline SparseTransitions sparsify(const RMatrix& t) {
  SparseTransitions s;
  s.row_start.push_back(0);
  for (Eigen::Index a = 0; a < t.rows(); ++a) {
    for (Eigen::Index b = 0; b < t.cols(); ++b) {
      if (t(a, b) != 0.0) {
        s.col.push_back(static_cast<std::uint32_t>(b));
        s.weight.push_back(t(a, b));
      }
    }
    s.row_start.push_back(static_cast<std::uint32_t>(s.col.size()));
  }
  return s;
}

struct SparseKraus {
  struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    Complex value;
  };
  std::vector<std::vector<Entry>> ops;
};

inline SparseKraus sparsify(const KrausChannel& ch) {
  SparseKraus s;
  for (const auto& e : ch.ops()) {
    std::vector<SparseKraus::Entry> entries;
    for (Eigen::Index c = 0; c < e.cols(); ++c) {
      for (Eigen::Index r = 0; r < e.rows(); ++r) {
        if (e(r, c) != Complex(0.0, 0.0)) {
          entries.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c), e(r, c)});
        }
      }
    }
    s.ops.push_back(std::move(entries));
  }
  return s;
}

}  // namespace detail

// Evolves single circuits of one sequence kind. Uses the diagonal Markov
// representation when every operator is row-monomial, else the full density
// matrix.
class CircuitSimulator {
 public:
  CircuitSimulator(const ExperimentConfig& c, Sequence kind)
      : n_(c.n), d_(ipow(3, c.n)), paulis_(c.n) {
    const KrausChannel step = step_channel(c, kind);
    classical_ = step.row_monomial();
    init_ = initial_populations(c.prep, c.n);
    effect_ = effect_diagonal(effective_confusions(c));
    if (classical_) {
      transitions_ = detail::sparsify(detail::transition_matrix(step));
    } else {
      kraus_ = detail::sparsify(step);
    }
  }

  bool classical() const { return classical_; }
  std::size_t dim() const { return d_; }

  class State {
   public:
    std::vector<double> pop;
    CMatrix rho;
  };

  State initial() const {
    State s;
    if (classical_) {
      s.pop = init_;
    } else {
      s.rho = CMatrix::Zero(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_));
      for (std::size_t a = 0; a < d_; ++a) s.rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = init_[a];
    }
    return s;
  }

  // One noisy step followed by the Pauli with the given index.
  void step(State& s, std::uint64_t pauli_index, std::vector<double>& scratch) const {
    const MonomialAction* cached = paulis_.cached(pauli_index);
    MonomialAction local;
    if (!cached) {
      local = paulis_.get(pauli_index);
      cached = &local;
    }
    if (classical_) {
      scratch.resize(d_);
      const auto& t = transitions_;
      for (std::size_t a = 0; a < d_; ++a) {
        double acc = 0.0;
        for (std::uint32_t k = t.row_start[a]; k < t.row_start[a + 1]; ++k) acc += t.weight[k] * s.pop[t.col[k]];
        scratch[cached->target[a]] = acc;
      }
      s.pop.swap(scratch);
      return;
    }
    apply_kraus(s.rho);
    apply_monomial(s.rho, *cached);
  }

  double survival(const State& s) const {
    double acc = 0.0;
    for (std::size_t a = 0; a < d_; ++a) acc += effect_[a] * population(s, a);
    return acc;
  }

  double population(const State& s, std::size_t a) const {
    return classical_ ? s.pop[a] : s.rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
  }

 private:
  void apply_kraus(CMatrix& rho) const {
    const auto d = static_cast<Eigen::Index>(d_);
    CMatrix out = CMatrix::Zero(d, d);
    CMatrix er(d, d);
    for (const auto& op : kraus_.ops) {
      er.setZero();
      for (const auto& e : op) er.row(e.row) += e.value * rho.row(e.col);
      for (const auto& e : op) out.col(e.row) += std::conj(e.value) * er.col(e.col);
    }
    rho.swap(out);
  }

  void apply_monomial(CMatrix& rho, const MonomialAction& act) const {
    const auto d = static_cast<Eigen::Index>(d_);
    CMatrix out(d, d);
    for (Eigen::Index b = 0; b < d; ++b) {
      const Complex pb = std::conj(act.phase[static_cast<std::size_t>(b)]);
      const auto tb = static_cast<Eigen::Index>(act.target[static_cast<std::size_t>(b)]);
      for (Eigen::Index a = 0; a < d; ++a) {
        out(act.target[static_cast<std::size_t>(a)], tb) = act.phase[static_cast<std::size_t>(a)] * rho(a, b) * pb;
      }
    }
    rho.swap(out);
  }

  int n_;
  std::size_t d_;
  bool classical_ = false;
  std::vector<double> init_;
  std::vector<double> effect_;
  detail::PauliTable paulis_;
  detail::SparseTransitions transitions_;
  detail::SparseKraus kraus_;
};

namespace detail {

inline constexpr std::uint64_t kSequenceStream = 1;
inline constexpr std::uint64_t kShotStream = 2;

// Fraction of shots whose recorded trits all lie in {0,1}.
inline double sample_shots(const CircuitSimulator& sim, const CircuitSimulator::State& s,
                           const std::vector<MeasConfusion>& confusions, std::uint64_t shots, Rng& rng) {
  const std::size_t d = sim.dim();
  const int n = static_cast<int>(confusions.size());
  std::vector<double> cdf(d);
  double total = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    total += std::max(0.0, sim.population(s, a));
    cdf[a] = total;
  }
  std::uint64_t good = 0;
  for (std::uint64_t k = 0; k < shots; ++k) {
    const double u = rng.uniform() * total;
    std::size_t a = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (a >= d) a = d - 1;
    bool ok = true;
    std::size_t rest = a;
    for (int site = n - 1; site >= 0; --site) {
      const auto level = static_cast<Eigen::Index>(rest % 3);
      rest /= 3;
      const auto& m = confusions[static_cast<std::size_t>(site)].m;
      const double v = rng.uniform();
      // recorded 0, 1 or 2 drawn from column `level`
      if (v >= m(0, level) + m(1, level)) ok = false;
    }
    good += ok;
  }
  return static_cast<double>(good) / static_cast<double>(shots);
}

inline SurvivalPoint summarize(std::uint64_t m, const std::vector<double>& values, std::optional<std::uint64_t> shots) {
  SurvivalPoint pt;
  pt.m = m;
  pt.circuits = values.size();
  pt.shots = shots.value_or(0);
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  if (values.size() > 1) {
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size() - 1);
    pt.std_err = std::sqrt(var / static_cast<double>(values.size()));
  } else if (shots) {
    pt.std_err = std::sqrt(std::max(0.0, mean * (1.0 - mean)) / static_cast<double>(*shots));
  }
  pt.p = std::clamp(mean, 0.0, 1.0);
  return pt;
}

// Survival of every circuit, row-major by length: values[mi * circuits + circuit].
inline std::vector<double> circuit_values(const ExperimentConfig& c, Sequence kind) {
  validate(c);
  const CircuitSimulator sim(c, kind);
  const auto confusions = effective_confusions(c);
  const std::size_t nm = c.lengths.size();
  const std::uint64_t nc = c.circuits_per_length;
  const std::uint64_t kind_tag = kind == Sequence::kReference ? 0 : 1;
  std::vector<double> values(nm * nc, 0.0);

  auto shot_value = [&](const CircuitSimulator::State& s, std::uint64_t m, std::uint64_t circuit) {
    if (!c.shots) return sim.survival(s);
    Rng rng(c.seed, {kShotStream, kind_tag, m, circuit});
    return sample_shots(sim, s, confusions, *c.shots, rng);
  };

  if (c.reuse_prefixes) {
    parallel_for(nc, c.threads, [&](std::size_t circuit) {
      Rng rng(c.seed, {kSequenceStream, kind_tag, 0, circuit});
      auto state = sim.initial();
      std::vector<double> scratch;
      std::uint64_t done = 0;
      for (std::size_t mi = 0; mi < nm; ++mi) {
        for (; done < c.lengths[mi]; ++done) sim.step(state, rng.pauli_index(c.n), scratch);
        values[mi * nc + circuit] = shot_value(state, c.lengths[mi], circuit);
      }
    });
  } else {
    parallel_for(nm * nc, c.threads, [&](std::size_t item) {
      const std::size_t mi = item / nc;
      const std::uint64_t circuit = item % nc;
      const std::uint64_t m = c.lengths[mi];
      Rng rng(c.seed, {kSequenceStream, kind_tag, m, circuit});
      auto state = sim.initial();
      std::vector<double> scratch;
      for (std::uint64_t k = 0; k < m; ++k) sim.step(state, rng.pauli_index(c.n), scratch);
      values[item] = shot_value(state, m, circuit);
    });
  }

  return values;
}

inline SurvivalDataset run_sequences(const ExperimentConfig& c, Sequence kind, std::string label) {
  const std::vector<double> values = circuit_values(c, kind);
  const std::size_t nm = c.lengths.size();
  const std::uint64_t nc = c.circuits_per_length;
  SurvivalDataset ds;
  ds.label = std::move(label);
  for (std::size_t mi = 0; mi < nm; ++mi) {
    std::vector<double> v(values.begin() + static_cast<std::ptrdiff_t>(mi * nc),
                          values.begin() + static_cast<std::ptrdiff_t>((mi + 1) * nc));
    ds.points.push_back(summarize(c.lengths[mi], v, c.shots));
  }
  return ds;
}

}  // namespace detail

inline std::vector<double> run_circuits(const ExperimentConfig& c, Sequence kind) {
  return detail::circuit_values(c, kind);
}

inline SurvivalDataset run_lrb(const ExperimentConfig& c) {
  if (c.mode != Mode::kLrb) throw std::invalid_argument("run_lrb needs mode lrb");
  return detail::run_sequences(c, Sequence::kReference, "lrb");
}

inline SurvivalDataset run_reference(const ExperimentConfig& c) {
  return detail::run_sequences(c, Sequence::kReference, "reference");
}

inline IlrbResult run_ilrb(const ExperimentConfig& c) {
  if (c.mode != Mode::kIlrb) throw std::invalid_argument("run_ilrb needs mode ilrb");
  IlrbResult r;
  r.interleaved = detail::run_sequences(c, Sequence::kInterleaved, "interleaved");
  r.reference = detail::run_sequences(c, Sequence::kReference, "reference");
  return r;
}

// p(m) = <<effect| Q^{m-1} |step(rho0)>> with Q the condensed step channel.
inline SurvivalDataset exact_survival_curve(const ExperimentConfig& c, Sequence kind = Sequence::kReference) {
  validate(c);
  const KrausChannel step = step_channel(c, kind);
  const CondensedQ q = condensed_rep(step);
  const RVector alpha = bra_coordinates(computational_effect(effective_confusions(c)));
  RVector v = ket_coordinates(step.apply(noisy_initial_state(c.prep, c.n)));
  SurvivalDataset ds;
  ds.label = kind == Sequence::kReference ? (c.mode == Mode::kLrb ? "lrb" : "reference") : "interleaved";
  std::uint64_t power = 0;
  for (std::uint64_t m : c.lengths) {
    for (; power < m - 1; ++power) v = q.entries() * v;
    SurvivalPoint pt;
    pt.m = m;
    pt.p = alpha.dot(v);
    pt.circuits = 0;
    ds.points.push_back(pt);
  }
  return ds;
}

}  // namespace leakbench

#endif  // LEAKBENCH_PROTOCOL_HPP_
