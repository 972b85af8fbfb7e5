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

#ifndef LEAKBENCH_FIT_HPP_
#define LEAKBENCH_FIT_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "leakbench/linalg.hpp"
#include "leakbench/noise.hpp"
#include "leakbench/protocol.hpp"
#include "leakbench/theory.hpp"

namespace leakbench {

// p(m) = offset + sum_k amplitudes[k] * exponents[k]^m. Covariance is over
// (offset, amplitudes..., exponents...).
struct DecayFit {
  int order = 1;
  double offset = 0.0;
  std::vector<double> amplitudes;
  std::vector<double> exponents;
  RMatrix covariance;
  double residual_rms = 0.0;
  bool converged = false;
  bool identifiable = true;
  int iterations = 0;

  double predict(double m) const {
    double v = offset;
    for (std::size_t k = 0; k < exponents.size(); ++k) v += amplitudes[k] * std::exp(m * std::log(exponents[k]));
    return v;
  }

  double stderr_of(Eigen::Index param) const {
    const double v = covariance(param, param);
    return v > 0.0 ? std::sqrt(v) : 0.0;
  }
  double offset_stderr() const { return stderr_of(0); }
  double amplitude_stderr(std::size_t k) const { return stderr_of(1 + static_cast<Eigen::Index>(k)); }
  double exponent_stderr(std::size_t k) const { return stderr_of(1 + order + static_cast<Eigen::Index>(k)); }
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, DecayFit best) : std::runtime_error(what), best_(std::move(best)) {}
  const DecayFit& best() const { return best_; }

 private:
  DecayFit best_;
};

namespace detail {

inline constexpr int kMaxIterations = 200;
inline constexpr double kLambdaMax = 1.0 + 1e-6;
inline constexpr double kLambdaMin = 1e-12;

struct FitProblem {
  RVector m;
  RVector y;
  RVector w;  // normalized to mean 1
  int order;
  double sigma2 = 0.0;  // absolute variance per unit weight; 0 when unweighted
};

inline double pow_m(double lambda, double m) { return std::exp(m * std::log(lambda)); }

inline RVector residuals(const FitProblem& fp, const RVector& theta) {
  const int k = fp.order;
  RVector r(fp.m.size());
  for (Eigen::Index i = 0; i < fp.m.size(); ++i) {
    double v = theta(0);
    for (int j = 0; j < k; ++j) v += theta(1 + j) * pow_m(theta(1 + k + j), fp.m(i));
    r(i) = std::sqrt(fp.w(i)) * (v - fp.y(i));
  }
  return r;
}

inline RMatrix jacobian(const FitProblem& fp, const RVector& theta) {
  const int k = fp.order;
  RMatrix jac(fp.m.size(), 1 + 2 * k);
  for (Eigen::Index i = 0; i < fp.m.size(); ++i) {
    const double sw = std::sqrt(fp.w(i));
    jac(i, 0) = sw;
    for (int j = 0; j < k; ++j) {
      const double lam = theta(1 + k + j);
      const double pw = pow_m(lam, fp.m(i));
      jac(i, 1 + j) = sw * pw;
      jac(i, 1 + k + j) = sw * theta(1 + j) * fp.m(i) * pw / lam;
    }
  }
  return jac;
}

inline void project(RVector& theta, int k) {
  for (int j = 0; j < k; ++j) theta(1 + k + j) = std::clamp(theta(1 + k + j), kLambdaMin, kLambdaMax);
}

// Weighted linear least squares for (offset, amplitudes) at fixed exponents.
inline std::pair<RVector, double> linear_part(const FitProblem& fp, const std::vector<double>& lambdas) {
  const auto k = static_cast<Eigen::Index>(lambdas.size());
  RMatrix a(fp.m.size(), 1 + k);
  RVector b(fp.m.size());
  for (Eigen::Index i = 0; i < fp.m.size(); ++i) {
    const double sw = std::sqrt(fp.w(i));
    a(i, 0) = sw;
    for (Eigen::Index j = 0; j < k; ++j) a(i, 1 + j) = sw * pow_m(lambdas[static_cast<std::size_t>(j)], fp.m(i));
    b(i) = sw * fp.y(i);
  }
  RVector coef = a.colPivHouseholderQr().solve(b);
  const double cost = (a * coef - b).squaredNorm();
  return {coef, cost};
}

inline RVector pack(const RVector& lin, const std::vector<double>& lambdas) {
  const auto k = static_cast<Eigen::Index>(lambdas.size());
  RVector theta(1 + 2 * k);
  theta.head(1 + k) = lin;
  for (Eigen::Index j = 0; j < k; ++j) theta(1 + k + j) = lambdas[static_cast<std::size_t>(j)];
  return theta;
}

// Exponent grid exp(-r) with decay scales spanning the sampled lengths.
inline std::vector<double> lambda_grid(const FitProblem& fp, int count) {
  const double m_min = std::max(1.0, fp.m.minCoeff());
  const double m_max = std::max(m_min + 1.0, fp.m.maxCoeff());
  const double r_lo = std::log(1e-3 / m_max);
  const double r_hi = std::log(5.0 / m_min);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double r = std::exp(r_lo + (r_hi - r_lo) * i / (count - 1));
    out.push_back(std::exp(-r));
  }
  return out;
}

// Tail-mean offset and log-linear slope seed.
inline std::optional<double> loglinear_seed(const FitProblem& fp, const RVector& se) {
  const Eigen::Index n = fp.m.size();
  const Eigen::Index tail = std::max<Eigen::Index>(1, n / 5);
  const double a0 = fp.y.tail(tail).mean();
  std::vector<double> xs;
  std::vector<double> ys;
  const double scale = fp.y.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n - tail; ++i) {
    const double d = fp.y(i) - a0;
    const double thr = se(i) > 0.0 ? 3.0 * se(i) : 1e-12 * scale;
    if (std::abs(d) > thr) {
      xs.push_back(fp.m(i));
      ys.push_back(std::log(std::abs(d)));
    }
  }
  if (xs.size() < 2) return std::nullopt;
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx <= 0.0) return std::nullopt;
  const double lam = std::exp(sxy / sxx);
  if (!(lam > kLambdaMin && lam <= kLambdaMax)) return std::nullopt;
  return lam;
}

struct LmResult {
  RVector theta;
  double cost = 0.0;
  bool converged = false;
  int iterations = 0;
};

inline LmResult levenberg_marquardt(const FitProblem& fp, RVector theta) {
  const int k = fp.order;
  const auto np = theta.size();
  project(theta, k);
  RVector r = residuals(fp, theta);
  double cost = r.squaredNorm();
  const double floor = 1e-30 * std::max(1.0, fp.y.squaredNorm());
  double mu = 1e-3;
  RVector diag = RVector::Zero(np);
  LmResult res;
  for (int it = 1; it <= kMaxIterations; ++it) {
    res.iterations = it;
    if (cost <= floor) {
      res.converged = true;
      break;
    }
    const RMatrix jac = jacobian(fp, theta);
    for (Eigen::Index j = 0; j < np; ++j) diag(j) = std::max(diag(j), jac.col(j).norm());
    bool accepted = false;
    while (!accepted) {
      RMatrix aug(jac.rows() + np, np);
      RVector rhs(jac.rows() + np);
      aug.topRows(jac.rows()) = jac;
      aug.bottomRows(np) = (std::sqrt(mu) * diag.cwiseMax(1e-300)).asDiagonal();
      rhs.head(jac.rows()) = -r;
      rhs.tail(np).setZero();
      const RVector delta = aug.colPivHouseholderQr().solve(rhs);
      RVector trial = theta + delta;
      project(trial, k);
      const RVector rt = residuals(fp, trial);
      const double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct < cost) {
        const RVector step = trial - theta;
        double rel = 0.0;
        for (Eigen::Index j = 0; j < np; ++j) rel = std::max(rel, std::abs(step(j)) / (std::abs(theta(j)) + 1e-300));
        const double drop = (cost - ct) / cost;
        theta = trial;
        r = rt;
        cost = ct;
        mu = std::max(mu * 0.3, 1e-15);
        accepted = true;
        if (rel <= 1e-12 || drop <= 1e-15) res.converged = true;
      } else {
        mu *= 4.0;
        if (mu > 1e20) {
          // No descent direction left above rounding: stationary point.
          res.converged = true;
          break;
        }
      }
    }
    if (res.converged) break;
  }
  res.theta = theta;
  res.cost = cost;
  return res;
}

inline FitProblem make_problem(const std::vector<SurvivalPoint>& pts, int order, RVector& se) {
  if (order != 1 && order != 2) throw std::invalid_argument("fit order must be 1 or 2");
  const auto n = static_cast<Eigen::Index>(pts.size());
  std::vector<std::uint64_t> ms;
  for (const auto& p : pts) ms.push_back(p.m);
  std::sort(ms.begin(), ms.end());
  if (std::unique(ms.begin(), ms.end()) != ms.end()) throw std::invalid_argument("duplicate sequence lengths");
  if (n < 1 + 2 * order) {
    throw std::invalid_argument("order " + std::to_string(order) + " fit needs at least " +
                                std::to_string(1 + 2 * order) + " points");
  }
  FitProblem fp;
  fp.order = order;
  fp.m.resize(n);
  fp.y.resize(n);
  fp.w.resize(n);
  se.resize(n);
  bool weighted = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    if (!std::isfinite(p.p)) throw std::invalid_argument("non-finite survival value");
    fp.m(i) = static_cast<double>(p.m);
    fp.y(i) = p.p;
    se(i) = p.std_err;
    // spreads at rounding level (identical circuits) carry no weight information
    if (!(p.std_err > 1e-12 * std::max(std::abs(p.p), 1e-3))) weighted = false;
  }
  for (Eigen::Index i = 0; i < n; ++i) fp.w(i) = weighted ? 1.0 / (se(i) * se(i)) : 1.0;
  if (weighted) fp.sigma2 = 1.0 / fp.w.mean();
  fp.w /= fp.w.mean();
  return fp;
}

inline DecayFit finish(const FitProblem& fp, const LmResult& lm) {
  const int k = fp.order;
  const auto np = static_cast<Eigen::Index>(1 + 2 * k);
  const auto n = fp.m.size();
  DecayFit fit;
  fit.order = k;
  fit.converged = lm.converged;
  fit.iterations = lm.iterations;
  fit.residual_rms = std::sqrt(lm.cost / static_cast<double>(n));

  // Covariance from the column-scaled Gauss-Newton matrix.
  const RMatrix jac = jacobian(fp, lm.theta);
  RVector scale(np);
  for (Eigen::Index j = 0; j < np; ++j) {
    const double c = jac.col(j).norm();
    scale(j) = c > 0.0 ? 1.0 / c : 0.0;
  }
  const RMatrix js = jac * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(js.transpose() * js);
  const RVector ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 1e-300);
  RMatrix pinv = RMatrix::Zero(np, np);
  int rank = 0;
  for (Eigen::Index j = 0; j < np; ++j) {
    if (ev(j) > 1e-14 * top) {
      pinv += es.eigenvectors().col(j) * es.eigenvectors().col(j).transpose() / ev(j);
      ++rank;
    }
  }
  bool zero_column = (scale.array() == 0.0).any();
  // A term that barely moves across the measured lengths leaves its exponent undetermined.
  const double m_lo = fp.m.minCoeff(), m_hi = fp.m.maxCoeff();
  const double y_scale = std::max(1.0, fp.y.cwiseAbs().maxCoeff());
  bool flat_term = false;
  for (int j = 0; j < k; ++j) {
    const double b = lm.theta(1 + j), lam = lm.theta(1 + k + j);
    const double swing = std::abs(b) * std::abs(std::pow(lam, m_lo) - std::pow(lam, m_hi));
    if (swing < 1e-9 * y_scale) flat_term = true;
  }
  fit.identifiable = rank == np && !zero_column && !flat_term;
  // stderr-weighted data: absolute covariance; otherwise scale by reduced chi^2
  double s2 = fp.sigma2;
  if (s2 == 0.0) s2 = n > np ? lm.cost / static_cast<double>(n - np) : 1.0;
  RMatrix cov = s2 * scale.asDiagonal() * pinv * scale.asDiagonal();

  // Sort exponents ascending.
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return lm.theta(1 + k + a) < lm.theta(1 + k + b); });
  std::vector<Eigen::Index> perm{0};
  for (int j : order) perm.push_back(1 + j);
  for (int j : order) perm.push_back(1 + k + j);
  fit.offset = lm.theta(0);
  for (int j : order) {
    fit.amplitudes.push_back(lm.theta(1 + j));
    fit.exponents.push_back(lm.theta(1 + k + j));
  }
  fit.covariance.resize(np, np);
  for (Eigen::Index a = 0; a < np; ++a) {
    for (Eigen::Index b = 0; b < np; ++b) fit.covariance(a, b) = cov(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
  }
  return fit;
}

}  // namespace detail

// Weighted least squares fit of offset + sum_k B_k lambda_k^m (k = order).
// Weights are 1/std_err^2 when every point has a positive error, else uniform.
// Throws FitError carrying the best fit when iterations run out.
inline DecayFit fit_decay(const std::vector<SurvivalPoint>& pts, int order) {
  RVector se;
  const detail::FitProblem fp = detail::make_problem(pts, order, se);
  std::vector<RVector> starts;

  const auto seed = detail::loglinear_seed(fp, se);
  const auto grid = detail::lambda_grid(fp, order == 1 ? 241 : 61);
  if (order == 1) {
    if (seed) starts.push_back(detail::pack(detail::linear_part(fp, {*seed}).first, {*seed}));
    double best = std::numeric_limits<double>::infinity();
    double best_lam = grid.front();
    for (double lam : grid) {
      const double c = detail::linear_part(fp, {lam}).second;
      if (c < best) {
        best = c;
        best_lam = lam;
      }
    }
    starts.push_back(detail::pack(detail::linear_part(fp, {best_lam}).first, {best_lam}));
  } else {
    const DecayFit first = [&] {
      try {
        return fit_decay(pts, 1);
      } catch (const FitError& e) {
        return e.best();
      }
    }();
    const double l1 = first.exponents.front();
    const std::vector<double> seeded{l1, std::sqrt(l1)};
    starts.push_back(detail::pack(detail::linear_part(fp, seeded).first, seeded));
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_pair{grid[0], grid[1]};
    for (std::size_t a = 0; a < grid.size(); ++a) {
      for (std::size_t b = a + 1; b < grid.size(); ++b) {
        const double c = detail::linear_part(fp, {grid[a], grid[b]}).second;
        if (c < best) {
          best = c;
          best_pair = {grid[a], grid[b]};
        }
      }
    }
    starts.push_back(detail::pack(detail::linear_part(fp, best_pair).first, best_pair));
  }

  detail::LmResult best;
  bool have = false;
  for (const auto& s : starts) {
    const auto lm = detail::levenberg_marquardt(fp, s);
    if (!have || (lm.converged && !best.converged) ||
        (lm.converged == best.converged && lm.cost < best.cost)) {
      best = lm;
      have = true;
    }
  }
  DecayFit fit = detail::finish(fp, best);
  if (!fit.converged) throw FitError("decay fit did not converge in 200 iterations", fit);
  return fit;
}

inline DecayFit fit_decay(const SurvivalDataset& data, int order) { return fit_decay(data.points, order); }

// Order 2 only when it lowers the weighted residual RMS by more than a factor
// of 2 and both amplitudes exceed 3 standard errors.
inline DecayFit select_model(const SurvivalDataset& data) {
  if (data.points.size() < 5) throw std::invalid_argument("model selection needs at least 5 points");
  DecayFit one = fit_decay(data, 1);
  DecayFit two;
  try {
    two = fit_decay(data, 2);
  } catch (const FitError&) {
    return one;
  }
  double scale = 0.0;
  for (const auto& p : data.points) scale = std::max(scale, std::abs(p.p));
  const double floor = 1e-14 * std::max(scale, 1e-300);
  if (!(one.residual_rms > 2.0 * std::max(two.residual_rms, floor))) return one;
  for (std::size_t k = 0; k < two.amplitudes.size(); ++k) {
    const double b = std::abs(two.amplitudes[k]);
    if (!(b > 3.0 * two.amplitude_stderr(k)) || b <= 1e-10 * scale) return one;
  }
  return two;
}

struct Corollary1Model {
  int n = 1;
  double ratio = 1.0;
};
struct IswapModel {
  double lambda_p = 1.0;
  double lambda_p_err = 0.0;
};
struct CzModel {};
struct CrosstalkFreeModel {
  int n = 1;
  double ratio = 1.0;
};
using RateModel = std::variant<Corollary1Model, IswapModel, CzModel, CrosstalkFreeModel>;

struct RateReport {
  double leakage = 0.0;
  double seepage = 0.0;
  double leakage_err = 0.0;
  double seepage_err = 0.0;
  std::string model;
};

inline RateReport rates_from_fit(const DecayFit& fit, const RateModel& model) {
  struct Visitor {
    const DecayFit& fit;
    void need(std::size_t k, const char* name) const {
      if (fit.exponents.size() != k) {
        throw std::invalid_argument(std::string(name) + " model needs " + std::to_string(k) + " fitted exponent(s)");
      }
    }
    RateReport operator()(const Corollary1Model& m) const {
      need(1, "corollary1");
      const double lam = fit.exponents[0];
      const double se = fit.exponent_stderr(0);
      const auto r = corollary1_estimates(lam, m.n, m.ratio);
      // Both rates are linear in 1 - lambda.
      const auto half = corollary1_estimates(0.5, m.n, m.ratio);
      return {r.leakage, r.seepage, 2.0 * half.leakage * se, 2.0 * half.seepage * se, "corollary1"};
    }
    RateReport operator()(const IswapModel& m) const {
      need(1, "iswap");
      const double lam = fit.exponents[0];
      const double se = fit.exponent_stderr(0);
      const auto r = iswap_rates_from_lambdas(lam, m.lambda_p);
      const double den = 3.0 * m.lambda_p - 2.0;
      const double d_lam = -1.0 / (2.0 * den);
      const double d_lp = (3.0 * lam - 2.0) / (2.0 * den * den);
      RateReport out{r.leakage, r.seepage, 0.0, 0.0, "iswap"};
      out.leakage_err = std::hypot(d_lam * se, d_lp * m.lambda_p_err);
      out.seepage_err = 0.8 * out.leakage_err;
      return out;
    }
    RateReport operator()(const CzModel&) const {
      need(2, "cz");
      const double sum = (4.0 / 3.0) * (2.0 - fit.exponents[0] - fit.exponents[1]);
      const auto& c = fit.covariance;
      const Eigen::Index a = 1 + fit.order;
      const double var = c(a, a) + c(a + 1, a + 1) + 2.0 * c(a, a + 1);
      const double se = (4.0 / 3.0) * std::sqrt(std::max(0.0, var));
      return {sum / 4.0, sum / 5.0, se / 4.0, se / 5.0, "cz"};
    }
    RateReport operator()(const CrosstalkFreeModel& m) const {
      need(static_cast<std::size_t>(m.n), "crosstalk_free");
      auto eval = [&](const std::vector<double>& lams) {
        std::vector<double> p;
        std::vector<double> q;
        for (double l : lams) {
          p.push_back((1.0 - l) / (1.0 + 2.0 * m.ratio));
          q.push_back(m.ratio * p.back());
        }
        return crosstalk_free_rates(p, q).rates;
      };
      const auto base = eval(fit.exponents);
      RateReport out{base.leakage, base.seepage, 0.0, 0.0, "crosstalk_free"};
      // Delta method with central differences.
      const Eigen::Index k = static_cast<Eigen::Index>(fit.exponents.size());
      RVector gl(k);
      RVector gs(k);
      for (Eigen::Index j = 0; j < k; ++j) {
        const double h = 1e-7;
        auto up = fit.exponents;
        auto dn = fit.exponents;
        up[static_cast<std::size_t>(j)] = std::min(1.0, up[static_cast<std::size_t>(j)] + h);
        dn[static_cast<std::size_t>(j)] -= h;
        const double span = up[static_cast<std::size_t>(j)] - dn[static_cast<std::size_t>(j)];
        const auto ru = eval(up);
        const auto rd = eval(dn);
        gl(j) = (ru.leakage - rd.leakage) / span;
        gs(j) = (ru.seepage - rd.seepage) / span;
      }
      const RMatrix c = fit.covariance.block(1 + fit.order, 1 + fit.order, k, k);
      out.leakage_err = std::sqrt(std::max(0.0, gl.dot(c * gl)));
      out.seepage_err = std::sqrt(std::max(0.0, gs.dot(c * gs)));
      return out;
    }
  };
  return std::visit(Visitor{fit}, model);
}

}  // namespace leakbench

#endif  // LEAKBENCH_FIT_HPP_
