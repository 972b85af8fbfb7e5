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

namespace leakbench {
namespace {

std::vector<SurvivalPoint> synth(const std::vector<std::uint64_t>& ms, double a0, const std::vector<double>& amps,
                                 const std::vector<double>& lams) {
  std::vector<SurvivalPoint> pts;
  for (auto m : ms) {
    SurvivalPoint p;
    p.m = m;
    p.p = a0;
    for (std::size_t k = 0; k < amps.size(); ++k) p.p += amps[k] * std::pow(lams[k], static_cast<double>(m));
    pts.push_back(p);
  }
  return pts;
}

TEST(FitDecay, RecoversSingleExponential) {
  const auto pts = synth(geometric_lengths(10000, 20), 0.5, {0.5}, {0.999});
  const auto f = fit_decay(pts, 1);
  EXPECT_TRUE(f.converged);
  EXPECT_TRUE(f.identifiable);
  EXPECT_NEAR(f.exponents[0], 0.999, 1e-9);
  EXPECT_NEAR(f.amplitudes[0], 0.5, 1e-6);
  EXPECT_NEAR(f.offset, 0.5, 1e-6);
  EXPECT_LT(f.residual_rms, 1e-10);
}

TEST(FitDecay, RecoversTwoExponentials) {
  const auto pts = synth(geometric_lengths(10000, 30), 0.5, {0.1, 0.4}, {0.995, 0.999});
  const auto f = fit_decay(pts, 2);
  ASSERT_EQ(f.exponents.size(), 2u);
  EXPECT_NEAR(f.exponents[0], 0.995, 1e-6);
  EXPECT_NEAR(f.exponents[1], 0.999, 1e-6);
  EXPECT_NEAR(f.amplitudes[0], 0.1, 1e-4);
  EXPECT_NEAR(f.amplitudes[1], 0.4, 1e-4);
}

TEST(FitDecay, ConstantDataIsFlagged) {
  const auto pts = synth(geometric_lengths(1000, 10), 0.8, {}, {});
  DecayFit f;
  try {
    f = fit_decay(pts, 1);
  } catch (const FitError& e) {
    f = e.best();
  }
  EXPECT_NEAR(f.predict(10.0), 0.8, 1e-9);
  EXPECT_LT(std::abs(f.amplitudes[0]) * (1.0 - f.exponents[0]), 1e-9);
  EXPECT_FALSE(f.identifiable);
}

TEST(FitDecay, CovarianceSymmetricPsd) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise(0.0, 1e-3);
  auto pts = synth(geometric_lengths(5000, 15), 0.5, {0.45}, {0.998});
  for (auto& p : pts) {
    p.p += noise(gen);
    p.std_err = 1e-3;
  }
  const auto f = fit_decay(pts, 1);
  EXPECT_LE((f.covariance - f.covariance.transpose()).cwiseAbs().maxCoeff(), 1e-18);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(f.covariance);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-18);
  EXPECT_NEAR(f.exponents[0], 0.998, 5 * f.exponent_stderr(0));
  EXPECT_GT(f.exponent_stderr(0), 0.0);
  for (const auto& p : pts) {
    EXPECT_GE(f.predict(static_cast<double>(p.m)), -0.05);
    EXPECT_LE(f.predict(static_cast<double>(p.m)), 1.05);
  }
}

TEST(FitDecay, StandardErrorsScaleWithNoise) {
  // Exponent stderr on a fixed design is proportional to the point error.
  auto pts = synth(geometric_lengths(5000, 15), 0.5, {0.45}, {0.998});
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  std::vector<double> draws;
  for (std::size_t i = 0; i < pts.size(); ++i) draws.push_back(z(gen));
  auto with_sigma = [&](double s) {
    auto q = pts;
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i].p += s * draws[i];
      q[i].std_err = s;
    }
    return fit_decay(q, 1).exponent_stderr(0);
  };
  EXPECT_NEAR(with_sigma(2e-6) / with_sigma(1e-6), 2.0, 1e-3);
}

TEST(FitDecay, AffineInvariance) {
  const auto base = synth(geometric_lengths(20000, 20), 0.25, {0.7}, {0.9995});
  const double lam = fit_decay(base, 1).exponents[0];
  for (auto [a, b] : {std::pair{0.5, 0.3}, std::pair{0.9, -0.1}, std::pair{0.01, 0.5}}) {
    auto pts = base;
    for (auto& p : pts) p.p = a * p.p + b;
    const auto f = fit_decay(pts, 1);
    EXPECT_NEAR(f.exponents[0], lam, 1e-12);
    EXPECT_NEAR(f.amplitudes[0], 0.7 * a, 1e-6);
  }
}

TEST(FitDecay, InputErrors) {
  EXPECT_THROW(fit_decay(synth({1, 2}, 0.5, {0.5}, {0.9}), 1), std::invalid_argument);
  EXPECT_THROW(fit_decay(synth({1, 2, 3, 4}, 0.5, {0.5}, {0.9}), 2), std::invalid_argument);
  EXPECT_THROW(fit_decay(synth({1, 2, 2, 4}, 0.5, {0.5}, {0.9}), 1), std::invalid_argument);
  EXPECT_THROW(fit_decay(synth({1, 2, 3, 4, 5}, 0.5, {0.5}, {0.9}), 3), std::invalid_argument);
  auto pts = synth({1, 2, 3}, 0.5, {0.5}, {0.9});
  pts[1].p = std::nan("");
  EXPECT_THROW(fit_decay(pts, 1), std::invalid_argument);
}

TEST(SelectModel, UniformRatesPickOrderOne) {
  ExperimentConfig c;
  c.n = 3;
  const double pb = 1e-3;
  c.pauli_noise = SimplifiedSpec::standard(3, 8 * pb);
  c.lengths = geometric_lengths(3000, 20);
  c.prep = {1e-3, 1e-3, std::nullopt};
  c.confusions.assign(3, reference_confusion());
  const auto data = exact_survival_curve(c);
  const auto f = select_model(data);
  EXPECT_EQ(f.order, 1);
  // uniform single-site rates with qbar = pbar: lambda = 1 - (n + 2) pbar
  EXPECT_NEAR(f.exponents[0], 1 - 5 * pb, 1e-9);
}

TEST(SelectModel, SeparatedCzExponentsPickOrderTwo) {
  ExperimentConfig c;
  c.n = 2;
  c.mode = Mode::kIlrb;
  c.target = "cz";
  c.target_noise = TwoQubitLeakSpec{0.1, 0.01, 0.0};
  c.lengths = geometric_lengths(1000, 40);
  const auto data = exact_survival_curve(c, Sequence::kInterleaved);
  const auto f = select_model(data);
  ASSERT_EQ(f.order, 2);
  const auto theory = cz_eigenvalues(0.1, 0.01).eigenvalues;
  EXPECT_NEAR(f.exponents[0], theory[0], 1e-6);
  EXPECT_NEAR(f.exponents[1], theory[1], 1e-6);
  const auto r = rates_from_fit(f, CzModel{});
  EXPECT_NEAR(r.leakage, 0.11 / 4, 1e-6);
  EXPECT_NEAR(r.seepage, 0.11 / 5, 1e-6);
}

TEST(SelectModel, ConstantPicksOrderOne) {
  SurvivalDataset d;
  d.points = synth(geometric_lengths(1000, 10), 0.8, {}, {});
  DecayFit f;
  try {
    f = select_model(d);
  } catch (const FitError& e) {
    f = e.best();
  }
  EXPECT_EQ(f.order, 1);
  SurvivalDataset few;
  few.points = synth({1, 2, 3, 4}, 0.8, {}, {});
  EXPECT_THROW(select_model(few), std::invalid_argument);
}

DecayFit manual_fit(std::vector<double> lams, std::vector<double> se) {
  DecayFit f;
  f.order = static_cast<int>(lams.size());
  f.exponents = lams;
  f.amplitudes.assign(lams.size(), 0.5);
  f.covariance = RMatrix::Zero(1 + 2 * f.order, 1 + 2 * f.order);
  for (int k = 0; k < f.order; ++k) f.covariance(1 + f.order + k, 1 + f.order + k) = se[static_cast<std::size_t>(k)] * se[static_cast<std::size_t>(k)];
  return f;
}

TEST(RatesFromFit, Corollary1) {
  const auto r = rates_from_fit(manual_fit({0.999957}, {1.2e-5}), Corollary1Model{4, 1.0});
  EXPECT_NEAR(r.leakage, 2.87e-5, 0.005e-5);
  EXPECT_NEAR(r.leakage_err, 4.0 / 6.0 * 1.2e-5, 1e-15);
  EXPECT_NEAR(r.seepage_err / r.leakage_err, r.seepage / r.leakage, 1e-12);
  EXPECT_EQ(r.model, "corollary1");
  EXPECT_THROW(rates_from_fit(manual_fit({0.9, 0.99}, {0, 0}), Corollary1Model{4, 1.0}), std::invalid_argument);
}

TEST(RatesFromFit, Iswap) {
  const double lam = 0.999782;
  const double lp = 0.999980;
  const auto r = rates_from_fit(manual_fit({lam}, {2e-6}), IswapModel{lp, 1e-6});
  EXPECT_NEAR(r.leakage, 9.9e-5, 0.05e-5);
  EXPECT_NEAR(r.seepage, 7.9e-5, 0.05e-5);
  // numeric gradient of the closed form
  const double h = 1e-9;
  const double g_lam = (iswap_rates_from_lambdas(lam + h, lp).leakage - iswap_rates_from_lambdas(lam - h, lp).leakage) / (2 * h);
  const double g_lp = (iswap_rates_from_lambdas(lam, lp + h).leakage - iswap_rates_from_lambdas(lam, lp - h).leakage) / (2 * h);
  EXPECT_NEAR(r.leakage_err, std::hypot(g_lam * 2e-6, g_lp * 1e-6), 1e-10);
  EXPECT_NEAR(r.seepage_err, 0.8 * r.leakage_err, 1e-18);
}

TEST(RatesFromFit, CzTraceIdentity) {
  const auto r = rates_from_fit(manual_fit({0.96, 0.965}, {1e-4, 1e-4}), CzModel{});
  EXPECT_NEAR(r.leakage, 0.025, 1e-15);
  EXPECT_NEAR(r.seepage, 0.02, 1e-15);
  EXPECT_NEAR(r.leakage_err, std::sqrt(2.0) * 1e-4 / 3.0, 1e-15);
  EXPECT_THROW(rates_from_fit(manual_fit({0.96}, {1e-4}), CzModel{}), std::invalid_argument);
}

TEST(RatesFromFit, CrosstalkFree) {
  const auto r = rates_from_fit(manual_fit({0.97, 0.94}, {1e-4, 2e-4}), CrosstalkFreeModel{2, 1.0});
  const auto want = crosstalk_free_rates({0.01, 0.02}, {0.01, 0.02}).rates;
  EXPECT_NEAR(r.leakage, want.leakage, 1e-15);
  EXPECT_NEAR(r.seepage, want.seepage, 1e-15);
  EXPECT_NEAR(r.leakage_err, std::hypot(0.98 * 1e-4 / 3, 0.99 * 2e-4 / 3), 1e-10);
}

TEST(Corollary1Curve, SecondAmplitudeVanishes) {
  // Uniform rates: the 1 - 2 qbar modes carry no weight for a symmetric start.
  ExperimentConfig c;
  c.n = 2;
  c.pauli_noise = SimplifiedSpec::standard(2, 4e-3);
  c.lengths = geometric_lengths(5000, 25);
  const auto data = exact_survival_curve(c);
  const auto f = fit_decay(data, 1);
  EXPECT_LT(f.residual_rms, 1e-12);
  EXPECT_NEAR(f.exponents[0], 1 - 4e-3, 1e-10);
}

}  // namespace
}  // namespace leakbench
