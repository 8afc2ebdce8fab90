// Copyright 2026 The CBO Authors
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

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cbo/error.hpp"
#include "cbo/gp.hpp"
#include "oracles.hpp"

namespace cbo {
namespace {

Points random_points(std::size_t n, Eigen::Index d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Points p;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x(d);
    for (Eigen::Index j = 0; j < d; ++j) x[j] = u(rng);
    p.push_back(x);
  }
  return p;
}

KernelHyper random_hyper(Eigen::Index d, Rng& rng) {
  std::uniform_real_distribution<double> ls(0.2, 1.5), sv(0.5, 3.0), nz(1e-4, 1e-2), mu(-1, 1);
  KernelHyper h;
  h.lengthscales.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) h.lengthscales[j] = ls(rng);
  h.signal_variance = sv(rng);
  h.noise_variance = nz(rng);
  h.prior_mean = mu(rng);
  return h;
}

std::vector<double> random_targets(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> y(n);
  for (double& v : y) v = g(rng);
  return y;
}

TEST(Kernel, KnownValuesAndSymmetry) {
  const KernelHyper h = KernelHyper::isotropic(1, 1.0, 1.0);
  Eigen::VectorXd a(1), b(1);
  a << 0.0;
  b << 1.0;
  EXPECT_NEAR(kernel_matern52(a, b, h), 0.52399, 5e-6);
  EXPECT_NEAR(kernel_matern52(a, b, h), oracle::matern52(a, b, h.lengthscales, 1.0), 1e-15);
  EXPECT_EQ(kernel_matern52(a, a, KernelHyper::isotropic(1, 0.3, 2.5)), 2.5);
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_points(2, 4, rng);
    const KernelHyper hr = random_hyper(4, rng);
    EXPECT_EQ(kernel_matern52(p[0], p[1], hr), kernel_matern52(p[1], p[0], hr));
  }
  Eigen::VectorXd c(2);
  c << 0, 0;
  EXPECT_THROW(kernel_matern52(a, c, h), DimensionMismatch);
}

TEST(Kernel, GramMatricesArePsd) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_points(30, 3, rng);
    const Eigen::MatrixXd k = gram_matrix(p, random_hyper(3, rng));
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(GpModel, SinglePointInterpolates) {
  Eigen::VectorXd x(2);
  x << 0.3, 0.7;
  const GpModel m = GpModel::build({x}, {4.2}, KernelHyper::isotropic(2, 0.5, 1.0, 0.0, 0.0));
  EXPECT_NEAR(m.posterior(x).mean, 4.2, 1e-9);
  EXPECT_NEAR(m.posterior(x).variance, 0.0, 1e-9);
}

TEST(GpModel, FarAwayQueryRecoversPrior) {
  Rng rng(4);
  const auto p = random_points(5, 2, rng);
  const GpModel m = GpModel::build(p, random_targets(5, rng), KernelHyper::isotropic(2, 0.05, 2.0, 1e-6, 0.7));
  Eigen::VectorXd far(2);
  far << 50.0, -50.0;
  EXPECT_NEAR(m.posterior(far).mean, 0.7, 1e-12);
  EXPECT_NEAR(m.posterior(far).variance, 2.0, 1e-12);
}

TEST(GpModel, StandardNormalLml) {
  Eigen::VectorXd x(1);
  x << 0.5;
  const GpModel m = GpModel::build({x}, {0.25}, KernelHyper::isotropic(1, 1.0, 0.75, 0.25, 0.25));
  EXPECT_NEAR(m.log_marginal_likelihood(), -0.91894, 5e-6);
}

TEST(GpModel, MatchesDenseOracles) {
  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + rng() % 25;
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 6);
    const auto x = random_points(n, d, rng);
    const auto y = random_targets(n, rng);
    const KernelHyper h = random_hyper(d, rng);
    const GpModel m = GpModel::build(x, y, h);
    // Alpha against a dense solve.
    Eigen::MatrixXd k = oracle::cov(x, x, h);
    k.diagonal().array() += h.noise_variance + m.jitter();
    const Eigen::VectorXd alpha = k.fullPivLu().solve(oracle::residual(y, h.prior_mean));
    EXPECT_LT((alpha - m.alpha()).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, alpha.cwiseAbs().maxCoeff()));
    // Factor reconstruction.
    const Eigen::MatrixXd l = m.factor();
    EXPECT_LT((l * l.transpose() - k).norm(), 1e-8);
    for (const auto& q : random_points(5, d, rng)) {
      const auto o = oracle::posterior(x, y, h, m.jitter(), q);
      const Posterior p = m.posterior(q);
      EXPECT_NEAR(p.mean, o.mean, 1e-8);
      EXPECT_NEAR(p.variance, std::max(0.0, o.variance), 1e-8);
      EXPECT_LE(p.variance, h.signal_variance + 1e-8);
    }
    EXPECT_NEAR(m.log_marginal_likelihood(), oracle::log_marginal_likelihood(x, y, h, m.jitter()), 1e-8);
  }
}

TEST(GpModel, DuplicateInputsWithNoiseNeedNoJitter) {
  Eigen::VectorXd x(1);
  x << 0.4;
  const GpModel m = GpModel::build({x, x, x}, {1.0, 1.1, 0.9}, KernelHyper::isotropic(1, 0.3, 1.0, 1e-3));
  EXPECT_EQ(m.jitter(), 0.0);
  EXPECT_NEAR(m.posterior(x).mean, 1.0, 1e-3);
}

TEST(GpModel, NoiselessDuplicatesEscalateJitter) {
  Eigen::VectorXd x(1);
  x << 0.4;
  const GpModel m = GpModel::build({x, x}, {1.0, 1.0}, KernelHyper::isotropic(1, 0.3, 1.0, 0.0));
  EXPECT_GT(m.jitter(), 0.0);
  EXPECT_LE(m.jitter(), 1e-4);
}

TEST(Factorization, FailsPastTheLargestJitter) {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(factorize_with_jitter(bad, 1.0), SingularModelError);
}

TEST(GpModel, ValidationErrors) {
  Eigen::VectorXd x(2);
  x << 0, 0;
  EXPECT_THROW(GpModel::build({x}, {1.0, 2.0}, KernelHyper::isotropic(2, 1, 1)), DimensionMismatch);
  EXPECT_THROW(GpModel::build({x}, {1.0}, KernelHyper::isotropic(3, 1, 1)), DimensionMismatch);
  EXPECT_THROW(GpModel::build({x}, {1.0}, KernelHyper::isotropic(2, -1, 1)), Error);
  EXPECT_THROW(GpModel::build({}, {}, KernelHyper::isotropic(2, 1, 1)), Error);
}

TEST(FitGp, DeterministicAndImprovesLml) {
  Rng data(6);
  const auto x = random_points(20, 3, data);
  std::vector<double> y;
  for (const auto& p : x) y.push_back(std::sin(6 * p[0]) + p[1] * p[1]);
  Rng a(99), b(99);
  const GpModel m1 = fit_gp(x, y, true, a);
  const GpModel m2 = fit_gp(x, y, true, b);
  EXPECT_EQ(m1.hyper().lengthscales, m2.hyper().lengthscales);
  EXPECT_EQ(m1.hyper().signal_variance, m2.hyper().signal_variance);
  EXPECT_EQ(m1.hyper().noise_variance, m2.hyper().noise_variance);
  EXPECT_EQ(m1.factor(), m2.factor());
  Rng c(99);
  const GpModel fixed = fit_gp(x, y, false, c);
  EXPECT_GE(m1.log_marginal_likelihood(), fixed.log_marginal_likelihood());
  double mean = 0.0;
  for (double v : y) mean += v;
  EXPECT_NEAR(m1.hyper().prior_mean, mean / 20.0, 1e-12);
  // Search ranges.
  for (Eigen::Index j = 0; j < 3; ++j) {
    EXPECT_GE(m1.hyper().lengthscales[j], 0.05 - 1e-12);
    EXPECT_LE(m1.hyper().lengthscales[j], 5.0 + 1e-12);
  }
}

TEST(FitGp, ConstantTargetsAndSinglePoint) {
  Rng rng(8);
  const auto x = random_points(6, 2, rng);
  const GpModel m = fit_gp(x, std::vector<double>(6, 3.0), true, rng);
  EXPECT_NEAR(m.posterior(x[0]).mean, 3.0, 1e-9);
  const GpModel one = fit_gp({x[0]}, {1.5}, true, rng);
  EXPECT_NEAR(one.posterior(x[0]).mean, 1.5, 1e-6);
}

TEST(FitGp, DuplicateObservationChangesLmlReproducibly) {
  Rng data(10);
  auto x = random_points(8, 2, data);
  auto y = random_targets(8, data);
  const KernelHyper h = KernelHyper::isotropic(2, 0.4, 1.0, 1e-2);
  const double before = GpModel::build(x, y, h).log_marginal_likelihood();
  x.push_back(x[3]);
  y.push_back(y[3]);
  const double after1 = GpModel::build(x, y, h).log_marginal_likelihood();
  const double after2 = GpModel::build(x, y, h).log_marginal_likelihood();
  EXPECT_NE(before, after1);
  EXPECT_EQ(after1, after2);
}

TEST(ExpectedImprovement, ClosedFormCases) {
  EXPECT_EQ(expected_improvement(3.0, 0.0, 1.0), 2.0);
  EXPECT_EQ(expected_improvement(0.0, 0.0, 1.0), 0.0);
  EXPECT_NEAR(expected_improvement(1.0, 1.0, 1.0), 1.0 / std::sqrt(2.0 * M_PI), 1e-15);
}

TEST(ExpectedImprovement, MatchesMonteCarlo) {
  std::mt19937_64 rng(12);
  const double mc = oracle::ei_monte_carlo(0.5, 1.3 * 1.3, 1.0, 1000000, rng);
  EXPECT_NEAR(expected_improvement(0.5, 1.3 * 1.3, 1.0) / mc, 1.0, 1e-2);
}

TEST(ExpectedImprovement, MonotoneAndNonNegative) {
  for (double s : {0.1, 0.5, 2.0}) {
    double prev = -1.0;
    for (double m = -5; m <= 5; m += 0.05) {
      const double ei = expected_improvement(m, s * s, 0.0);
      EXPECT_GE(ei, 0.0);
      EXPECT_GE(ei, prev - 1e-15);
      prev = ei;
    }
  }
  for (double m : {-2.0, -0.5, 0.0}) {
    double prev = -1.0;
    for (double s = 0.0; s <= 4; s += 0.05) {
      const double ei = expected_improvement(m, s * s, 0.0);
      EXPECT_GE(ei, prev - 1e-15);
      prev = ei;
    }
  }
}

}  // namespace
}  // namespace cbo
