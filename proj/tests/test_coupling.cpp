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

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cbo/coupling.hpp"
#include "cbo/error.hpp"
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

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

// Cheap points, expensive points (the first `n_co` shared with the cheap set), and targets.
struct Instance {
  Points xa, xb;
  std::vector<double> ya, yb;
  std::vector<CoObservation> co;
};

Instance random_instance(std::size_t na, std::size_t nb, std::size_t n_co, Eigen::Index d, Rng& rng) {
  Instance in;
  in.xa = random_points(na, d, rng);
  in.xb = random_points(nb - n_co, d, rng);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t i = 0; i < na; ++i) in.ya.push_back(g(rng));
  for (std::size_t i = 0; i < n_co; ++i) in.xb.insert(in.xb.begin() + static_cast<long>(i), in.xa[i]);
  for (std::size_t i = 0; i < nb; ++i) in.yb.push_back(g(rng));
  for (std::size_t i = 0; i < n_co; ++i) in.co.push_back({in.xa[i], in.ya[i], in.yb[i]});
  return in;
}

TEST(EstimateRho, DefaultsAndClamping) {
  EXPECT_EQ(estimate_rho({}), kDefaultRho);
  const std::vector<CoObservation> two{{Eigen::VectorXd(), 1, 2}, {Eigen::VectorXd(), 2, 4}};
  EXPECT_EQ(estimate_rho(two), 0.9);
  const std::vector<CoObservation> linear{{Eigen::VectorXd(), 1, 2}, {Eigen::VectorXd(), 2, 4},
                                          {Eigen::VectorXd(), 3, 6}};
  EXPECT_EQ(estimate_rho(linear), 0.99);
  const std::vector<CoObservation> constant{{Eigen::VectorXd(), 1, 5}, {Eigen::VectorXd(), 2, 5},
                                            {Eigen::VectorXd(), 3, 5}};
  EXPECT_EQ(estimate_rho(constant), 0.9);
}

TEST(EstimateRho, MatchesPearsonOracle) {
  const std::vector<CoObservation> negative{{Eigen::VectorXd(), 1, 2}, {Eigen::VectorXd(), 2, -2},
                                            {Eigen::VectorXd(), 3, 0}};
  // Centered pairs (-1, 2), (0, -2), (1, 0): r = -2 / sqrt(2 * 8) = -0.5.
  double sab = 0, saa = 0, sbb = 0;
  for (const auto& c : negative) {
    sab += (c.cheap - 2.0) * c.expensive;
    saa += (c.cheap - 2.0) * (c.cheap - 2.0);
    sbb += c.expensive * c.expensive;
  }
  ASSERT_DOUBLE_EQ(sab / std::sqrt(saa * sbb), -0.5);
  EXPECT_EQ(estimate_rho(negative), 0.0);

  Rng rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<CoObservation> pairs;
    for (int i = 0; i < 12; ++i) {
      const double a = g(rng);
      pairs.push_back({Eigen::VectorXd(), a, 0.8 * a + 0.5 * g(rng)});
    }
    double sa = 0, sb = 0;
    for (const auto& p : pairs) {
      sa += p.cheap;
      sb += p.expensive;
    }
    sa /= 12;
    sb /= 12;
    double xy = 0, xx = 0, yy = 0;
    for (const auto& p : pairs) {
      xy += (p.cheap - sa) * (p.expensive - sb);
      xx += (p.cheap - sa) * (p.cheap - sa);
      yy += (p.expensive - sb) * (p.expensive - sb);
    }
    EXPECT_NEAR(estimate_rho(pairs), std::clamp(xy / std::sqrt(xx * yy), 0.0, 0.99), 1e-12);
  }
}

TEST(CrossCovariance, ElementwiseOracle) {
  Rng rng(4);
  const auto a = random_points(4, 3, rng);
  const auto b = random_points(3, 3, rng);
  const KernelHyper h = KernelHyper::isotropic(3, 0.7, 1.3);
  const Eigen::MatrixXd c = cross_covariance(a, b, h, 0.45);
  ASSERT_EQ(c.rows(), 3);
  ASSERT_EQ(c.cols(), 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_NEAR(c(i, j), 0.45 * oracle::matern52(b[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)], h.lengthscales, 1.3), 1e-15);
  EXPECT_TRUE(cross_covariance(a, b, h, 0.0).isZero(0.0));
  const Eigen::MatrixXd same = cross_covariance({a[0], a[1]}, {a[0], a[1]}, KernelHyper::isotropic(3, 0.7, 1.0), 0.6);
  EXPECT_DOUBLE_EQ(same(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(same(1, 1), 0.6);
  EXPECT_THROW(cross_covariance(a, b, h, 1.0), Error);
  EXPECT_THROW(cross_covariance(a, b, h, -0.1), Error);
}

TEST(TransferUpdate, ClosedFormCases) {
  const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_TRUE(transfer_update(i2, 0.6 * i2, i2).isApprox(0.64 * i2, 1e-15));
  Eigen::MatrixXd kb(2, 2);
  kb << 2.0, 0.3, 0.3, 1.0;
  EXPECT_TRUE(transfer_update(kb, Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Identity(3, 3)).isApprox(kb));
  EXPECT_THROW(transfer_update(kb, Eigen::MatrixXd::Zero(2, 2), -i2), SingularTransferError);
  EXPECT_THROW(transfer_update(kb, Eigen::MatrixXd::Zero(3, 2), i2), DimensionMismatch);
}

TEST(TransferUpdate, SymmetricPsdOnStructuredJoints) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.99);
  for (int t = 0; t < 50; ++t) {
    const double rho = u(rng);
    const auto xa = random_points(8, 3, rng);
    const auto xb = random_points(5, 3, rng);
    const KernelHyper ha = KernelHyper::isotropic(3, 0.5, 1.0);
    const KernelHyper hd = KernelHyper::isotropic(3, 0.3, 0.2);
    Eigen::MatrixXd k_alpha = oracle::cov(xa, xa, ha);
    k_alpha.diagonal().array() += 1e-6;
    const Eigen::MatrixXd k_beta = rho * rho * oracle::cov(xb, xb, ha) + oracle::cov(xb, xb, hd);
    const Eigen::MatrixXd s = transfer_update(k_beta, rho * oracle::cov(xb, xa, ha), k_alpha);
    EXPECT_EQ((s - s.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GE(min_eigenvalue(s), -1e-8);
  }
}

TEST(CoupledGp, RhoZeroReducesToBetaOnly) {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto in = random_instance(10, 4, 2, 3, rng);
    Rng fit(t);
    const GpModel a = fit_gp(in.xa, in.ya, true, fit);
    const GpModel b = fit_gp(in.xb, in.yb, true, fit);
    const CoupledGp c = CoupledGp::build(a, b, 0.0, in.co);
    for (const auto& q : random_points(10, 3, rng)) {
      const Posterior pc = c.predict_expensive(q);
      const Posterior pb = b.posterior(q);
      EXPECT_NEAR(pc.mean, pb.mean, 1e-10);
      EXPECT_NEAR(pc.variance, pb.variance, 1e-10);
    }
  }
}

TEST(CoupledGp, MatchesDenseJointConditioning) {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    const auto in = random_instance(4, 2, 1, 2, rng);
    const GpModel a = GpModel::build(in.xa, in.ya, KernelHyper::isotropic(2, 0.4, 1.0, 1e-3, 0.2));
    const GpModel b = GpModel::build(in.xb, in.yb, KernelHyper::isotropic(2, 0.4, 1.5, 1e-3, -0.1));
    const CoupledGp c = CoupledGp::build(a, b, 0.8, in.co);
    EXPECT_EQ(c.rho(), 0.8);
    for (const auto& q : random_points(5, 2, rng)) {
      const auto o = oracle::joint_expensive_posterior(in.xa, in.ya, a.hyper(), a.jitter(), in.xb, in.yb,
                                                       b.hyper(), b.jitter(), 0.8, q);
      const Posterior p = c.predict_expensive(q);
      EXPECT_NEAR(p.mean, o.mean, 1e-8);
      EXPECT_NEAR(p.variance, std::max(0.0, o.variance), 1e-8);
    }
  }
}

TEST(CoupledGp, InterpolatesNoiselessCoObservation) {
  Rng rng(8);
  const auto in = random_instance(5, 3, 2, 2, rng);
  const GpModel a = GpModel::build(in.xa, in.ya, KernelHyper::isotropic(2, 0.3, 1.0));
  const GpModel b = GpModel::build(in.xb, in.yb, KernelHyper::isotropic(2, 0.3, 1.0));
  const CoupledGp c = CoupledGp::build(a, b, 0.7, in.co);
  const Posterior p = c.predict_expensive(in.co[0].x);
  EXPECT_NEAR(p.mean, in.co[0].expensive, 1e-6);
  EXPECT_NEAR(p.variance, 0.0, 1e-6);
}

TEST(CoupledGp, CheapInformationNeverIncreasesVariance) {
  Rng rng(9);
  std::uniform_real_distribution<double> u(0.0, 0.99);
  for (int t = 0; t < 30; ++t) {
    const auto in = random_instance(12, 5, 3, 3, rng);
    const GpModel a = GpModel::build(in.xa, in.ya, KernelHyper::isotropic(3, 0.5, 1.0, 1e-4));
    const GpModel b = GpModel::build(in.xb, in.yb, KernelHyper::isotropic(3, 0.5, 1.2, 1e-4));
    const CoupledGp c = CoupledGp::build(a, b, u(rng), in.co);
    for (const auto& q : random_points(10, 3, rng))
      EXPECT_LE(c.predict_expensive(q).variance, b.posterior(q).variance + 1e-8);
  }
}

TEST(CoupledGp, ClampsRhoToVarianceRatio) {
  Rng rng(10);
  const auto in = random_instance(6, 3, 1, 2, rng);
  const GpModel a = GpModel::build(in.xa, in.ya, KernelHyper::isotropic(2, 0.4, 4.0, 1e-4));
  const GpModel b = GpModel::build(in.xb, in.yb, KernelHyper::isotropic(2, 0.4, 1.0, 1e-4));
  const CoupledGp c = CoupledGp::build(a, b, 0.9, in.co);
  EXPECT_EQ(c.requested_rho(), 0.9);
  EXPECT_LE(c.rho(), 0.5);
  EXPECT_GE(min_eigenvalue(c.transferred_covariance()), -1e-8);
}

TEST(CoupledGp, RejectsCoObservationOutsideTrainingSets) {
  Rng rng(11);
  auto in = random_instance(4, 2, 1, 2, rng);
  const GpModel a = GpModel::build(in.xa, in.ya, KernelHyper::isotropic(2, 0.4, 1.0, 1e-4));
  const GpModel b = GpModel::build(in.xb, in.yb, KernelHyper::isotropic(2, 0.4, 1.0, 1e-4));
  in.co[0].x[0] += 0.01;
  EXPECT_THROW(CoupledGp::build(a, b, 0.5, in.co), Error);
}

TEST(CoupledGp, PredictionsContinuousInRho) {
  Rng rng(12);
  const auto in = random_instance(10, 4, 2, 2, rng);
  const GpModel a = GpModel::build(in.xa, in.ya, KernelHyper::isotropic(2, 0.4, 1.0, 1e-4));
  const GpModel b = GpModel::build(in.xb, in.yb, KernelHyper::isotropic(2, 0.4, 1.5, 1e-4));
  for (const auto& q : random_points(5, 2, rng)) {
    std::vector<double> means, vars;
    for (int i = 0; i <= 99; ++i) {
      const CoupledGp c = CoupledGp::build(a, b, 0.01 * i, in.co);
      means.push_back(c.predict_expensive(q).mean);
      vars.push_back(c.predict_expensive(q).variance);
    }
    for (const auto* series : {&means, &vars}) {
      std::vector<double> jumps;
      for (std::size_t i = 1; i < series->size(); ++i) jumps.push_back(std::abs((*series)[i] - (*series)[i - 1]));
      for (std::size_t i = 0; i < jumps.size(); ++i) {
        const std::size_t lo = i >= 3 ? i - 3 : 0;
        const std::size_t hi = std::min(jumps.size(), i + 4);
        std::vector<double> nb;
        for (std::size_t k = lo; k < hi; ++k)
          if (k != i) nb.push_back(jumps[k]);
        std::nth_element(nb.begin(), nb.begin() + static_cast<long>(nb.size() / 2), nb.end());
        EXPECT_LE(jumps[i], 10.0 * nb[nb.size() / 2] + 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace cbo
