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

#include "cbo/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "cbo/error.hpp"

namespace cbo {

namespace {

constexpr int kMaxRhoHalvings = 8;

Eigen::MatrixXd schur_with(const Eigen::MatrixXd& k_beta, const Eigen::MatrixXd& k_beta_alpha,
                           const Eigen::LLT<Eigen::MatrixXd>& alpha_llt) {
  const Eigen::MatrixXd solved = alpha_llt.solve(k_beta_alpha.transpose());
  Eigen::MatrixXd s = k_beta - k_beta_alpha * solved;
  return 0.5 * (s + s.transpose());
}

Eigen::VectorXd residuals(const GpModel& gp) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(gp.size()));
  for (std::size_t i = 0; i < gp.size(); ++i) {
    r[static_cast<Eigen::Index>(i)] = gp.targets()[i] - gp.hyper().prior_mean;
  }
  return r;
}

}  // namespace

double estimate_rho(std::span<const CoObservation> co_observations) {
  const std::size_t n = co_observations.size();
  if (n < 3) return kDefaultRho;
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (const auto& c : co_observations) {
    mean_a += c.cheap;
    mean_b += c.expensive;
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double saa = 0.0;
  double sbb = 0.0;
  double sab = 0.0;
  for (const auto& c : co_observations) {
    const double da = c.cheap - mean_a;
    const double db = c.expensive - mean_b;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  const double scale_a = std::max(1.0, mean_a * mean_a) * static_cast<double>(n);
  const double scale_b = std::max(1.0, mean_b * mean_b) * static_cast<double>(n);
  if (saa <= 1e-24 * scale_a || sbb <= 1e-24 * scale_b) return kDefaultRho;
  const double r = sab / std::sqrt(saa * sbb);
  return std::clamp(r, 0.0, kMaxRho);
}

Eigen::MatrixXd cross_covariance(const Points& cheap_inputs, const Points& beta_inputs,
                                 const KernelHyper& hyper_alpha, double rho) {
  if (!(rho >= 0.0 && rho <= kMaxRho)) throw Error("cross_covariance: rho outside [0, 0.99]");
  return rho * kernel_matrix(beta_inputs, cheap_inputs, hyper_alpha);
}

Eigen::MatrixXd transfer_update(const Eigen::MatrixXd& k_beta, const Eigen::MatrixXd& k_beta_alpha,
                                const Eigen::MatrixXd& k_alpha) {
  if (k_alpha.rows() != k_alpha.cols() || k_beta.rows() != k_beta.cols() ||
      k_beta_alpha.rows() != k_beta.rows() || k_beta_alpha.cols() != k_alpha.rows()) {
    throw DimensionMismatch("transfer_update: non-conformable blocks");
  }
  try {
    const double scale = k_alpha.rows() > 0 ? k_alpha.diagonal().cwiseAbs().maxCoeff() : 1.0;
    const Factorization f = factorize_with_jitter(k_alpha, scale);
    return schur_with(k_beta, k_beta_alpha, f.llt);
  } catch (const SingularModelError&) {
    throw SingularTransferError("transfer_update: K_alpha factorization failed");
  }
}

CoupledGp CoupledGp::build(GpModel gp_alpha, GpModel gp_beta, double rho,
                           std::vector<CoObservation> co_observations) {
  if (gp_alpha.dim() != gp_beta.dim()) throw DimensionMismatch("CoupledGp: fidelity dimensions differ");
  auto contains = [](const Points& pts, const Eigen::VectorXd& x) {
    return std::any_of(pts.begin(), pts.end(), [&](const Eigen::VectorXd& p) { return p == x; });
  };
  for (const auto& c : co_observations) {
    if (!contains(gp_alpha.inputs(), c.x) || !contains(gp_beta.inputs(), c.x)) {
      throw Error("CoupledGp: co-observation missing from a fidelity's training inputs");
    }
  }

  CoupledGp g(std::move(gp_alpha), std::move(gp_beta));
  g.co_ = std::move(co_observations);
  g.requested_rho_ = rho;
  const double variance_cap = std::sqrt(g.beta_.hyper().signal_variance / g.alpha_.hyper().signal_variance);
  double r = std::clamp(rho, 0.0, std::min(kMaxRho, variance_cap));
  for (int attempt = 0; attempt < kMaxRhoHalvings; ++attempt) {
    if (g.assemble(r)) return g;
    r *= 0.5;
  }
  if (g.assemble(0.0)) return g;
  throw SingularModelError("CoupledGp: joint covariance could not be factorized");
}

bool CoupledGp::assemble(double rho) {
  rho_ = rho;
  cross_ = cross_covariance(alpha_.inputs(), beta_.inputs(), alpha_.hyper(), rho);
  Eigen::MatrixXd k_beta = gram_matrix(beta_.inputs(), beta_.hyper());
  k_beta.diagonal().array() += beta_.hyper().noise_variance + beta_.jitter();

  cross_solve_ = alpha_.llt().solve(cross_.transpose()).transpose();
  schur_ = k_beta - cross_solve_ * cross_.transpose();
  schur_ = 0.5 * (schur_ + schur_.transpose());
  schur_llt_.compute(schur_);
  if (schur_llt_.info() != Eigen::Success) return false;
  const Eigen::VectorXd pivots = schur_llt_.matrixLLT().diagonal();
  if (!pivots.allFinite() || pivots.array().square().minCoeff() < 1e-14 * k_beta.diagonal().maxCoeff()) {
    return false;
  }

  const Eigen::VectorXd r_alpha = residuals(alpha_);
  const Eigen::VectorXd r_beta = residuals(beta_);
  weights_beta_ = schur_llt_.solve(r_beta - cross_solve_ * r_alpha);
  weights_alpha_ = alpha_.llt().solve(r_alpha - cross_.transpose() * weights_beta_);
  return true;
}

Posterior CoupledGp::predict_expensive(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd k_alpha = rho_ * alpha_.cross_kernel(x);
  const Eigen::VectorXd k_beta = beta_.cross_kernel(x);

  Posterior p;
  p.mean = beta_.hyper().prior_mean + k_alpha.dot(weights_alpha_) + k_beta.dot(weights_beta_);

  // k' J^-1 k = |L_a^-1 k_a|^2 + |L_s^-1 (k_b - C A^-1 k_a)|^2
  const Eigen::VectorXd t = alpha_.llt().matrixL().solve(k_alpha);
  const Eigen::VectorXd u = k_beta - cross_solve_ * k_alpha;
  const Eigen::VectorXd v = schur_llt_.matrixL().solve(u);
  p.variance = std::max(0.0, beta_.hyper().signal_variance - t.squaredNorm() - v.squaredNorm());
  return p;
}

}  // namespace cbo
