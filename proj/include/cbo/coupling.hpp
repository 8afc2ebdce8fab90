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

#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "cbo/gp.hpp"

namespace cbo {

/// One configuration evaluated at both fidelities.
struct CoObservation {
  Eigen::VectorXd x;
  double cheap = 0.0;
  double expensive = 0.0;
};

inline constexpr double kDefaultRho = 0.9;
inline constexpr double kMaxRho = 0.99;

/// Pearson correlation of the (cheap, expensive) pairs clamped to [0, 0.99]. Falls back to 0.9
/// with fewer than three pairs or when either side is constant.
double estimate_rho(std::span<const CoObservation> co_observations);

/// (i, j) = rho * k_alpha(beta_inputs[i], cheap_inputs[j]), i.e. the K^{beta,alpha} block.
Eigen::MatrixXd cross_covariance(const Points& cheap_inputs, const Points& beta_inputs,
                                 const KernelHyper& hyper_alpha, double rho);

/// Schur complement K_beta - K_beta_alpha * K_alpha^-1 * K_beta_alpha^T, computed through a
/// Cholesky factor of K_alpha and symmetrized. Throws SingularTransferError when K_alpha cannot be
/// factorized.
Eigen::MatrixXd transfer_update(const Eigen::MatrixXd& k_beta, const Eigen::MatrixXd& k_beta_alpha,
                                const Eigen::MatrixXd& k_alpha);

/// Joint two-fidelity model: GP^alpha over cheap observations and GP^beta over expensive ones,
/// linked through a scaled copy of the cheap kernel. Immutable once built.
class CoupledGp {
 public:
  /// `rho` is clamped to [0, min(0.99, sqrt(sv_beta / sv_alpha))]; if the joint covariance is still
  /// not positive definite it is halved until it is (rho = 0 always succeeds).
  static CoupledGp build(GpModel gp_alpha, GpModel gp_beta, double rho,
                         std::vector<CoObservation> co_observations);

  /// Posterior of f_beta(x) conditioned on every cheap and expensive observation.
  Posterior predict_expensive(const Eigen::VectorXd& x) const;

  const GpModel& gp_alpha() const noexcept { return alpha_; }
  const GpModel& gp_beta() const noexcept { return beta_; }
  /// Correlation actually used after clamping.
  double rho() const noexcept { return rho_; }
  double requested_rho() const noexcept { return requested_rho_; }
  const std::vector<CoObservation>& co_observations() const noexcept { return co_; }
  /// Conditional covariance of the expensive training block given the cheap block.
  const Eigen::MatrixXd& transferred_covariance() const noexcept { return schur_; }

 private:
  CoupledGp(GpModel alpha, GpModel beta) : alpha_(std::move(alpha)), beta_(std::move(beta)) {}
  bool assemble(double rho);

  GpModel alpha_;
  GpModel beta_;
  std::vector<CoObservation> co_;
  double rho_ = 0.0;
  double requested_rho_ = 0.0;

  Eigen::MatrixXd cross_;        // K^{beta,alpha}, n_beta x n_alpha
  Eigen::MatrixXd cross_solve_;  // K^{beta,alpha} (K^alpha)^-1
  Eigen::MatrixXd schur_;
  Eigen::LLT<Eigen::MatrixXd> schur_llt_;
  Eigen::VectorXd weights_alpha_;
  Eigen::VectorXd weights_beta_;
};

}  // namespace cbo
