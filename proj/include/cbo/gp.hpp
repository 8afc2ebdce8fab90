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

#include <cstddef>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "cbo/space.hpp"

namespace cbo {

/// Matérn 5/2 hyperparameters with one lengthscale per input dimension.
struct KernelHyper {
  Eigen::VectorXd lengthscales;
  double signal_variance = 1.0;
  double noise_variance = 0.0;
  double prior_mean = 0.0;

  static KernelHyper isotropic(std::size_t dim, double lengthscale, double signal_variance,
                               double noise_variance = 0.0, double prior_mean = 0.0);
  /// Throws Error if a lengthscale or the signal variance is not positive, or the noise is negative.
  void validate() const;
};

double kernel_matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelHyper& hyper);

/// (i, j) = k(rows[i], cols[j]).
Eigen::MatrixXd kernel_matrix(const Points& rows, const Points& cols, const KernelHyper& hyper);

/// Noise-free Gram matrix K(X, X).
Eigen::MatrixXd gram_matrix(const Points& inputs, const KernelHyper& hyper);

/// Cholesky factor of a symmetric matrix plus the diagonal jitter that made it succeed.
struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

/// Tries jitter 0, then 1e-10 ... 1e-4 (relative to `scale`). Throws SingularModelError past 1e-4.
Factorization factorize_with_jitter(const Eigen::MatrixXd& matrix, double scale);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact GP posterior over a fixed training set. Immutable once built.
class GpModel {
 public:
  /// Factorizes K + noise * I with escalating jitter. Throws SingularModelError or
  /// DimensionMismatch.
  static GpModel build(Points inputs, std::vector<double> targets, KernelHyper hyper);

  Posterior posterior(const Eigen::VectorXd& x) const;
  double log_marginal_likelihood() const;

  /// k(x, X) against the training inputs.
  Eigen::VectorXd cross_kernel(const Eigen::VectorXd& x) const;
  /// (K + noise * I + jitter * I)^-1 rhs via the stored factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  const Points& inputs() const noexcept { return inputs_; }
  const std::vector<double>& targets() const noexcept { return targets_; }
  const KernelHyper& hyper() const noexcept { return hyper_; }
  Eigen::MatrixXd factor() const { return llt_.matrixL(); }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const noexcept { return llt_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  double jitter() const noexcept { return jitter_; }
  std::size_t size() const noexcept { return inputs_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(hyper_.lengthscales.size()); }

 private:
  GpModel() = default;

  Points inputs_;
  std::vector<double> targets_;
  KernelHyper hyper_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
};

struct FitOptions {
  std::size_t random_samples = 64;
  std::size_t descent_steps = 100;
  /// Variance used to scale the signal/noise search ranges when the targets are (nearly) constant.
  double scale_hint = 0.0;
};

/// Fits a GP with prior mean set to the target mean. With `fit_hyper` the hyperparameters maximize
/// the log marginal likelihood by seeded log-uniform random search and coordinate descent.
GpModel fit_gp(Points inputs, std::vector<double> targets, bool fit_hyper, Rng& rng,
               const FitOptions& options = {});

/// Maximization-oriented closed-form expected improvement over `incumbent`.
double expected_improvement(double mean, double variance, double incumbent);

double normal_pdf(double z);
double normal_cdf(double z);

}  // namespace cbo
