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

#include "cbo/gp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "cbo/error.hpp"

namespace cbo {

namespace {

constexpr double kSqrt5 = 2.23606797749978969640;
constexpr double kLog2Pi = 1.83787706640934548356;
constexpr std::array<double, 8> kJitterLadder = {0.0,  1e-10, 1e-9, 1e-8,
                                                 1e-7, 1e-6,  1e-5, 1e-4};
// Relative floor on squared Cholesky pivots; smaller pivots mean numerical rank loss.
constexpr double kPivotFloor = 1e-14;

// Search box for hyperparameter fitting.
constexpr double kLengthscaleLo = 0.05;
constexpr double kLengthscaleHi = 5.0;
constexpr double kSignalLo = 0.1;
constexpr double kSignalHi = 10.0;
constexpr double kNoiseLo = 1e-6;
constexpr double kNoiseHi = 1e-1;

double matern52_from_r2(double r2, double signal_variance) {
  const double r = std::sqrt(r2);
  return signal_variance * (1.0 + kSqrt5 * r + 5.0 * r2 / 3.0) * std::exp(-kSqrt5 * r);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

KernelHyper KernelHyper::isotropic(std::size_t dim, double lengthscale, double signal_variance,
                                   double noise_variance, double prior_mean) {
  KernelHyper h;
  h.lengthscales = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), lengthscale);
  h.signal_variance = signal_variance;
  h.noise_variance = noise_variance;
  h.prior_mean = prior_mean;
  return h;
}

void KernelHyper::validate() const {
  if (lengthscales.size() == 0 || (lengthscales.array() <= 0.0).any()) {
    throw Error("kernel lengthscales must be positive");
  }
  if (!(signal_variance > 0.0)) throw Error("kernel signal variance must be positive");
  if (!(noise_variance >= 0.0)) throw Error("kernel noise variance must be non-negative");
}

double kernel_matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelHyper& hyper) {
  if (a.size() != b.size() || a.size() != hyper.lengthscales.size()) {
    throw DimensionMismatch("kernel_matern52: dimension mismatch");
  }
  const double r2 = ((a - b).array() / hyper.lengthscales.array()).square().sum();
  return matern52_from_r2(r2, hyper.signal_variance);
}

Eigen::MatrixXd kernel_matrix(const Points& rows, const Points& cols, const KernelHyper& hyper) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          kernel_matern52(rows[i], cols[j], hyper);
    }
  }
  return k;
}

Eigen::MatrixXd gram_matrix(const Points& inputs, const KernelHyper& hyper) {
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = hyper.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernel_matern52(inputs[static_cast<std::size_t>(i)],
                                       inputs[static_cast<std::size_t>(j)], hyper);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Factorization factorize_with_jitter(const Eigen::MatrixXd& matrix, double scale) {
  const double s = scale > 0.0 ? scale : 1.0;
  const double max_diag = matrix.rows() > 0 ? matrix.diagonal().maxCoeff() : 1.0;
  for (double level : kJitterLadder) {
    Factorization f;
    f.jitter = level * s;
    Eigen::MatrixXd m = matrix;
    m.diagonal().array() += f.jitter;
    f.llt.compute(m);
    if (f.llt.info() != Eigen::Success) continue;
    const Eigen::VectorXd pivots = f.llt.matrixLLT().diagonal();
    if (!pivots.allFinite()) continue;
    if (pivots.rows() > 0 && pivots.array().square().minCoeff() < kPivotFloor * std::max(max_diag, 1e-300)) {
      continue;
    }
    return f;
  }
  throw SingularModelError("covariance factorization failed at maximum jitter");
}

GpModel GpModel::build(Points inputs, std::vector<double> targets, KernelHyper hyper) {
  if (inputs.empty()) throw Error("GP needs at least one observation");
  if (inputs.size() != targets.size()) {
    throw DimensionMismatch("GP inputs and targets differ in length");
  }
  hyper.validate();
  for (const auto& x : inputs) {
    if (x.size() != hyper.lengthscales.size()) {
      throw DimensionMismatch("GP input dimension does not match lengthscales");
    }
  }
  GpModel m;
  Eigen::MatrixXd k = gram_matrix(inputs, hyper);
  k.diagonal().array() += hyper.noise_variance;
  Factorization f = factorize_with_jitter(k, hyper.signal_variance);
  m.llt_ = std::move(f.llt);
  m.jitter_ = f.jitter;

  Eigen::VectorXd residual(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < targets.size(); ++i) {
    residual[static_cast<Eigen::Index>(i)] = targets[i] - hyper.prior_mean;
  }
  m.alpha_ = m.llt_.solve(residual);
  m.inputs_ = std::move(inputs);
  m.targets_ = std::move(targets);
  m.hyper_ = std::move(hyper);
  return m;
}

Eigen::VectorXd GpModel::cross_kernel(const Eigen::VectorXd& x) const {
  Eigen::VectorXd k(static_cast<Eigen::Index>(inputs_.size()));
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    k[static_cast<Eigen::Index>(i)] = kernel_matern52(x, inputs_[i], hyper_);
  }
  return k;
}

Eigen::VectorXd GpModel::solve(const Eigen::VectorXd& rhs) const { return llt_.solve(rhs); }

Eigen::MatrixXd GpModel::solve(const Eigen::MatrixXd& rhs) const { return llt_.solve(rhs); }

Posterior GpModel::posterior(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd k = cross_kernel(x);
  Posterior p;
  p.mean = hyper_.prior_mean + k.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(k);
  p.variance = std::max(0.0, hyper_.signal_variance - v.squaredNorm());
  return p;
}

double GpModel::log_marginal_likelihood() const {
  double fit = 0.0;
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    fit += (targets_[i] - hyper_.prior_mean) * alpha_[static_cast<Eigen::Index>(i)];
  }
  const double log_det_half = llt_.matrixLLT().diagonal().array().log().sum();
  return -0.5 * fit - log_det_half - 0.5 * static_cast<double>(targets_.size()) * kLog2Pi;
}

namespace {

// LML evaluator that reuses the per-dimension squared differences across hyperparameter trials.
class LmlObjective {
 public:
  LmlObjective(const Points& inputs, const std::vector<double>& targets, double prior_mean)
      : n_(static_cast<Eigen::Index>(inputs.size())), residual_(n_) {
    const auto d = inputs.front().size();
    sq_diff_.assign(static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(n_, n_));
    for (Eigen::Index k = 0; k < d; ++k) {
      auto& m = sq_diff_[static_cast<std::size_t>(k)];
      for (Eigen::Index i = 0; i < n_; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
          const double diff = inputs[static_cast<std::size_t>(i)][k] - inputs[static_cast<std::size_t>(j)][k];
          m(i, j) = diff * diff;
        }
      }
    }
    for (Eigen::Index i = 0; i < n_; ++i) residual_[i] = targets[static_cast<std::size_t>(i)] - prior_mean;
  }

  // Log-space parameters: d log-lengthscales, log signal variance, log noise variance.
  double operator()(const Eigen::VectorXd& theta) const {
    const auto d = static_cast<Eigen::Index>(sq_diff_.size());
    const double sv = std::exp(theta[d]);
    const double noise = std::exp(theta[d + 1]);
    Eigen::VectorXd inv_l2(d);
    for (Eigen::Index k = 0; k < d; ++k) inv_l2[k] = std::exp(-2.0 * theta[k]);

    Eigen::MatrixXd k(n_, n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      k(i, i) = sv + noise;
      for (Eigen::Index j = 0; j < i; ++j) {
        double r2 = 0.0;
        for (Eigen::Index c = 0; c < d; ++c) r2 += sq_diff_[static_cast<std::size_t>(c)](i, j) * inv_l2[c];
        const double v = matern52_from_r2(r2, sv);
        k(i, j) = v;
        k(j, i) = v;
      }
    }
    try {
      const Factorization f = factorize_with_jitter(k, sv);
      const Eigen::VectorXd alpha = f.llt.solve(residual_);
      const double log_det_half = f.llt.matrixLLT().diagonal().array().log().sum();
      const double value = -0.5 * residual_.dot(alpha) - log_det_half -
                           0.5 * static_cast<double>(n_) * kLog2Pi;
      return std::isfinite(value) ? value : -std::numeric_limits<double>::infinity();
    } catch (const SingularModelError&) {
      return -std::numeric_limits<double>::infinity();
    }
  }

 private:
  Eigen::Index n_;
  std::vector<Eigen::MatrixXd> sq_diff_;
  Eigen::VectorXd residual_;
};

}  // namespace

GpModel fit_gp(Points inputs, std::vector<double> targets, bool fit_hyper, Rng& rng,
               const FitOptions& options) {
  if (inputs.empty()) throw Error("fit_gp needs at least one observation");
  const auto d = inputs.front().size();
  const double mean = mean_of(targets);
  double scale = variance_of(targets, mean);
  if (!(scale > 1e-12)) scale = options.scale_hint > 0.0 ? options.scale_hint : 1.0;

  KernelHyper hyper = KernelHyper::isotropic(static_cast<std::size_t>(d), 0.5, scale, 1e-4 * scale, mean);
  if (!fit_hyper) return GpModel::build(std::move(inputs), std::move(targets), std::move(hyper));

  Eigen::VectorXd lo(d + 2);
  Eigen::VectorXd hi(d + 2);
  lo.head(d).setConstant(std::log(kLengthscaleLo));
  hi.head(d).setConstant(std::log(kLengthscaleHi));
  lo[d] = std::log(kSignalLo * scale);
  hi[d] = std::log(kSignalHi * scale);
  lo[d + 1] = std::log(kNoiseLo * scale);
  hi[d + 1] = std::log(kNoiseHi * scale);

  const LmlObjective objective(inputs, targets, mean);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::VectorXd best(d + 2);
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < options.random_samples; ++s) {
    Eigen::VectorXd theta(d + 2);
    for (Eigen::Index c = 0; c < d + 2; ++c) theta[c] = lo[c] + unit(rng) * (hi[c] - lo[c]);
    const double value = objective(theta);
    if (value > best_value || s == 0) {
      best_value = value;
      best = theta;
    }
  }

  Eigen::VectorXd step = 0.25 * (hi - lo);
  for (std::size_t s = 0; s < options.descent_steps; ++s) {
    const auto c = static_cast<Eigen::Index>(s % static_cast<std::size_t>(d + 2));
    Eigen::VectorXd up = best;
    Eigen::VectorXd down = best;
    up[c] = std::min(hi[c], best[c] + step[c]);
    down[c] = std::max(lo[c], best[c] - step[c]);
    const double v_up = objective(up);
    const double v_down = objective(down);
    if (v_up > best_value && v_up >= v_down) {
      best = up;
      best_value = v_up;
    } else if (v_down > best_value) {
      best = down;
      best_value = v_down;
    } else {
      step[c] *= 0.5;
    }
  }

  for (Eigen::Index c = 0; c < d; ++c) hyper.lengthscales[c] = std::exp(best[c]);
  hyper.signal_variance = std::exp(best[d]);
  hyper.noise_variance = std::exp(best[d + 1]);
  return GpModel::build(std::move(inputs), std::move(targets), std::move(hyper));
}

double normal_pdf(double z) { return 0.39894228040143267794 * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

double expected_improvement(double mean, double variance, double incumbent) {
  const double gap = mean - incumbent;
  const double s = std::sqrt(std::max(variance, 0.0));
  if (!(s > 0.0)) return std::max(gap, 0.0);
  const double z = gap / s;
  return std::max(0.0, gap * normal_cdf(z) + s * normal_pdf(z));
}

}  // namespace cbo
