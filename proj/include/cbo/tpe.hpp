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
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cbo/space.hpp"

namespace cbo {

/// A configuration with its observed figure of merit.
struct ScoredConfig {
  Configuration config;
  double fom = 0.0;
};

/// Partition of a history into the best ~gamma fraction ("good") and the rest ("bad").
/// Indices refer to the history the split was built from, in ascending order.
struct TpeSplit {
  double threshold = 0.0;
  double gamma = 0.0;
  std::vector<std::size_t> good;
  std::vector<std::size_t> bad;
};

/// Throws Error for fewer than two observations or gamma outside (0, 1). Ties are broken in favour
/// of the most recent observation.
TpeSplit split_by_threshold(std::span<const double> foms, double gamma);

/// Silverman bandwidth 1.06 * max(sigma, 0.05) * n^(-1/5), floored at max(0.01, encoded_step / 2).
double bandwidth(std::size_t n, double sample_std, double encoded_step = 0.0);

/// Per-dimension Parzen estimator over encoded configurations. Continuous dimensions use a plain
/// Gaussian kernel; grid dimensions spread each point's kernel mass over the legal grid values.
/// The joint density is the product of the per-dimension estimates.
class DensityModel {
 public:
  /// Bandwidths from `bandwidth()` using each dimension's sample spread.
  static DensityModel fit(Points points, const ParameterSpace& space);
  /// `grid_sizes[d]` is 0 for a continuous dimension, otherwise the number of grid values.
  static DensityModel with_bandwidths(Points points, std::vector<double> bandwidths,
                                      std::vector<std::size_t> grid_sizes);

  double log_density(const Eigen::VectorXd& x) const;
  double log_dimension_density(std::size_t dim, double value) const;
  /// Draws one encoded point, truncated to [0, 1] on continuous dimensions.
  Eigen::VectorXd sample(Rng& rng) const;

  const Points& points() const noexcept { return points_; }
  const std::vector<double>& bandwidths() const noexcept { return bandwidths_; }
  const std::vector<std::size_t>& grid_sizes() const noexcept { return grid_sizes_; }
  std::size_t dim() const noexcept { return bandwidths_.size(); }

 private:
  DensityModel() = default;
  std::vector<double> grid_log_weights(std::size_t dim, double center) const;

  Points points_;
  std::vector<double> bandwidths_;
  std::vector<std::size_t> grid_sizes_;
  // Per grid dimension, per point: log of the kernel's total mass over the grid.
  std::vector<std::vector<double>> log_norms_;
};

double parzen_density(const DensityModel& model, const Eigen::VectorXd& x);

Configuration sample_from_density(const DensityModel& model, const ParameterSpace& space, Rng& rng);

/// g(x) / l(x) with g the good-set density.
double acquisition_ratio(const Eigen::VectorXd& x, const DensityModel& good, const DensityModel& bad);
double log_acquisition_ratio(const Eigen::VectorXd& x, const DensityModel& good,
                             const DensityModel& bad);

/// Good/bad densities for a history split at gamma.
struct TpeModel {
  TpeSplit split;
  DensityModel good;
  DensityModel bad;
};

TpeModel build_tpe(std::span<const ScoredConfig> history, double gamma, const ParameterSpace& space);

/// Draws `n_candidates` from the good density and returns the one maximizing g/l (first wins
/// ties). Falls back to a uniform draw when the history has fewer than two entries.
Configuration propose_next(std::span<const ScoredConfig> history, double gamma,
                           std::size_t n_candidates, const ParameterSpace& space, Rng& rng);

/// `count` draws from the good density of a history split at gamma (uniform with < 2 entries).
std::vector<Configuration> sample_good_density(std::span<const ScoredConfig> history, double gamma,
                                               std::size_t count, const ParameterSpace& space,
                                               Rng& rng);

}  // namespace cbo
