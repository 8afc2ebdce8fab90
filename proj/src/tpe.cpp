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

#include "cbo/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cbo/error.hpp"

namespace cbo {

namespace {

constexpr double kLogInvSqrt2Pi = -0.91893853320467274178;
constexpr double kMinSigma = 0.05;
constexpr double kMinBandwidth = 0.01;
constexpr int kMaxTruncationTries = 1000;

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double grid_coordinate(std::size_t k, std::size_t grid_size) {
  return static_cast<double>(k) / static_cast<double>(grid_size - 1);
}

std::size_t nearest_grid_index(double u, std::size_t grid_size) {
  const double pos = std::clamp(u, 0.0, 1.0) * static_cast<double>(grid_size - 1);
  return static_cast<std::size_t>(std::floor(pos + 0.5));
}

}  // namespace

TpeSplit split_by_threshold(std::span<const double> foms, double gamma) {
  const std::size_t n = foms.size();
  if (n < 2) throw Error("split_by_threshold needs at least two observations");
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error("split_by_threshold: gamma must lie in (0, 1)");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (foms[a] != foms[b]) return foms[a] > foms[b];
    return a > b;
  });
  const auto wanted = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n) - 1e-9));
  const std::size_t n_good = std::clamp<std::size_t>(wanted, 1, n - 1);

  TpeSplit split;
  split.gamma = gamma;
  split.good.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_good));
  split.bad.assign(order.begin() + static_cast<std::ptrdiff_t>(n_good), order.end());
  split.threshold = foms[order[n_good - 1]];
  std::sort(split.good.begin(), split.good.end());
  std::sort(split.bad.begin(), split.bad.end());
  return split;
}

double bandwidth(std::size_t n, double sample_std, double encoded_step) {
  if (n == 0) throw Error("bandwidth needs n >= 1");
  const double sigma = std::max(sample_std, kMinSigma);
  const double h = 1.06 * sigma * std::pow(static_cast<double>(n), -0.2);
  return std::max(h, std::max(kMinBandwidth, 0.5 * encoded_step));
}

DensityModel DensityModel::fit(Points points, const ParameterSpace& space) {
  if (points.empty()) throw Error("density model needs at least one point");
  const std::size_t d = space.size();
  const std::size_t n = points.size();
  std::vector<double> bw(d);
  std::vector<std::size_t> grids(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    double mean = 0.0;
    for (const auto& p : points) mean += p[jj];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& p : points) ss += (p[jj] - mean) * (p[jj] - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    const auto& spec = space.spec(j);
    bw[j] = bandwidth(n, sd, spec.encoded_step());
    grids[j] = spec.grid_size();
  }
  return with_bandwidths(std::move(points), std::move(bw), std::move(grids));
}

DensityModel DensityModel::with_bandwidths(Points points, std::vector<double> bandwidths,
                                           std::vector<std::size_t> grid_sizes) {
  if (points.empty()) throw Error("density model needs at least one point");
  if (bandwidths.size() != grid_sizes.size()) throw DimensionMismatch("density: bandwidth/grid mismatch");
  for (const auto& p : points) {
    if (static_cast<std::size_t>(p.size()) != bandwidths.size()) {
      throw DimensionMismatch("density: point dimension mismatch");
    }
  }
  for (std::size_t j = 0; j < bandwidths.size(); ++j) {
    if (!(bandwidths[j] > 0.0)) throw Error("density: bandwidths must be positive");
    if (grid_sizes[j] == 1) throw Error("density: a grid dimension needs at least two values");
  }
  DensityModel m;
  m.points_ = std::move(points);
  m.bandwidths_ = std::move(bandwidths);
  m.grid_sizes_ = std::move(grid_sizes);
  m.log_norms_.resize(m.bandwidths_.size());
  for (std::size_t j = 0; j < m.bandwidths_.size(); ++j) {
    const std::size_t g = m.grid_sizes_[j];
    if (g == 0) continue;
    auto& norms = m.log_norms_[j];
    norms.reserve(m.points_.size());
    std::vector<double> w(g);
    for (const auto& p : m.points_) {
      for (std::size_t k = 0; k < g; ++k) {
        const double z = (grid_coordinate(k, g) - p[static_cast<Eigen::Index>(j)]) / m.bandwidths_[j];
        w[k] = -0.5 * z * z;
      }
      norms.push_back(log_sum_exp(w));
    }
  }
  return m;
}

std::vector<double> DensityModel::grid_log_weights(std::size_t dim, double center) const {
  const std::size_t g = grid_sizes_[dim];
  const double h = bandwidths_[dim];
  std::vector<double> w(g);
  for (std::size_t k = 0; k < g; ++k) {
    const double z = (grid_coordinate(k, g) - center) / h;
    w[k] = -0.5 * z * z;
  }
  const double norm = log_sum_exp(w);
  for (double& v : w) v -= norm;
  return w;
}

double DensityModel::log_dimension_density(std::size_t dim, double value) const {
  const auto jj = static_cast<Eigen::Index>(dim);
  const double h = bandwidths_[dim];
  std::vector<double> terms;
  terms.reserve(points_.size());
  if (grid_sizes_[dim] == 0) {
    for (const auto& p : points_) {
      const double z = (value - p[jj]) / h;
      terms.push_back(kLogInvSqrt2Pi - 0.5 * z * z);
    }
    return log_sum_exp(terms) - std::log(static_cast<double>(points_.size()) * h);
  }
  const std::size_t g = grid_sizes_[dim];
  const double gk = grid_coordinate(nearest_grid_index(value, g), g);
  const auto& norms = log_norms_[dim];
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double z = (gk - points_[i][jj]) / h;
    terms.push_back(-0.5 * z * z - norms[i]);
  }
  return log_sum_exp(terms) - std::log(static_cast<double>(points_.size()));
}

double DensityModel::log_density(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) throw DimensionMismatch("density: query dimension");
  double total = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) total += log_dimension_density(j, x[static_cast<Eigen::Index>(j)]);
  return total;
}

Eigen::VectorXd DensityModel::sample(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, points_.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd out(static_cast<Eigen::Index>(dim()));
  for (std::size_t j = 0; j < dim(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double h = bandwidths_[j];
    if (grid_sizes_[j] == 0) {
      double v = std::numeric_limits<double>::quiet_NaN();
      for (int t = 0; t < kMaxTruncationTries; ++t) {
        const double draw = points_[pick(rng)][jj] + h * normal(rng);
        if (draw >= 0.0 && draw <= 1.0) {
          v = draw;
          break;
        }
        v = std::clamp(draw, 0.0, 1.0);
      }
      out[jj] = v;
    } else {
      const std::size_t g = grid_sizes_[j];
      const std::vector<double> logw = grid_log_weights(j, points_[pick(rng)][jj]);
      const double u = unit(rng);
      double acc = 0.0;
      std::size_t k = g - 1;
      for (std::size_t q = 0; q < g; ++q) {
        acc += std::exp(logw[q]);
        if (u < acc) {
          k = q;
          break;
        }
      }
      out[jj] = grid_coordinate(k, g);
    }
  }
  return out;
}

double parzen_density(const DensityModel& model, const Eigen::VectorXd& x) {
  return std::exp(model.log_density(x));
}

Configuration sample_from_density(const DensityModel& model, const ParameterSpace& space, Rng& rng) {
  return decode(model.sample(rng), space);
}

double log_acquisition_ratio(const Eigen::VectorXd& x, const DensityModel& good,
                             const DensityModel& bad) {
  return good.log_density(x) - bad.log_density(x);
}

double acquisition_ratio(const Eigen::VectorXd& x, const DensityModel& good, const DensityModel& bad) {
  const double r = std::exp(log_acquisition_ratio(x, good, bad));
  return std::min(r, std::numeric_limits<double>::max());
}

TpeModel build_tpe(std::span<const ScoredConfig> history, double gamma, const ParameterSpace& space) {
  std::vector<double> foms;
  foms.reserve(history.size());
  for (const auto& h : history) foms.push_back(h.fom);
  TpeSplit split = split_by_threshold(foms, gamma);
  Points good;
  Points bad;
  for (std::size_t i : split.good) good.push_back(encode(history[i].config, space));
  for (std::size_t i : split.bad) bad.push_back(encode(history[i].config, space));
  return TpeModel{std::move(split), DensityModel::fit(std::move(good), space),
                  DensityModel::fit(std::move(bad), space)};
}

Configuration propose_next(std::span<const ScoredConfig> history, double gamma,
                           std::size_t n_candidates, const ParameterSpace& space, Rng& rng) {
  if (history.size() < 2) return sample_uniform(space, rng);
  if (n_candidates == 0) throw Error("propose_next needs at least one candidate");
  const TpeModel tpe = build_tpe(history, gamma, space);
  Configuration best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n_candidates; ++c) {
    Configuration cand = sample_from_density(tpe.good, space, rng);
    const double score = log_acquisition_ratio(encode(cand, space), tpe.good, tpe.bad);
    if (c == 0 || score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  return best;
}

std::vector<Configuration> sample_good_density(std::span<const ScoredConfig> history, double gamma,
                                               std::size_t count, const ParameterSpace& space,
                                               Rng& rng) {
  std::vector<Configuration> out;
  out.reserve(count);
  if (history.size() < 2) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(sample_uniform(space, rng));
    return out;
  }
  const TpeModel tpe = build_tpe(history, gamma, space);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_from_density(tpe.good, space, rng));
  return out;
}

}  // namespace cbo
