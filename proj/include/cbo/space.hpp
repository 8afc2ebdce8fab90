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
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cbo {

using Rng = std::mt19937_64;

/// Encoded configurations, one unit-cube vector each.
using Points = std::vector<Eigen::VectorXd>;

enum class ParamKind { kContinuous, kQuantized, kInteger };

const char* to_string(ParamKind kind);

/// One sizing parameter. Quantized and integer parameters live on the grid
/// lo, lo + step, ..., hi (step is 1 for integers, 0 for continuous).
struct ParameterSpec {
  std::string name;
  ParamKind kind = ParamKind::kContinuous;
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.0;
  std::string units;

  static ParameterSpec continuous(std::string name, double lo, double hi, std::string units = "");
  static ParameterSpec quantized(std::string name, double lo, double hi, double step,
                                 std::string units = "");
  static ParameterSpec integer(std::string name, double lo, double hi, std::string units = "");

  bool is_discrete() const noexcept { return kind != ParamKind::kContinuous; }
  double grid_step() const noexcept;
  /// Number of grid points; 0 for continuous parameters.
  std::size_t grid_size() const noexcept;
  /// Value of grid point k. Always computed as lo + k * step so snapped values are reproducible.
  double grid_value(std::size_t k) const noexcept;
  /// Grid spacing in encoded [0, 1] units; 0 for continuous parameters.
  double encoded_step() const noexcept;

  bool operator==(const ParameterSpec&) const = default;
};

/// Clamp to [lo, hi]; discrete kinds round to the nearest grid point with ties rounding up.
double snap(double value, const ParameterSpec& spec);

/// One assignment of every parameter, in the space's canonical order.
struct Configuration {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const Configuration&) const = default;
};

class ParameterSpace {
 public:
  /// Empty space; only useful as a placeholder before assignment.
  ParameterSpace() = default;

  /// Validates and builds a space. Throws SpaceError naming the offending parameter.
  static ParameterSpace validate(std::vector<ParameterSpec> specs);

  const std::vector<ParameterSpec>& specs() const noexcept { return specs_; }
  const ParameterSpec& spec(std::size_t i) const { return specs_.at(i); }
  std::size_t size() const noexcept { return specs_.size(); }
  /// Index of a named parameter, or size() when absent.
  std::size_t index_of(const std::string& name) const noexcept;

  /// Throws SpaceError if the configuration has the wrong length, leaves a bound or a grid.
  void check(const Configuration& config) const;
  bool contains(const Configuration& config) const noexcept;

  bool operator==(const ParameterSpace&) const = default;

 private:
  explicit ParameterSpace(std::vector<ParameterSpec> specs) : specs_(std::move(specs)) {}

  std::vector<ParameterSpec> specs_;
};

Configuration sample_uniform(const ParameterSpace& space, Rng& rng);

/// Affine map of every coordinate onto [0, 1].
Eigen::VectorXd encode(const Configuration& config, const ParameterSpace& space);

/// Inverse of encode followed by snap; out-of-range coordinates are clamped.
Configuration decode(const Eigen::VectorXd& unit, const ParameterSpace& space);

}  // namespace cbo
