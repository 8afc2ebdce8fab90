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

#include "cbo/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cbo/error.hpp"

namespace cbo {

namespace {

// Relative slack when checking that (hi - lo) / step is whole.
constexpr double kGridTolerance = 1e-9;

}  // namespace

const char* to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::kContinuous:
      return "continuous";
    case ParamKind::kQuantized:
      return "quantized";
    case ParamKind::kInteger:
      return "integer";
  }
  return "unknown";
}

ParameterSpec ParameterSpec::continuous(std::string name, double lo, double hi, std::string units) {
  return ParameterSpec{std::move(name), ParamKind::kContinuous, lo, hi, 0.0, std::move(units)};
}

ParameterSpec ParameterSpec::quantized(std::string name, double lo, double hi, double step,
                                       std::string units) {
  return ParameterSpec{std::move(name), ParamKind::kQuantized, lo, hi, step, std::move(units)};
}

ParameterSpec ParameterSpec::integer(std::string name, double lo, double hi, std::string units) {
  return ParameterSpec{std::move(name), ParamKind::kInteger, lo, hi, 1.0, std::move(units)};
}

double ParameterSpec::grid_step() const noexcept {
  switch (kind) {
    case ParamKind::kContinuous:
      return 0.0;
    case ParamKind::kInteger:
      return 1.0;
    case ParamKind::kQuantized:
      return step;
  }
  return 0.0;
}

std::size_t ParameterSpec::grid_size() const noexcept {
  if (!is_discrete()) return 0;
  return static_cast<std::size_t>(std::llround((hi - lo) / grid_step())) + 1;
}

double ParameterSpec::grid_value(std::size_t k) const noexcept {
  if (k + 1 == grid_size()) return hi;
  return lo + static_cast<double>(k) * grid_step();
}

double ParameterSpec::encoded_step() const noexcept {
  return is_discrete() ? grid_step() / (hi - lo) : 0.0;
}

double snap(double value, const ParameterSpec& spec) {
  if (std::isnan(value)) value = spec.lo;
  const double clamped = std::clamp(value, spec.lo, spec.hi);
  if (!spec.is_discrete()) return clamped;
  const double position = (clamped - spec.lo) / spec.grid_step();
  const auto last = static_cast<double>(spec.grid_size() - 1);
  const double k = std::clamp(std::floor(position + 0.5), 0.0, last);
  return spec.grid_value(static_cast<std::size_t>(k));
}

ParameterSpace ParameterSpace::validate(std::vector<ParameterSpec> specs) {
  if (specs.empty()) throw SpaceError("parameter space needs at least one parameter", "");
  std::set<std::string> seen;
  for (const auto& s : specs) {
    if (s.name.empty()) throw SpaceError("parameter with empty name", s.name);
    if (!seen.insert(s.name).second) {
      throw SpaceError("duplicate parameter name '" + s.name + "'", s.name);
    }
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi)) {
      throw SpaceError("non-finite bounds for '" + s.name + "'", s.name);
    }
    if (!(s.lo < s.hi)) throw SpaceError("inverted bounds for '" + s.name + "'", s.name);
    switch (s.kind) {
      case ParamKind::kContinuous:
        break;
      case ParamKind::kInteger:
        if (s.lo != std::floor(s.lo) || s.hi != std::floor(s.hi)) {
          throw SpaceError("integer parameter '" + s.name + "' has fractional bounds", s.name);
        }
        if (s.step != 1.0) {
          throw SpaceError("integer parameter '" + s.name + "' must have step 1", s.name);
        }
        break;
      case ParamKind::kQuantized: {
        if (!(s.step > 0.0) || !std::isfinite(s.step)) {
          throw SpaceError("quantized parameter '" + s.name + "' needs a positive step", s.name);
        }
        const double cells = (s.hi - s.lo) / s.step;
        if (std::fabs(cells - std::round(cells)) > kGridTolerance * std::max(1.0, cells)) {
          throw SpaceError("step of '" + s.name + "' does not divide its range", s.name);
        }
        break;
      }
    }
  }
  return ParameterSpace(std::move(specs));
}

std::size_t ParameterSpace::index_of(const std::string& name) const noexcept {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].name == name) return i;
  }
  return specs_.size();
}

void ParameterSpace::check(const Configuration& config) const {
  if (config.size() != specs_.size()) {
    throw SpaceError("configuration has " + std::to_string(config.size()) + " values, space has " +
                         std::to_string(specs_.size()),
                     "");
  }
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& s = specs_[i];
    const double v = config[i];
    if (!(v >= s.lo && v <= s.hi)) {
      throw SpaceError("value of '" + s.name + "' out of bounds", s.name);
    }
    if (s.is_discrete() && snap(v, s) != v) {
      throw SpaceError("value of '" + s.name + "' is not on its grid", s.name);
    }
  }
}

bool ParameterSpace::contains(const Configuration& config) const noexcept {
  try {
    check(config);
    return true;
  } catch (const SpaceError&) {
    return false;
  }
}

Configuration sample_uniform(const ParameterSpace& space, Rng& rng) {
  Configuration c;
  c.values.reserve(space.size());
  for (const auto& s : space.specs()) {
    if (s.is_discrete()) {
      std::uniform_int_distribution<std::size_t> pick(0, s.grid_size() - 1);
      c.values.push_back(s.grid_value(pick(rng)));
    } else {
      std::uniform_real_distribution<double> u(s.lo, s.hi);
      c.values.push_back(u(rng));
    }
  }
  return c;
}

Eigen::VectorXd encode(const Configuration& config, const ParameterSpace& space) {
  if (config.size() != space.size()) {
    throw DimensionMismatch("encode: configuration length " + std::to_string(config.size()) +
                            " does not match space size " + std::to_string(space.size()));
  }
  Eigen::VectorXd u(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& s = space.spec(i);
    u[static_cast<Eigen::Index>(i)] = (config[i] - s.lo) / (s.hi - s.lo);
  }
  return u;
}

Configuration decode(const Eigen::VectorXd& unit, const ParameterSpace& space) {
  if (static_cast<std::size_t>(unit.size()) != space.size()) {
    throw DimensionMismatch("decode: vector length does not match space size");
  }
  Configuration c;
  c.values.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& s = space.spec(i);
    const double u = unit[static_cast<Eigen::Index>(i)];
    c.values.push_back(snap(s.lo + u * (s.hi - s.lo), s));
  }
  return c;
}

}  // namespace cbo
