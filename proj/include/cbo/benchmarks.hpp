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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbo/evaluator.hpp"
#include "cbo/objective.hpp"
#include "cbo/space.hpp"

namespace cbo {

/// Closed-form two-fidelity test problem.
struct BenchmarkDef {
  std::string name;
  ParameterSpace space;
  FomSpec fom;
  /// Metric that carries the pre/post gap (the "gain" of a circuit).
  std::string primary_metric;
  std::function<MetricSet(const Configuration&, Fidelity)> evaluate;
  std::optional<double> known_post_optimum;
  std::optional<Configuration> known_post_argmax;
};

/// Names of every builtin benchmark: two_fidelity_bowl, synthetic_ota, synthetic_ldo.
std::vector<std::string> builtin_benchmark_names();

/// Throws UnknownBenchmarkError.
std::shared_ptr<const BenchmarkDef> builtin_benchmark(const std::string& name);

/// Throws UnknownBenchmarkError or SpaceError for an illegal configuration.
MetricSet evaluate_builtin(const std::string& name, const Configuration& config, Fidelity fidelity);

}  // namespace cbo
