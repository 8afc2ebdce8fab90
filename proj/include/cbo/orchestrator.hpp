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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbo/evaluator.hpp"
#include "cbo/objective.hpp"
#include "cbo/space.hpp"

namespace cbo {

/// Where evaluations come from: a builtin benchmark name or an external command.
struct EvaluatorBinding {
  std::string builtin;
  std::string command;
  double timeout_pre_s = 60.0;
  double timeout_post_s = 240.0;
  int max_concurrent = 2;
};

/// Resolves a binding. Builtin latencies follow LatencyModel::circuit_flow(speed_factor).
/// Throws UnknownBenchmarkError for an unknown builtin and ConfigError for an empty binding.
std::shared_ptr<Evaluator> make_evaluator(const EvaluatorBinding& binding, double speed_factor = 0.0,
                                          std::uint64_t latency_seed = 0);

struct RunConfig {
  ParameterSpace space;
  FomSpec fom;
  EvaluatorBinding binding;
  /// Takes precedence over `binding` when set (tests, fault injection).
  std::shared_ptr<Evaluator> evaluator;

  std::size_t n_pre = 160;
  std::size_t interval = 10;
  /// Expensive budget; defaults to floor(n_pre / interval).
  std::optional<std::size_t> n_post;
  std::size_t n_init = 10;
  std::uint64_t seed = 0;
  double gamma_alpha = 0.5;
  double gamma_beta = 0.15;
  std::size_t n_candidates = 64;
  /// Expensive-pool composition for each beta iteration.
  std::size_t beta_pool_size = 64;
  std::size_t beta_perturbations = 8;
  double beta_perturbation_sigma = 0.05;
  /// Run the two loops on separate threads. Results are identical either way.
  bool asynchronous = true;

  std::size_t expensive_budget() const;
  /// Throws ConfigError.
  void validate() const;
};

struct Observation {
  std::size_t index = 0;
  /// Logical step; both halves of a co-observation share it.
  std::size_t iter = 0;
  Fidelity fidelity = Fidelity::kPre;
  Configuration config;
  MetricSet metrics;
  FomResult fom;
  double duration_ms = 0.0;
  EvalStatus status = EvalStatus::kOk;
  std::uint64_t request_id = 0;
  std::string diagnostics;

  bool ok() const noexcept { return status == EvalStatus::kOk; }
};

struct Incumbent {
  Configuration config;
  double effective = 0.0;
  std::size_t index = 0;
};

/// Best ok expensive observation; ties go to the earliest index. Throws NoIncumbentError.
Incumbent incumbent(std::span<const Observation> history);

enum class Method { kCoupled, kPlain, kFusion };

const char* to_string(Method m);
Method parse_method(const std::string& s);

struct RunResult {
  Method method = Method::kCoupled;
  std::vector<Observation> history;
  std::optional<Incumbent> best;
  /// Running best effective FOM per observation of each fidelity (nullopt until the first ok one).
  std::vector<std::optional<double>> best_pre_trace;
  std::vector<std::optional<double>> best_post_trace;
  /// Correlation used by each beta iteration.
  std::vector<double> rho_trace;
  std::size_t n_pre_evaluated = 0;
  std::size_t n_post_evaluated = 0;
  std::size_t n_post_failed = 0;
  double wall_time_s = 0.0;
};

enum class StepKind { kAlpha, kBeta, kBetaOnly };

/// Logical schedule. With the default budget, step i (1-based) is a beta step iff i % interval == 0.
/// An explicit expensive budget spreads beta steps evenly; beyond n_pre they become expensive-only.
std::vector<StepKind> build_schedule(std::size_t n_pre, std::size_t interval,
                                     std::optional<std::size_t> n_post);

/// Coupled optimization: cheap TPE exploration, expensive GP exploitation through the joint model.
RunResult run_coupled(const RunConfig& cfg);

/// Cheap-only TPE for n_pre iterations, then one expensive evaluation of the best cheap config.
RunResult run_plain_baseline(const RunConfig& cfg);

/// Cheap-only TPE, then the top n_train cheap configs at expensive fidelity, then n_train GP-EI
/// iterations over uniform candidate pools.
RunResult run_fusion_baseline(const RunConfig& cfg, std::size_t n_train);

RunResult run_method(const RunConfig& cfg, Method method, std::size_t n_train = 0);

/// Fills index, traces and counters of a result whose history is already in logical order.
void finalize_result(RunResult& result);

}  // namespace cbo
