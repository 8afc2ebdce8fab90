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

#include <string>

#include <json.hpp>

#include "cbo/orchestrator.hpp"

namespace cbo {

/// Parses a problem config (JSON). Unknown keys are rejected. Errors are ConfigError with
/// "<source>:<line>: <field>: <reason>" messages.
///
/// Layout:
///   space:     [{name, kind: continuous|quantized|integer, lo, hi, step?, units?}, ...]
///   fom:       {terms: [{metric, coef?, transform?: identity|log10}], constraints?: [{metric, lo, hi, weight?}]}
///   evaluator: {builtin} or {command, timeout_pre_s?, timeout_post_s?, max_concurrent?}
///   run:       {n_pre, interval, n_init?, seed?, gamma_alpha?, gamma_beta?, n_candidates?, n_post?}
/// With a builtin evaluator, `space` and `fom` default to the benchmark's own.
RunConfig parse_problem_config(const std::string& text, const std::string& source = "<config>");

RunConfig load_problem_config(const std::string& path);

/// Default run for a builtin benchmark.
RunConfig builtin_run_config(const std::string& benchmark, std::size_t n_pre, std::size_t interval,
                             std::uint64_t seed);

/// Everything that determines a run, for provenance in summaries.
nlohmann::ordered_json run_config_to_json(const RunConfig& cfg);

}  // namespace cbo
