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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbo/history_io.hpp"
#include "cbo/orchestrator.hpp"

namespace cbo {

struct TraceRow {
  std::size_t iter = 0;
  Fidelity fidelity = Fidelity::kPre;
  std::optional<double> best_pre;
  std::optional<double> best_post;
};

/// Running maxima of the effective FOM at each fidelity, one row per record.
std::vector<TraceRow> best_so_far(std::span<const HistoryRecord> records);

/// CSV with header `iter,fidelity,best_pre_so_far,best_post_so_far`; missing values are empty.
std::string trace_csv(std::span<const TraceRow> rows);

/// Linear-interpolation quantile (type 7). Throws Error on an empty sample.
double quantile(std::vector<double> values, double q);

struct SuiteRow {
  std::string benchmark;
  std::string method;
  /// 0 when the method has no interval.
  std::size_t interval = 0;
  std::size_t seeds = 0;
  std::size_t n_pre = 0;
  std::size_t n_post = 0;
  std::size_t failed_runs = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
};

std::string suite_csv(std::span<const SuiteRow> rows);

struct SuiteCase {
  std::string benchmark;
  std::size_t n_pre = 0;
  std::vector<std::size_t> intervals;
};

/// Benchmarks and budgets of a suite: bowl, ota, ldo or all. Throws ConfigError otherwise.
std::vector<SuiteCase> suite_cases(const std::string& suite);

/// Coupled at every interval, plain, and fusion with n_train equal to each interval's budget,
/// each over seeds 1..seeds. Rows follow (benchmark, method, interval) order.
std::vector<SuiteRow> run_suite(const std::string& suite, std::size_t seeds, double speed_factor = 0.0,
                                const std::function<void(const std::string&)>& progress = {});

}  // namespace cbo
