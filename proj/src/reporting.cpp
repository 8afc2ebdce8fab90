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

#include "cbo/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbo/error.hpp"
#include "cbo/problem_config.hpp"

namespace cbo {
namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::vector<TraceRow> best_so_far(std::span<const HistoryRecord> records) {
  std::vector<TraceRow> rows;
  std::optional<double> pre, post;
  for (const auto& r : records) {
    auto& best = r.fidelity == Fidelity::kPre ? pre : post;
    if (r.status == EvalStatus::kOk && r.effective && (!best || *r.effective > *best)) best = r.effective;
    rows.push_back({r.iter, r.fidelity, pre, post});
  }
  return rows;
}

std::string trace_csv(std::span<const TraceRow> rows) {
  std::string out = "iter,fidelity,best_pre_so_far,best_post_so_far\n";
  for (const auto& r : rows) {
    out += std::to_string(r.iter) + ',' + to_string(r.fidelity) + ',' + format_optional(r.best_pre) +
           ',' + format_optional(r.best_post) + '\n';
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::string suite_csv(std::span<const SuiteRow> rows) {
  std::string out = "benchmark,method,interval,seeds,n_pre,n_post,failed_runs,median,q25,q75,iqr\n";
  for (const auto& r : rows) {
    out += r.benchmark + ',' + r.method + ',' + (r.interval ? std::to_string(r.interval) : "") + ',' +
           std::to_string(r.seeds) + ',' + std::to_string(r.n_pre) + ',' + std::to_string(r.n_post) +
           ',' + std::to_string(r.failed_runs) + ',' + format_double(r.median) + ',' +
           format_double(r.q25) + ',' + format_double(r.q75) + ',' + format_double(r.iqr) + '\n';
  }
  return out;
}

std::vector<SuiteCase> suite_cases(const std::string& suite) {
  const SuiteCase bowl{"two_fidelity_bowl", 120, {4, 2}};
  const SuiteCase ota{"synthetic_ota", 160, {10, 5}};
  const SuiteCase ldo{"synthetic_ldo", 120, {4, 2}};
  if (suite == "bowl") return {bowl};
  if (suite == "ota") return {ota};
  if (suite == "ldo") return {ldo};
  if (suite == "all") return {bowl, ota, ldo};
  throw ConfigError("suite: expected bowl, ota, ldo or all, got '" + suite + "'");
}

std::vector<SuiteRow> run_suite(const std::string& suite, std::size_t seeds, double speed_factor,
                                const std::function<void(const std::string&)>& progress) {
  if (seeds == 0) throw ConfigError("seeds: must be >= 1");
  std::vector<SuiteRow> rows;
  for (const auto& c : suite_cases(suite)) {
    auto collect = [&](Method method, std::size_t interval) {
      SuiteRow row;
      row.benchmark = c.benchmark;
      row.method = to_string(method);
      row.interval = method == Method::kPlain ? 0 : interval;
      row.seeds = seeds;
      std::vector<double> finals;
      for (std::size_t seed = 1; seed <= seeds; ++seed) {
        RunConfig cfg = builtin_run_config(c.benchmark, c.n_pre, interval, seed);
        cfg.evaluator = make_evaluator(cfg.binding, speed_factor, seed);
        if (progress) {
          progress(c.benchmark + " " + row.method +
                   (row.interval ? " interval=" + std::to_string(interval) : "") + " seed=" +
                   std::to_string(seed));
        }
        try {
          const RunResult result = run_method(cfg, method, cfg.expensive_budget());
          row.n_pre = result.n_pre_evaluated;
          row.n_post = result.n_post_evaluated;
          if (result.best) finals.push_back(result.best->effective);
        } catch (const RunAbortedError&) {
          ++row.failed_runs;
        }
      }
      if (!finals.empty()) {
        row.median = quantile(finals, 0.5);
        row.q25 = quantile(finals, 0.25);
        row.q75 = quantile(finals, 0.75);
        row.iqr = row.q75 - row.q25;
      } else {
        row.median = row.q25 = row.q75 = row.iqr = std::nan("");
      }
      rows.push_back(row);
    };
    for (std::size_t interval : c.intervals) collect(Method::kCoupled, interval);
    collect(Method::kPlain, c.intervals.front());
    for (std::size_t interval : c.intervals) collect(Method::kFusion, interval);
  }
  return rows;
}

}  // namespace cbo
