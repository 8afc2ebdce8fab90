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

#include "cbo/objective.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cbo/error.hpp"

namespace cbo {

const char* to_string(Transform t) {
  return t == Transform::kLog10 ? "log10" : "identity";
}

void FomSpec::validate() const {
  if (terms.empty()) throw ConfigError("fom: at least one term is required");
  for (const auto& c : constraints) {
    if (!(c.lo < c.hi)) {
      throw ConfigError("fom: constraint on '" + c.metric + "' has lo >= hi");
    }
    if (!(c.weight >= 0.0)) {
      throw ConfigError("fom: constraint on '" + c.metric + "' has negative weight");
    }
  }
}

std::vector<std::string> FomSpec::referenced_metrics() const {
  std::vector<std::string> names;
  std::set<std::string> seen;
  auto add = [&](const std::string& n) {
    if (seen.insert(n).second) names.push_back(n);
  };
  for (const auto& t : terms) add(t.metric);
  for (const auto& c : constraints) add(c.metric);
  return names;
}

double term_value(double metric, Transform transform, double coefficient,
                  std::string_view metric_name) {
  switch (transform) {
    case Transform::kIdentity:
      return coefficient * metric;
    case Transform::kLog10:
      if (!(metric > 0.0)) {
        throw MetricError("log10 term needs a positive value for metric '" +
                              std::string(metric_name) + "'",
                          std::string(metric_name));
      }
      return coefficient * std::log10(metric);
  }
  return 0.0;
}

double constraint_violation(double metric, double thres_low, double thres_high) {
  const double raw = std::max(thres_high, metric) - std::min(thres_low, metric);
  return raw - (thres_high - thres_low);
}

namespace {

double lookup(const MetricSet& metrics, const std::string& name) {
  const auto it = metrics.find(name);
  if (it == metrics.end()) throw MetricError("missing metric '" + name + "'", name);
  return it->second;
}

}  // namespace

FomResult effective_fom(const MetricSet& metrics, const FomSpec& spec) {
  FomResult r;
  for (const auto& t : spec.terms) {
    const double v = term_value(lookup(metrics, t.metric), t.transform, t.coef, t.metric);
    r.terms.push_back({t.metric, v});
    r.raw_fom += v;
  }
  double penalty = 0.0;
  for (const auto& c : spec.constraints) {
    ConstraintBreakdown b;
    b.metric = c.metric;
    b.metric_value = lookup(metrics, c.metric);
    b.raw_penalty = std::max(c.hi, b.metric_value) - std::min(c.lo, b.metric_value);
    b.violation = constraint_violation(b.metric_value, c.lo, c.hi);
    b.weighted = c.weight * b.violation;
    r.violation += b.violation;
    penalty += b.weighted;
    r.constraints.push_back(std::move(b));
  }
  r.effective = r.raw_fom - penalty;
  return r;
}

}  // namespace cbo
