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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cbo {

/// Metric name -> value. Ordered so that serialized metric sets are stable.
using MetricSet = std::map<std::string, double>;

enum class Transform { kIdentity, kLog10 };

const char* to_string(Transform t);

struct FomTerm {
  std::string metric;
  double coef = 1.0;
  Transform transform = Transform::kIdentity;
};

/// Threshold constraint thres_low <= metric <= thres_high, penalized with weight `weight`.
struct FomConstraint {
  std::string metric;
  double lo = 0.0;
  double hi = 0.0;
  double weight = 1.0;
};

struct FomSpec {
  std::vector<FomTerm> terms;
  std::vector<FomConstraint> constraints;

  /// Throws ConfigError on an empty term list, inverted thresholds or a negative weight.
  void validate() const;
  /// Every metric name referenced by a term or a constraint, without duplicates.
  std::vector<std::string> referenced_metrics() const;
};

struct TermBreakdown {
  std::string metric;
  double value = 0.0;
};

struct ConstraintBreakdown {
  std::string metric;
  double metric_value = 0.0;
  /// max(hi, m) - min(lo, m), un-normalized.
  double raw_penalty = 0.0;
  double violation = 0.0;
  double weighted = 0.0;
};

struct FomResult {
  double raw_fom = 0.0;
  /// Sum of per-constraint violations, unweighted.
  double violation = 0.0;
  double effective = 0.0;
  std::vector<TermBreakdown> terms;
  std::vector<ConstraintBreakdown> constraints;
};

/// coefficient * transform(metric). Throws MetricError for a non-positive metric under log10.
double term_value(double metric, Transform transform, double coefficient,
                  std::string_view metric_name = {});

/// Threshold penalty shifted so that in-range metrics score exactly zero.
double constraint_violation(double metric, double thres_low, double thres_high);

/// Throws MetricError naming the first referenced metric absent from `metrics`.
FomResult effective_fom(const MetricSet& metrics, const FomSpec& spec);

}  // namespace cbo
