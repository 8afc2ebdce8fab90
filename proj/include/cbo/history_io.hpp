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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbo/evaluator.hpp"
#include "cbo/orchestrator.hpp"

namespace cbo {

/// One line of history.jsonl. Failed observations have no metrics and no FOM fields.
struct HistoryRecord {
  std::size_t iter = 0;
  Fidelity fidelity = Fidelity::kPre;
  std::vector<std::pair<std::string, double>> config;
  MetricSet metrics;
  std::optional<double> fom;
  std::optional<double> violation;
  std::optional<double> effective;
  EvalStatus status = EvalStatus::kOk;
  double duration_ms = 0.0;

  bool operator==(const HistoryRecord&) const = default;
};

HistoryRecord to_record(const Observation& obs, const ParameterSpace& space);

std::string encode_history_line(const HistoryRecord& record);
/// Throws ConfigError naming the offending field.
HistoryRecord decode_history_line(const std::string& line);

std::string encode_history(std::span<const HistoryRecord> records);
/// Throws ConfigError with "<source>:<line>: ..." for the first malformed line. Blank lines are skipped.
std::vector<HistoryRecord> decode_history(const std::string& text, const std::string& source = "<history>");

std::vector<HistoryRecord> read_history_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cbo
