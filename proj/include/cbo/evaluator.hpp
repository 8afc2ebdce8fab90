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

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include "cbo/objective.hpp"
#include "cbo/space.hpp"

namespace cbo {

/// Cheap (pre-layout) or expensive (post-layout) simulation.
enum class Fidelity { kPre, kPost };

const char* to_string(Fidelity f);
/// Parses "pre" / "post"; throws Error otherwise.
Fidelity parse_fidelity(const std::string& s);

enum class EvalStatus { kOk, kTimeout, kEvalError };

const char* to_string(EvalStatus s);
EvalStatus parse_status(const std::string& s);

struct EvalRequest {
  std::uint64_t id = 0;
  Fidelity fidelity = Fidelity::kPre;
  /// Parameter values keyed by name, in the space's canonical order.
  std::vector<std::pair<std::string, double>> config;
};

struct EvalResponse {
  std::uint64_t id = 0;
  MetricSet metrics;
  std::string diagnostics;
};

struct EvalOutcome {
  EvalStatus status = EvalStatus::kOk;
  MetricSet metrics;
  std::string diagnostics;
  double duration_ms = 0.0;
};

EvalRequest make_request(std::uint64_t id, Fidelity fidelity, const Configuration& config,
                         const ParameterSpace& space);

/// One-line JSON encoding: {"id":7,"fidelity":"post","config":{"w1":2.5,"nf1":4}}.
std::string encode_request_line(const EvalRequest& request);
EvalRequest decode_request_line(const std::string& line);
std::string encode_response_line(const EvalResponse& response);

/// Parses {"id":7,"metrics":{...}} and checks that the id echoes `expected_id` and every metric is a
/// finite number. Throws Error naming the offending field.
EvalResponse decode_response_line(const std::string& line, std::uint64_t expected_id);

/// Black box evaluated at either fidelity. Implementations must be safe to call from two threads.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual EvalOutcome evaluate(const EvalRequest& request) = 0;
};

/// Per-fidelity latency: fixed + uniform(-jitter, +jitter) seconds, multiplied by `speed_factor`.
struct LatencyModel {
  double pre_fixed_s = 0.0;
  double pre_jitter_s = 0.0;
  double post_fixed_s = 0.0;
  double post_jitter_s = 0.0;
  double speed_factor = 0.0;

  /// Stage timings of the OTA flow: pre 25 +/- 5 s; layout 70 +/- 50 s plus post 80 +/- 15 s.
  static LatencyModel circuit_flow(double speed_factor);
  /// Deterministic in (seed, request id).
  double delay_ms(Fidelity f, std::uint64_t seed, std::uint64_t request_id) const;
};

struct BenchmarkDef;

/// Evaluates a builtin benchmark in-process. The reported duration is the injected latency, so
/// records stay reproducible.
class BuiltinEvaluator : public Evaluator {
 public:
  BuiltinEvaluator(std::shared_ptr<const BenchmarkDef> benchmark, LatencyModel latency = {},
                   std::uint64_t latency_seed = 0);
  EvalOutcome evaluate(const EvalRequest& request) override;

 private:
  std::shared_ptr<const BenchmarkDef> benchmark_;
  LatencyModel latency_;
  std::uint64_t latency_seed_;
};

/// Spawns `sh -c command` per request, writes one request line to its stdin and reads one
/// response line from its stdout under a wall-clock timeout.
class SubprocessEvaluator : public Evaluator {
 public:
  SubprocessEvaluator(std::string command, double timeout_pre_s = 60.0, double timeout_post_s = 240.0,
                      int max_concurrent = 2);
  EvalOutcome evaluate(const EvalRequest& request) override;

 private:
  std::string command_;
  double timeout_pre_s_;
  double timeout_post_s_;
  std::counting_semaphore<64> slots_;
};

/// One subprocess call, outside any evaluator.
EvalOutcome evaluate_subprocess(const std::string& command, const EvalRequest& request,
                                double timeout_s);

/// Test harness wrapper: forces a timeout on every `period`-th expensive call (1-based ordinal,
/// counted in call order) and optionally sleeps a pseudo-random extra latency before delegating.
class FaultInjectingEvaluator : public Evaluator {
 public:
  FaultInjectingEvaluator(std::shared_ptr<Evaluator> inner, std::size_t timeout_period,
                          double max_extra_latency_ms = 0.0, std::uint64_t latency_seed = 0);
  EvalOutcome evaluate(const EvalRequest& request) override;

  /// Request ids of the calls that were forced to time out.
  std::vector<std::uint64_t> forced_timeouts() const;

 private:
  std::shared_ptr<Evaluator> inner_;
  std::size_t period_;
  double max_extra_latency_ms_;
  std::uint64_t latency_seed_;
  std::atomic<std::size_t> post_calls_{0};
  mutable std::mutex mutex_;
  std::vector<std::uint64_t> forced_;
};

}  // namespace cbo
