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

#include "cbo/evaluator.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "cbo/benchmarks.hpp"
#include "cbo/error.hpp"

namespace cbo {

using ordered_json = nlohmann::ordered_json;

const char* to_string(Fidelity f) { return f == Fidelity::kPost ? "post" : "pre"; }

Fidelity parse_fidelity(const std::string& s) {
  if (s == "pre") return Fidelity::kPre;
  if (s == "post") return Fidelity::kPost;
  throw Error("unknown fidelity '" + s + "'");
}

const char* to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::kOk:
      return "ok";
    case EvalStatus::kTimeout:
      return "timeout";
    case EvalStatus::kEvalError:
      return "eval_error";
  }
  return "eval_error";
}

EvalStatus parse_status(const std::string& s) {
  if (s == "ok") return EvalStatus::kOk;
  if (s == "timeout") return EvalStatus::kTimeout;
  if (s == "eval_error") return EvalStatus::kEvalError;
  throw Error("unknown status '" + s + "'");
}

EvalRequest make_request(std::uint64_t id, Fidelity fidelity, const Configuration& config,
                         const ParameterSpace& space) {
  if (config.size() != space.size()) throw DimensionMismatch("make_request: configuration length");
  EvalRequest r{id, fidelity, {}};
  r.config.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) r.config.emplace_back(space.spec(i).name, config[i]);
  return r;
}

namespace {

ordered_json number_json(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

}  // namespace

std::string encode_request_line(const EvalRequest& request) {
  ordered_json j;
  j["id"] = request.id;
  j["fidelity"] = to_string(request.fidelity);
  ordered_json config = ordered_json::object();
  for (const auto& [name, value] : request.config) config[name] = number_json(value);
  j["config"] = std::move(config);
  return j.dump();
}

EvalRequest decode_request_line(const std::string& line) {
  const auto j = ordered_json::parse(line);
  EvalRequest r;
  r.id = j.at("id").get<std::uint64_t>();
  r.fidelity = parse_fidelity(j.at("fidelity").get<std::string>());
  for (const auto& [name, value] : j.at("config").items()) r.config.emplace_back(name, value.get<double>());
  return r;
}

std::string encode_response_line(const EvalResponse& response) {
  ordered_json j;
  j["id"] = response.id;
  ordered_json metrics = ordered_json::object();
  for (const auto& [name, value] : response.metrics) metrics[name] = value;
  j["metrics"] = std::move(metrics);
  if (!response.diagnostics.empty()) j["diagnostics"] = response.diagnostics;
  return j.dump();
}

EvalResponse decode_response_line(const std::string& line, std::uint64_t expected_id) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("response is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("response is not a JSON object");
  if (!j.contains("id") || !j["id"].is_number_unsigned()) throw Error("response field 'id' missing or not an unsigned integer");
  EvalResponse r;
  r.id = j["id"].get<std::uint64_t>();
  if (r.id != expected_id) {
    throw Error("response field 'id' is " + std::to_string(r.id) + ", expected " + std::to_string(expected_id));
  }
  if (!j.contains("metrics") || !j["metrics"].is_object()) throw Error("response field 'metrics' missing or not an object");
  for (const auto& [name, value] : j["metrics"].items()) {
    if (!value.is_number() || !std::isfinite(value.get<double>())) {
      throw Error("metric '" + name + "' is not a finite number");
    }
    r.metrics[name] = value.get<double>();
  }
  if (j.contains("diagnostics") && j["diagnostics"].is_string()) r.diagnostics = j["diagnostics"].get<std::string>();
  return r;
}

LatencyModel LatencyModel::circuit_flow(double speed_factor) {
  return LatencyModel{25.0, 5.0, 150.0, 65.0, speed_factor};
}

double LatencyModel::delay_ms(Fidelity f, std::uint64_t seed, std::uint64_t request_id) const {
  if (!(speed_factor > 0.0)) return 0.0;
  const double fixed = f == Fidelity::kPost ? post_fixed_s : pre_fixed_s;
  const double jitter = f == Fidelity::kPost ? post_jitter_s : pre_jitter_s;
  std::seed_seq seq{seed, request_id, static_cast<std::uint64_t>(f)};
  Rng rng(seq);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return std::max(0.0, (fixed + jitter * u(rng)) * speed_factor * 1000.0);
}

BuiltinEvaluator::BuiltinEvaluator(std::shared_ptr<const BenchmarkDef> benchmark, LatencyModel latency,
                                   std::uint64_t latency_seed)
    : benchmark_(std::move(benchmark)), latency_(latency), latency_seed_(latency_seed) {}

EvalOutcome BuiltinEvaluator::evaluate(const EvalRequest& request) {
  const auto& space = benchmark_->space;
  Configuration c;
  c.values.assign(space.size(), 0.0);
  std::vector<bool> seen(space.size(), false);
  for (const auto& [name, value] : request.config) {
    const std::size_t i = space.index_of(name);
    if (i == space.size()) {
      return {EvalStatus::kEvalError, {}, "unknown parameter '" + name + "'", 0.0};
    }
    c.values[i] = value;
    seen[i] = true;
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!seen[i]) return {EvalStatus::kEvalError, {}, "missing parameter '" + space.spec(i).name + "'", 0.0};
  }
  if (!space.contains(c)) return {EvalStatus::kEvalError, {}, "configuration outside the space", 0.0};

  const double delay = latency_.delay_ms(request.fidelity, latency_seed_, request.id);
  if (delay > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay));
  return {EvalStatus::kOk, benchmark_->evaluate(c, request.fidelity), {}, delay};
}

SubprocessEvaluator::SubprocessEvaluator(std::string command, double timeout_pre_s, double timeout_post_s,
                                         int max_concurrent)
    : command_(std::move(command)),
      timeout_pre_s_(timeout_pre_s),
      timeout_post_s_(timeout_post_s),
      slots_(std::clamp(max_concurrent, 1, 64)) {}

EvalOutcome SubprocessEvaluator::evaluate(const EvalRequest& request) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<64>& s;
    ~Release() { s.release(); }
  } release{slots_};
  const double timeout = request.fidelity == Fidelity::kPost ? timeout_post_s_ : timeout_pre_s_;
  return evaluate_subprocess(command_, request, timeout);
}

FaultInjectingEvaluator::FaultInjectingEvaluator(std::shared_ptr<Evaluator> inner, std::size_t timeout_period,
                                                 double max_extra_latency_ms, std::uint64_t latency_seed)
    : inner_(std::move(inner)),
      period_(timeout_period),
      max_extra_latency_ms_(max_extra_latency_ms),
      latency_seed_(latency_seed) {}

EvalOutcome FaultInjectingEvaluator::evaluate(const EvalRequest& request) {
  if (max_extra_latency_ms_ > 0.0) {
    std::seed_seq seq{latency_seed_, request.id};
    Rng rng(seq);
    std::uniform_real_distribution<double> u(0.0, max_extra_latency_ms_);
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(u(rng)));
  }
  if (request.fidelity == Fidelity::kPost && period_ > 0) {
    const std::size_t ordinal = ++post_calls_;
    if (ordinal % period_ == 0) {
      std::lock_guard lock(mutex_);
      forced_.push_back(request.id);
      return {EvalStatus::kTimeout, {}, "forced timeout", 0.0};
    }
  }
  return inner_->evaluate(request);
}

std::vector<std::uint64_t> FaultInjectingEvaluator::forced_timeouts() const {
  std::lock_guard lock(mutex_);
  return forced_;
}

}  // namespace cbo
