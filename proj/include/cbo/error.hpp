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

#include <stdexcept>
#include <string>
#include <utility>

namespace cbo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter space or configuration. `subject()` names the offending parameter.
class SpaceError : public Error {
 public:
  SpaceError(const std::string& what, std::string subject)
      : Error(what), subject_(std::move(subject)) {}
  const std::string& subject() const noexcept { return subject_; }

 private:
  std::string subject_;
};

/// A metric outside the domain of its transform, or a metric missing from a MetricSet.
class MetricError : public Error {
 public:
  MetricError(const std::string& what, std::string metric)
      : Error(what), metric_(std::move(metric)) {}
  const std::string& metric() const noexcept { return metric_; }

 private:
  std::string metric_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Covariance factorization failed even at the largest jitter.
class SingularModelError : public Error {
 public:
  using Error::Error;
};

class SingularTransferError : public Error {
 public:
  using Error::Error;
};

class UnknownBenchmarkError : public Error {
 public:
  using Error::Error;
};

class NoIncumbentError : public Error {
 public:
  using Error::Error;
};

class RunAbortedError : public Error {
 public:
  using Error::Error;
};

/// Problem-config or command-line problem. The message carries line/field context.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbo
