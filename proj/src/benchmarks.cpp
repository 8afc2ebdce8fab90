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

#include "cbo/benchmarks.hpp"

#include <array>
#include <cmath>

#include "cbo/error.hpp"

namespace cbo {

namespace {

std::shared_ptr<const BenchmarkDef> make_bowl() {
  auto b = std::make_shared<BenchmarkDef>(BenchmarkDef{
      "two_fidelity_bowl",
      ParameterSpace::validate({
          ParameterSpec::continuous("x1", -2.0, 2.0),
          ParameterSpec::continuous("x2", -2.0, 2.0),
          ParameterSpec::continuous("x3", -2.0, 2.0),
          ParameterSpec::continuous("x4", -2.0, 2.0),
          ParameterSpec::integer("n1", 1, 8),
          ParameterSpec::integer("n2", 1, 8),
      }),
      FomSpec{{{"score", 1.0, Transform::kIdentity}}, {}},
      "score",
      {},
      10.0,
      Configuration{{0.5, 0.5, 0.5, 0.5, 3.0, 5.0}},
  });
  b->evaluate = [](const Configuration& c, Fidelity f) {
    double post = 10.0;
    for (std::size_t i = 0; i < 4; ++i) post -= (c[i] - 0.5) * (c[i] - 0.5);
    post -= 0.2 * ((c[4] - 3.0) * (c[4] - 3.0) + (c[5] - 5.0) * (c[5] - 5.0));
    if (f == Fidelity::kPost) return MetricSet{{"score", post}};
    return MetricSet{{"score", post + 1.5 + 0.3 * c[0] + 0.5 * std::sin(3.0 * c[1])}};
  };
  return b;
}

std::shared_ptr<const BenchmarkDef> make_ota() {
  std::vector<ParameterSpec> specs;
  for (int i = 1; i <= 5; ++i) specs.push_back(ParameterSpec::continuous("w" + std::to_string(i), 0.4, 8.0, "um"));
  for (int i = 1; i <= 5; ++i) specs.push_back(ParameterSpec::integer("nf" + std::to_string(i), 1, 16, "fingers"));
  auto b = std::make_shared<BenchmarkDef>(BenchmarkDef{
      "synthetic_ota",
      ParameterSpace::validate(std::move(specs)),
      FomSpec{{{"gain_db", 1.0, Transform::kIdentity}, {"ugb_hz", 1.0, Transform::kLog10}},
              {{"pm_deg", 45.0, 80.0, 1.0}}},
      "gain_db",
      {},
      std::nullopt,
      std::nullopt,
  });
  b->evaluate = [](const Configuration& c, Fidelity f) {
    constexpr std::array<double, 5> target = {4.0, 6.0, 8.0, 3.0, 5.0};
    std::array<double, 5> s{};
    double total = 0.0;
    double gain = 26.0;
    for (std::size_t i = 0; i < 5; ++i) {
      s[i] = c[i] * c[i + 5];
      total += s[i];
      const double d = std::log(s[i]) - std::log(target[i]);
      gain -= 0.5 * d * d;
    }
    double ugb = 1.2e7 * s[0] / (s[0] + 0.4 * (s[1] + s[2] + s[3] + s[4]));
    double pm = 62.0 + 8.0 * std::tanh((s[3] - s[4]) / 4.0);
    if (f == Fidelity::kPost) {
      const double load = 0.02 * total;
      gain -= 1.2 * load + 0.4 * std::sin(7.0 * c[0]) * std::cos(5.0 * c[1]);
      ugb /= 1.0 + 0.15 * load;
      pm += -6.0 * load / (1.0 + load) + 2.0 * std::sin(9.0 * c[2]);
    }
    return MetricSet{{"gain_db", gain}, {"ugb_hz", ugb}, {"pm_deg", pm}};
  };
  return b;
}

std::shared_ptr<const BenchmarkDef> make_ldo() {
  std::vector<ParameterSpec> specs;
  for (int i = 1; i <= 8; ++i) specs.push_back(ParameterSpec::continuous("w" + std::to_string(i), 0.4, 12.0, "um"));
  for (int i = 1; i <= 4; ++i) specs.push_back(ParameterSpec::integer("nf" + std::to_string(i), 1, 32, "fingers"));
  auto b = std::make_shared<BenchmarkDef>(BenchmarkDef{
      "synthetic_ldo",
      ParameterSpace::validate(std::move(specs)),
      FomSpec{{{"gain_db", 0.1, Transform::kIdentity}, {"vou_v", -10.0, Transform::kIdentity}},
              {{"pm_deg", 60.0, 90.0, 1.0}}},
      "gain_db",
      {},
      std::nullopt,
      std::nullopt,
  });
  b->evaluate = [](const Configuration& c, Fidelity f) {
    constexpr std::array<double, 4> target = {3.0, 2.2, 2.6, 3.4};
    double gain = 75.0;
    double sized = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double s = c[i] * c[i + 8];
      sized += s;
      const double d = std::log(s) - target[i];
      gain -= 0.4 * d * d;
    }
    double vou = 0.3 + 1.2 / (1.0 + 0.1 * c[4] * c[5]);
    double pm = 72.0 + 6.0 * std::tanh((c[6] - c[7]) / 5.0);
    if (f == Fidelity::kPost) {
      const double load = 0.01 * (sized + c[4] + c[5] + c[6] + c[7]);
      gain -= 0.8 * load;
      vou = vou * (1.0 + 0.3 * load / (1.0 + load)) + 0.05 * std::sin(6.0 * c[4]);
      pm -= 8.0 * load / (1.0 + load);
    }
    return MetricSet{{"gain_db", gain}, {"vou_v", vou}, {"pm_deg", pm}};
  };
  return b;
}

}  // namespace

std::vector<std::string> builtin_benchmark_names() {
  return {"two_fidelity_bowl", "synthetic_ota", "synthetic_ldo"};
}

std::shared_ptr<const BenchmarkDef> builtin_benchmark(const std::string& name) {
  static const auto bowl = make_bowl();
  static const auto ota = make_ota();
  static const auto ldo = make_ldo();
  if (name == bowl->name) return bowl;
  if (name == ota->name) return ota;
  if (name == ldo->name) return ldo;
  throw UnknownBenchmarkError("unknown builtin benchmark '" + name + "'");
}

MetricSet evaluate_builtin(const std::string& name, const Configuration& config, Fidelity fidelity) {
  const auto b = builtin_benchmark(name);
  b->space.check(config);
  return b->evaluate(config, fidelity);
}

}  // namespace cbo
