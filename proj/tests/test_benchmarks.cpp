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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cbo/benchmarks.hpp"
#include "cbo/error.hpp"

namespace cbo {
namespace {

// Independent transcriptions of the closed forms.
MetricSet ota_oracle(const std::vector<double>& v, bool post) {
  const double target[5] = {4, 6, 8, 3, 5};
  double s[5], sum_sq = 0, c = 0;
  for (int i = 0; i < 5; ++i) {
    s[i] = v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i + 5)];
    sum_sq += std::pow(std::log(s[i]) - std::log(target[i]), 2);
    c += 0.02 * s[i];
  }
  double gain = 26 - 0.5 * sum_sq;
  double ugb = 1.2e7 * s[0] / (s[0] + 0.4 * (s[1] + s[2] + s[3] + s[4]));
  double pm = 62 + 8 * std::tanh((s[3] - s[4]) / 4);
  if (post) {
    gain = gain - 1.2 * c - 0.4 * std::sin(7 * v[0]) * std::cos(5 * v[1]);
    ugb = ugb / (1 + 0.15 * c);
    pm = pm - 6 * c / (1 + c) + 2 * std::sin(9 * v[2]);
  }
  return {{"gain_db", gain}, {"ugb_hz", ugb}, {"pm_deg", pm}};
}

MetricSet ldo_oracle(const std::vector<double>& w, bool post) {
  const double t[4] = {3.0, 2.2, 2.6, 3.4};
  double sum_sq = 0, sizes = 0;
  for (int i = 0; i < 4; ++i) {
    const double s = w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(8 + i)];
    sum_sq += std::pow(std::log(s) - t[i], 2);
    sizes += s;
  }
  double gain = 75 - 0.4 * sum_sq;
  double vou = 0.3 + 1.2 / (1 + 0.1 * w[4] * w[5]);
  double pm = 72 + 6 * std::tanh((w[6] - w[7]) / 5);
  if (post) {
    const double c = 0.01 * (sizes + w[4] + w[5] + w[6] + w[7]);
    gain -= 0.8 * c;
    vou = vou * (1 + 0.3 * c / (1 + c)) + 0.05 * std::sin(6 * w[4]);
    pm -= 8 * c / (1 + c);
  }
  return {{"gain_db", gain}, {"vou_v", vou}, {"pm_deg", pm}};
}

TEST(Bowl, OptimumAndPreValue) {
  const Configuration opt{{0.5, 0.5, 0.5, 0.5, 3, 5}};
  EXPECT_EQ(evaluate_builtin("two_fidelity_bowl", opt, Fidelity::kPost).at("score"), 10.0);
  EXPECT_NEAR(evaluate_builtin("two_fidelity_bowl", opt, Fidelity::kPre).at("score"),
              10 + 1.5 + 0.15 + 0.5 * std::sin(1.5), 1e-12);
  EXPECT_NEAR(evaluate_builtin("two_fidelity_bowl", opt, Fidelity::kPre).at("score"), 12.1487, 1e-4);
  const auto b = builtin_benchmark("two_fidelity_bowl");
  EXPECT_EQ(*b->known_post_optimum, 10.0);
  EXPECT_EQ(*b->known_post_argmax, opt);
  Rng rng(1);
  for (int t = 0; t < 1000; ++t)
    EXPECT_LE(evaluate_builtin("two_fidelity_bowl", sample_uniform(b->space, rng), Fidelity::kPost).at("score"), 10.0);
}

TEST(SyntheticOta, MatchesFormulaOracle) {
  const auto b = builtin_benchmark("synthetic_ota");
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const Configuration c = sample_uniform(b->space, rng);
    for (bool post : {false, true}) {
      const MetricSet got = b->evaluate(c, post ? Fidelity::kPost : Fidelity::kPre);
      const MetricSet want = ota_oracle(c.values, post);
      for (const auto& [k, v] : want) EXPECT_NEAR(got.at(k), v, 1e-9 * std::max(1.0, std::abs(v))) << k;
    }
  }
}

TEST(SyntheticLdo, MatchesFormulaOracle) {
  const auto b = builtin_benchmark("synthetic_ldo");
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const Configuration c = sample_uniform(b->space, rng);
    for (bool post : {false, true}) {
      const MetricSet got = b->evaluate(c, post ? Fidelity::kPost : Fidelity::kPre);
      const MetricSet want = ldo_oracle(c.values, post);
      for (const auto& [k, v] : want) EXPECT_NEAR(got.at(k), v, 1e-12 * std::max(1.0, std::abs(v))) << k;
    }
  }
}

TEST(SyntheticOta, PostGainBelowPreGain) {
  Rng rng(4);
  const auto b = builtin_benchmark("synthetic_ota");
  for (int t = 0; t < 100; ++t) {
    const Configuration c = sample_uniform(b->space, rng);
    EXPECT_LT(b->evaluate(c, Fidelity::kPost).at("gain_db"), b->evaluate(c, Fidelity::kPre).at("gain_db"));
  }
}

TEST(CircuitBenchmarks, PreIsOptimisticOnAverage) {
  for (const char* name : {"synthetic_ota", "synthetic_ldo"}) {
    const auto b = builtin_benchmark(name);
    Rng rng(5);
    double gap = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const Configuration c = sample_uniform(b->space, rng);
      gap += b->evaluate(c, Fidelity::kPre).at(b->primary_metric) -
             b->evaluate(c, Fidelity::kPost).at(b->primary_metric);
    }
    EXPECT_GT(gap / 1000, 0.0) << name;
  }
}

double sweep_variation(const BenchmarkDef& b, Configuration base, std::size_t axis, Fidelity f) {
  const auto& spec = b.space.spec(axis);
  double tv = 0.0, prev = 0.0;
  for (int i = 0; i < 100; ++i) {
    base.values[axis] = spec.lo + (spec.hi - spec.lo) * i / 99.0;
    const double v = effective_fom(b.evaluate(base, f), b.fom).effective;
    if (i > 0) tv += std::abs(v - prev);
    prev = v;
  }
  return tv;
}

TEST(CircuitBenchmarks, PostSurfaceIsRougherAlongRippleAxes) {
  // Axes carrying the post-only ripple terms.
  const std::vector<std::pair<const char*, std::vector<std::size_t>>> cases{
      {"synthetic_ota", {0, 1}}, {"synthetic_ldo", {4}}};
  for (const auto& [name, axes] : cases) {
    const auto b = builtin_benchmark(name);
    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
      const Configuration base = sample_uniform(b->space, rng);
      for (std::size_t axis : axes) {
        EXPECT_GT(sweep_variation(*b, base, axis, Fidelity::kPost), sweep_variation(*b, base, axis, Fidelity::kPre))
            << name << " axis " << axis;
      }
    }
  }
}

TEST(Builtins, PureAndFinite) {
  for (const auto& name : builtin_benchmark_names()) {
    const auto b = builtin_benchmark(name);
    Rng rng(7);
    for (int t = 0; t < 300; ++t) {
      const Configuration c = sample_uniform(b->space, rng);
      for (Fidelity f : {Fidelity::kPre, Fidelity::kPost}) {
        const MetricSet m1 = evaluate_builtin(name, c, f);
        const MetricSet m2 = evaluate_builtin(name, c, f);
        EXPECT_EQ(m1, m2);
        for (const auto& [k, v] : m1) EXPECT_TRUE(std::isfinite(v)) << name << " " << k;
        EXPECT_NO_THROW(effective_fom(m1, b->fom));
      }
    }
  }
}

TEST(Builtins, ErrorsForUnknownNameAndIllegalConfig) {
  EXPECT_THROW(builtin_benchmark("nope"), UnknownBenchmarkError);
  EXPECT_THROW(evaluate_builtin("nope", Configuration{{1.0}}, Fidelity::kPre), UnknownBenchmarkError);
  EXPECT_THROW(evaluate_builtin("two_fidelity_bowl", Configuration{{1.0}}, Fidelity::kPre), SpaceError);
  EXPECT_EQ(builtin_benchmark_names(),
            (std::vector<std::string>{"two_fidelity_bowl", "synthetic_ota", "synthetic_ldo"}));
}

}  // namespace
}  // namespace cbo
