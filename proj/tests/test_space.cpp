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
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "cbo/error.hpp"
#include "cbo/space.hpp"

namespace cbo {
namespace {

ParameterSpace mixed_space() {
  return ParameterSpace::validate({ParameterSpec::continuous("w1", 0.4, 8.0, "um"),
                                   ParameterSpec::quantized("l", 0.0, 10.0, 2.5),
                                   ParameterSpec::integer("nf", 1, 16, "fingers")});
}

std::string failing_subject(std::vector<ParameterSpec> specs) {
  try {
    ParameterSpace::validate(std::move(specs));
  } catch (const SpaceError& e) {
    return e.subject();
  }
  return "<valid>";
}

TEST(SpaceValidation, AcceptsWellFormedSpecs) {
  EXPECT_EQ(ParameterSpace::validate({ParameterSpec::continuous("w1", 0.4, 8.0)}).size(), 1u);
  const auto s = ParameterSpace::validate({ParameterSpec::quantized("nf", 1, 16, 1)});
  EXPECT_EQ(s.spec(0).grid_size(), 16u);
}

TEST(SpaceValidation, RejectsMalformedSpecsNamingTheParameter) {
  EXPECT_EQ(failing_subject({ParameterSpec::continuous("w", 5, 2)}), "w");
  EXPECT_EQ(failing_subject({ParameterSpec::continuous("a", 0, 1), ParameterSpec::continuous("a", 0, 2)}), "a");
  EXPECT_EQ(failing_subject({ParameterSpec::quantized("q", 0, 10, 3)}), "q");
  EXPECT_EQ(failing_subject({ParameterSpec::integer("n", 0.5, 4)}), "n");
  EXPECT_EQ(failing_subject({ParameterSpec::continuous("inf", 0, INFINITY)}), "inf");
  EXPECT_EQ(failing_subject({ParameterSpec::continuous("eq", 1, 1)}), "eq");
  EXPECT_THROW(ParameterSpace::validate({}), SpaceError);
}

TEST(Snap, RoundsClampsAndBreaksTiesUpward) {
  EXPECT_EQ(snap(7.6, ParameterSpec::integer("n", 1, 16)), 8.0);
  EXPECT_EQ(snap(2.5, ParameterSpec::quantized("q", 0, 10, 1)), 3.0);
  EXPECT_EQ(snap(-3.0, ParameterSpec::continuous("w", 0.4, 8.0)), 0.4);
  EXPECT_EQ(snap(99.0, ParameterSpec::integer("n", 1, 16)), 16.0);
  EXPECT_EQ(snap(3.74, ParameterSpec::quantized("l", 0, 10, 2.5)), 2.5);
  EXPECT_EQ(snap(3.75, ParameterSpec::quantized("l", 0, 10, 2.5)), 5.0);
}

TEST(Snap, IsIdempotentForEveryKind) {
  Rng rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  const std::vector<ParameterSpec> specs{ParameterSpec::continuous("c", -1.5, 3.0),
                                         ParameterSpec::quantized("q", 0.2, 1.0, 0.2),
                                         ParameterSpec::integer("i", -3, 9)};
  for (int t = 0; t < 5000; ++t) {
    for (const auto& s : specs) {
      const double once = snap(u(rng), s);
      EXPECT_EQ(snap(once, s), once) << s.name;
    }
  }
}

TEST(Encode, MapsBoundsAndGridAffinely) {
  const auto s = ParameterSpace::validate({ParameterSpec::integer("nf", 1, 16)});
  EXPECT_DOUBLE_EQ(encode(Configuration{{1}}, s)[0], 0.0);
  EXPECT_DOUBLE_EQ(encode(Configuration{{16}}, s)[0], 1.0);
  EXPECT_NEAR(encode(Configuration{{8}}, s)[0], 7.0 / 15.0, 1e-15);
  EXPECT_THROW(encode(Configuration{{1, 2}}, s), DimensionMismatch);
}

TEST(Encode, RoundTripsLegalConfigurations) {
  const auto space = mixed_space();
  Rng rng(11);
  for (int t = 0; t < 20000; ++t) {
    const Configuration c = sample_uniform(space, rng);
    const Configuration back = decode(encode(c, space), space);
    ASSERT_EQ(back.size(), c.size());
    // Grid values come back bit-exact; a continuous value may move by an ulp through the affine map.
    EXPECT_NEAR(back[0], c[0], 4 * std::numeric_limits<double>::epsilon() * 8.0);
    EXPECT_EQ(back[1], c[1]);
    EXPECT_EQ(back[2], c[2]);
  }
}

TEST(Decode, AlwaysProducesLegalConfigurations) {
  const auto space = mixed_space();
  Rng rng(3);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int t = 0; t < 5000; ++t) {
    Eigen::VectorXd x(3);
    for (int d = 0; d < 3; ++d) x[d] = u(rng);
    EXPECT_TRUE(space.contains(decode(x, space)));
  }
}

TEST(SampleUniform, SingletonAndGridDomains) {
  const auto s = ParameterSpace::validate(
      {ParameterSpec::quantized("q", 0, 10, 5), ParameterSpec::continuous("c", 0, 1)});
  Rng rng(5);
  std::set<double> seen;
  for (int t = 0; t < 2000; ++t) {
    const auto c = sample_uniform(s, rng);
    seen.insert(c[0]);
    EXPECT_TRUE(s.contains(c));
  }
  EXPECT_EQ(seen, (std::set<double>{0.0, 5.0, 10.0}));
}

TEST(SampleUniform, ContinuousMeanMatchesMonteCarloOracle) {
  const auto s = ParameterSpace::validate({ParameterSpec::continuous("c", 0, 1)});
  Rng rng(42);
  double sum = 0.0;
  for (int t = 0; t < 100000; ++t) sum += sample_uniform(s, rng)[0];
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.01);
}

TEST(SampleUniform, CoversEveryGridPointChiSquare) {
  const auto s = ParameterSpace::validate({ParameterSpec::quantized("q", 0, 19, 1)});
  Rng rng(9);
  std::map<double, int> counts;
  const int n = 100000;
  for (int t = 0; t < n; ++t) ++counts[sample_uniform(s, rng)[0]];
  ASSERT_EQ(counts.size(), 20u);
  double chi2 = 0.0;
  const double expected = n / 20.0;
  for (const auto& [v, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 19 degrees of freedom; the 0.999 quantile is 43.82.
  EXPECT_LT(chi2, 43.82);
}

TEST(SampleUniform, DeterministicGivenSeed) {
  const auto space = mixed_space();
  Rng a(123), b(123);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(sample_uniform(space, a), sample_uniform(space, b));
}

TEST(ParameterSpace, CheckRejectsOffGridValues) {
  const auto space = mixed_space();
  EXPECT_NO_THROW(space.check(Configuration{{1.0, 2.5, 3}}));
  EXPECT_THROW(space.check(Configuration{{1.0, 2.4, 3}}), SpaceError);
  EXPECT_THROW(space.check(Configuration{{9.0, 2.5, 3}}), SpaceError);
  EXPECT_THROW(space.check(Configuration{{1.0, 2.5, 3.5}}), SpaceError);
  EXPECT_THROW(space.check(Configuration{{1.0}}), SpaceError);
  EXPECT_EQ(space.index_of("nf"), 2u);
  EXPECT_EQ(space.index_of("missing"), 3u);
}

}  // namespace
}  // namespace cbo
