// Copyright 2026 The FedRo Simulator Authors
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

#include <gtest/gtest.h>

#include <cmath>

#include "fedro/attacks.hpp"

namespace fedro::attacks {
namespace {

const RoundContext kContext{10, 2, 0};

AttackSpec spec(AttackKind kind, std::optional<double> scale = std::nullopt, int target = 0) {
  return AttackSpec{kind, scale, target};
}

double cosine(const ParameterVector& a, const ParameterVector& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot / std::sqrt(squared_norm(a) * squared_norm(b));
}

TEST(Attacks, NamesRoundTrip) {
  for (auto k : {AttackKind::none, AttackKind::sign_flipping, AttackKind::foe, AttackKind::alie,
                 AttackKind::mimic, AttackKind::takeover_zero}) {
    EXPECT_EQ(parse_attack(attack_name(k)), k);
  }
  EXPECT_THROW(parse_attack("ipm"), std::invalid_argument);
}

TEST(Attacks, SignFlippingExample) {
  const std::vector<ParameterVector> honest = {{2}, {4}};
  const auto out = craft_byzantine_updates(honest, 3, spec(AttackKind::sign_flipping), kContext);
  ASSERT_EQ(out.updates.size(), 3u);
  for (const auto& u : out.updates) EXPECT_EQ(u, ParameterVector{-3});
  EXPECT_FALSE(out.takeover);
}

TEST(Attacks, FoeDefaultAndScale) {
  const std::vector<ParameterVector> honest = {{2, 0}, {4, 2}};
  auto out = craft_byzantine_updates(honest, 1, spec(AttackKind::foe), kContext);
  EXPECT_EQ(out.updates[0], (ParameterVector{-9, -3}));
  out = craft_byzantine_updates(honest, 1, spec(AttackKind::foe, 0.5), kContext);
  EXPECT_EQ(out.updates[0], (ParameterVector{-1.5, -0.5}));
}

TEST(Attacks, SfAndFoeAreAntiparallelToHonestMean) {
  const std::vector<ParameterVector> honest = {{1, 2, 3}, {-0.5, 4, 1}, {2, 2, 2}};
  const ParameterVector mean = honest_mean(honest);
  for (auto k : {AttackKind::sign_flipping, AttackKind::foe}) {
    const auto out = craft_byzantine_updates(honest, 2, spec(k), kContext);
    for (const auto& u : out.updates) EXPECT_NEAR(cosine(u, mean), -1.0, 1e-12);
  }
}

TEST(Attacks, AlieExamples) {
  const std::vector<ParameterVector> honest = {{1, 0}, {3, 0}, {5, 6}};
  auto out = craft_byzantine_updates(honest, 2, spec(AttackKind::alie, 0.0), kContext);
  EXPECT_EQ(out.updates[0], honest_mean(honest));
  out = craft_byzantine_updates(honest, 1, spec(AttackKind::alie, 1.5), kContext);
  // Sample standard deviations 2 and sqrt(12).
  EXPECT_DOUBLE_EQ(out.updates[0][0], 3.0 + 1.5 * 2.0);
  EXPECT_DOUBLE_EQ(out.updates[0][1], 2.0 + 1.5 * std::sqrt(12.0));
}

TEST(Attacks, AlieDefaultZ) {
  EXPECT_EQ(alie_default_z(10, 2), 0.0);
  EXPECT_NEAR(alie_default_z(20, 4), 0.1573106846, 1e-9);
  EXPECT_NEAR(alie_default_z(5, 2), 0.4307272993, 1e-9);
  EXPECT_NEAR(alie_default_z(26, 12), 1.0675705239, 1e-9);
  EXPECT_EQ(alie_default_z(1, 0), 0.0);
}

TEST(Attacks, MimicCopiesTargetBitForBit) {
  const std::vector<ParameterVector> honest = {{0.1, 0.2}, {0.3, 0.7}};
  auto out = craft_byzantine_updates(honest, 2, spec(AttackKind::mimic), kContext);
  for (const auto& u : out.updates) EXPECT_EQ(u, honest[0]);
  out = craft_byzantine_updates(honest, 1, spec(AttackKind::mimic, std::nullopt, 1), kContext);
  EXPECT_EQ(out.updates[0], honest[1]);
}

TEST(Attacks, TakeoverZeroSetsFlag) {
  const std::vector<ParameterVector> honest = {{1}};
  auto out = craft_byzantine_updates(honest, 1, spec(AttackKind::takeover_zero), kContext);
  EXPECT_TRUE(out.takeover);
  EXPECT_EQ(out.updates[0], ParameterVector{-1});
  out = craft_byzantine_updates({}, 2, spec(AttackKind::takeover_zero), kContext);
  EXPECT_TRUE(out.takeover);
}

TEST(Attacks, Errors) {
  for (auto k : {AttackKind::sign_flipping, AttackKind::foe, AttackKind::alie, AttackKind::mimic}) {
    EXPECT_THROW(craft_byzantine_updates({}, 1, spec(k), kContext), std::invalid_argument);
  }
  const std::vector<ParameterVector> honest = {{1}};
  EXPECT_THROW(craft_byzantine_updates(honest, -1, spec(AttackKind::foe), kContext),
               std::invalid_argument);
  EXPECT_THROW(craft_byzantine_updates(honest, 1, spec(AttackKind::foe, NAN), kContext),
               std::invalid_argument);
  EXPECT_TRUE(craft_byzantine_updates(honest, 0, spec(AttackKind::foe), kContext).updates.empty());
}

TEST(Attacks, Deterministic) {
  const std::vector<ParameterVector> honest = {{1, -2}, {0.25, 3}, {7, 7}};
  for (auto k : {AttackKind::sign_flipping, AttackKind::foe, AttackKind::alie, AttackKind::mimic}) {
    const auto a = craft_byzantine_updates(honest, 3, spec(k), kContext);
    const auto b = craft_byzantine_updates(honest, 3, spec(k), kContext);
    EXPECT_EQ(a.updates, b.updates);
  }
}

}  // namespace
}  // namespace fedro::attacks
