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

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedro/parameter_vector.hpp"

namespace fedro::attacks {

enum class AttackKind { none, sign_flipping, foe, alie, mimic, takeover_zero };

std::string_view attack_name(AttackKind kind);
// Throws std::invalid_argument on an unknown name.
AttackKind parse_attack(std::string_view name);

struct AttackSpec {
  AttackKind kind = AttackKind::none;
  // lambda for SF and takeover_zero, epsilon for FOE, z for ALIE. Unset means
  // the kind's default (1, 3, and the percentile heuristic respectively).
  std::optional<double> scale;
  // Position within the sampled honest updates copied by mimic.
  int target = 0;
};

// Round parameters visible to the adversary.
struct RoundContext {
  int n_hat = 0;
  int b_hat = 0;
  int round = 0;
};

struct ByzantineOutput {
  std::vector<ParameterVector> updates;
  // Set by takeover_zero: the server resets the model to zero when the
  // sampled Byzantine count exceeds b_hat.
  bool takeover = false;
};

// Default ALIE z: Phi^-1((n_hat - b_hat - s) / (n_hat - b_hat)) with
// s = floor(n_hat / 2) + 1 - b_hat, floored at 0.
double alie_default_z(int n_hat, int b_hat);

// Coordinate-wise mean and sample standard deviation of the honest updates
// (standard deviation 0 for a single update).
ParameterVector honest_mean(std::span<const ParameterVector> honest);
ParameterVector honest_stddev(std::span<const ParameterVector> honest);

// Omniscient adversary: the crafted vectors depend on the sampled honest
// updates of the current round. Deterministic in its inputs. Throws
// std::invalid_argument when `honest` is empty for a kind that needs it
// (every kind except none and takeover_zero), or when byz_count < 0.
ByzantineOutput craft_byzantine_updates(std::span<const ParameterVector> honest,
                                        int byz_count, const AttackSpec& spec,
                                        const RoundContext& context);

}  // namespace fedro::attacks
