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

#include "fedro/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace fedro::attacks {
namespace {

constexpr double kDefaultLambda = 1.0;
constexpr double kDefaultEpsilon = 3.0;

std::size_t check_honest(std::span<const ParameterVector> honest, AttackKind kind) {
  if (honest.empty()) {
    throw std::invalid_argument("attack " + std::string(attack_name(kind)) +
                                " needs at least one honest update");
  }
  const std::size_t d = honest.front().size();
  for (const auto& u : honest) {
    if (u.size() != d) throw std::invalid_argument("honest updates differ in dimension");
  }
  return d;
}

ParameterVector scaled(const ParameterVector& v, double factor) {
  ParameterVector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = factor * v[j];
  return out;
}

}  // namespace

std::string_view attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::none:
      return "none";
    case AttackKind::sign_flipping:
      return "sign_flipping";
    case AttackKind::foe:
      return "foe";
    case AttackKind::alie:
      return "alie";
    case AttackKind::mimic:
      return "mimic";
    case AttackKind::takeover_zero:
      return "takeover_zero";
  }
  return "unknown";
}

AttackKind parse_attack(std::string_view name) {
  for (AttackKind k : {AttackKind::none, AttackKind::sign_flipping, AttackKind::foe,
                       AttackKind::alie, AttackKind::mimic, AttackKind::takeover_zero}) {
    if (attack_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown attack: " + std::string(name));
}

double alie_default_z(int n_hat, int b_hat) {
  const int honest = n_hat - b_hat;
  if (honest <= 0) return 0.0;
  const int s = n_hat / 2 + 1 - b_hat;
  const double q = static_cast<double>(honest - s) / static_cast<double>(honest);
  if (q <= 0.5) return 0.0;
  if (q >= 1.0) return 0.0;
  const boost::math::normal_distribution<double> standard;
  return std::max(0.0, boost::math::quantile(standard, q));
}

ParameterVector honest_mean(std::span<const ParameterVector> honest) {
  check_honest(honest, AttackKind::alie);
  return shifted_mean(honest);
}

ParameterVector honest_stddev(std::span<const ParameterVector> honest) {
  const std::size_t d = check_honest(honest, AttackKind::alie);
  const ParameterVector mean = shifted_mean(honest);
  ParameterVector out(d);
  if (honest.size() < 2) return out;
  const double denom = static_cast<double>(honest.size() - 1);
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (const auto& u : honest) {
      const double delta = u[j] - mean[j];
      acc += delta * delta;
    }
    out[j] = std::sqrt(acc / denom);
  }
  return out;
}

ByzantineOutput craft_byzantine_updates(std::span<const ParameterVector> honest,
                                        int byz_count, const AttackSpec& spec,
                                        const RoundContext& context) {
  if (byz_count < 0) throw std::invalid_argument("byz_count must be non-negative");
  if (spec.scale && !std::isfinite(*spec.scale)) {
    throw std::invalid_argument("attack scale must be finite");
  }
  ByzantineOutput out;
  if (byz_count == 0) return out;
  const auto count = static_cast<std::size_t>(byz_count);

  switch (spec.kind) {
    case AttackKind::none: {
      // Byzantine clients that behave like the honest mean.
      out.updates.assign(count, honest.empty() ? ParameterVector()
                                               : honest_mean(honest));
      break;
    }
    case AttackKind::sign_flipping:
      check_honest(honest, spec.kind);
      out.updates.assign(count,
                         scaled(shifted_mean(honest), -spec.scale.value_or(kDefaultLambda)));
      break;
    case AttackKind::foe:
      check_honest(honest, spec.kind);
      out.updates.assign(count,
                         scaled(shifted_mean(honest), -spec.scale.value_or(kDefaultEpsilon)));
      break;
    case AttackKind::alie: {
      const std::size_t d = check_honest(honest, spec.kind);
      const double z = spec.scale.value_or(alie_default_z(context.n_hat, context.b_hat));
      const ParameterVector mean = shifted_mean(honest);
      const ParameterVector sd = honest_stddev(honest);
      ParameterVector crafted(d);
      for (std::size_t j = 0; j < d; ++j) crafted[j] = mean[j] + z * sd[j];
      out.updates.assign(count, crafted);
      break;
    }
    case AttackKind::mimic: {
      check_honest(honest, spec.kind);
      if (spec.target < 0) throw std::invalid_argument("mimic target must be non-negative");
      const auto idx = std::min(static_cast<std::size_t>(spec.target), honest.size() - 1);
      out.updates.assign(count, honest[idx]);
      break;
    }
    case AttackKind::takeover_zero:
      out.takeover = true;
      if (!honest.empty()) {
        out.updates.assign(
            count, scaled(shifted_mean(honest), -spec.scale.value_or(kDefaultLambda)));
      }
      break;
  }
  return out;
}

}  // namespace fedro::attacks
