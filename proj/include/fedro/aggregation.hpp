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

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedro/parameter_vector.hpp"

namespace fedro::aggregation {

enum class Rule { average, cw_trimmed_mean, cw_median, geometric_median };

std::string_view rule_name(Rule rule);
// Throws std::invalid_argument on an unknown name.
Rule parse_rule(std::string_view name);

struct AggregatorConfig {
  Rule rule = Rule::average;
  // Apply nearest-neighbor mixing before the base rule.
  bool nnm = false;
  int b_hat = 0;
  double tol = 1e-8;
  int max_iter = 200;
};

std::string describe(const AggregatorConfig& config);

// All functions below require a non-empty input list of equal dimension and
// throw std::invalid_argument otherwise.

ParameterVector average(std::span<const ParameterVector> inputs);

// Per coordinate: drop the b_hat largest and b_hat smallest values and
// average the rest. Requires n_hat > 2 b_hat.
ParameterVector cw_trimmed_mean(std::span<const ParameterVector> inputs, int b_hat);

// Per coordinate median; even counts take the midpoint of the two central
// order statistics.
ParameterVector cw_median(std::span<const ParameterVector> inputs);

// Weiszfeld iteration for argmin_z sum_i ||z - w_i||, started from the mean.
// Stops once a step is below tol * max(1, ||z||) or after max_iter steps.
// When the iterate lands on an input point, that point is returned if it
// satisfies the subgradient optimality test, otherwise the iterate is moved
// off it by tol along the descent direction.
ParameterVector geometric_median(std::span<const ParameterVector> inputs,
                                 double tol = 1e-8, int max_iter = 200);

// Nearest-neighbor mixing: input i becomes the mean of itself and its
// n_hat - b_hat - 1 nearest other inputs (Euclidean, ties to lower index).
std::vector<ParameterVector> nnm_transform(std::span<const ParameterVector> inputs,
                                           int b_hat);

ParameterVector aggregate(std::span<const ParameterVector> inputs,
                          const AggregatorConfig& config);

// Largest robustness ratio over all subsets S of size n_hat - b_hat:
//   |S| * ||A(w) - mean_S||^2 / sum_{i in S} ||w_i - mean_S||^2,
// with 0/0 read as 0. The witness is the lexicographically first maximizer.
struct KappaReport {
  double kappa_hat = 0.0;
  std::vector<int> witness_subset;
  std::int64_t instances_tested = 0;
};

inline constexpr int kMaxEnumeratedInputs = 20;

KappaReport kappa_empirical(std::span<const ParameterVector> inputs, int b_hat,
                            AggregatorConfig rule);

// Ratio for one subset; exposed so the enumeration can be cross-checked.
double robustness_ratio(std::span<const ParameterVector> inputs,
                        const ParameterVector& aggregate_output,
                        std::span<const int> subset);

struct CertificationResult {
  bool certified = false;
  double max_ratio = 0.0;
  std::int64_t instances = 0;
  // Instance and subset attaining max_ratio.
  std::vector<ParameterVector> witness_instance;
  std::vector<int> witness_subset;
};

// Instance generator used by certify_robustness: `trials` Gaussian instances
// followed by two adversarial patterns (a single outlier at magnitude 1e3
// and two tight clusters of opposite sign).
std::vector<std::vector<ParameterVector>> certification_instances(
    int n_hat, int trials, std::uint64_t seed, int dim);

// Checks kappa_empirical <= kappa_claim on every generated instance.
CertificationResult certify_robustness(AggregatorConfig rule, int n_hat, int b_hat,
                                       double kappa_claim, int trials,
                                       std::uint64_t seed, int dim = 2);

}  // namespace fedro::aggregation
