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
#include <optional>

namespace fedro::planner {

// Population and schedule parameters for client subsampling: n clients of
// which at most b are Byzantine, T rounds, target success probability p.
struct SamplingSpec {
  std::int64_t n = 0;
  std::int64_t b = 0;
  std::int64_t T = 1;
  double p = 0.0;

  // Throws std::invalid_argument unless n >= 1, 0 <= b, 2b < n, T >= 1 and
  // 0 <= p < 1.
  void validate() const;
  double byzantine_fraction() const { return static_cast<double>(b) / static_cast<double>(n); }
};

struct SamplingPlan {
  std::int64_t n_hat = 0;
  std::int64_t b_hat = 0;
  std::int64_t n_th = 0;
  std::int64_t n_opt = 0;
  bool feasible = false;
};

enum class ConditionStatus {
  satisfied,
  violated,
  // b/n < b_hat/n_hat < 1/2 does not hold; the condition is not applicable.
  infeasible_ratio,
};

// Kullback-Leibler divergence between Bernoulli(alpha) and Bernoulli(beta),
// natural log. Throws std::domain_error unless both lie in (0, 1).
double kl_bernoulli(double alpha, double beta);

// d/d(alpha) of kl_bernoulli.
double kl_bernoulli_derivative(double alpha, double beta);

// ln(T / (1 - p)), the right-hand side numerator of the sampling condition.
double log_rounds_over_failure(const SamplingSpec& spec);

// Whether sampling n_hat clients per round with tolerance b_hat keeps the
// sampled Byzantine count at most b_hat in all T rounds with probability at
// least p: n_hat == n, or n_hat * D(b_hat/n_hat || b/n) >= ln(T/(1-p)).
ConditionStatus check_sampling_condition(const SamplingSpec& spec,
                                         std::int64_t n_hat,
                                         std::int64_t b_hat);

// Feasible tolerance interval for a given n_hat: the integers b_hat with
// b/n < b_hat/n_hat < 1/2. Empty when first > last.
struct ToleranceRange {
  std::int64_t first;
  std::int64_t last;
};
ToleranceRange tolerance_range(const SamplingSpec& spec, std::int64_t n_hat);

// Smallest b_hat in the feasible interval satisfying the sampling condition,
// found by binary search (the condition is monotone in b_hat). Absent when
// no such b_hat exists. Returns 0 when b == 0.
std::optional<std::int64_t> min_tolerable_byz(const SamplingSpec& spec,
                                              std::int64_t n_hat);

// ceil(ln(4T/(1-p)) / D(1/2 || b/n)) + 2, and its clamp to n. Both are 1
// when b == 0.
std::int64_t sampling_threshold_unclamped(const SamplingSpec& spec);
std::int64_t sampling_threshold(const SamplingSpec& spec);

// ceil(max{1/(1/2 - b/n)^2, 3/(b/n)} * ln(4T/(1-p))) + 2, and its clamp to
// n. Both are 1 when b == 0.
std::int64_t optimal_threshold_unclamped(const SamplingSpec& spec);
std::int64_t optimal_threshold(const SamplingSpec& spec);

// (D(1/2 || b/n) + 2)^-1 ln(T / (3(1-p))) - 1. Sample sizes strictly below
// it are reported unsafe. Requires p >= 1/2 (std::domain_error otherwise).
// For b == 0 this returns -1, the limit as D grows without bound.
double impossibility_bound(const SamplingSpec& spec);
bool is_unsafe(const SamplingSpec& spec, std::int64_t n_hat);

// Thresholds plus, when n_hat is given, the optimal tolerance at n_hat.
SamplingPlan make_plan(const SamplingSpec& spec,
                       std::optional<std::int64_t> n_hat = std::nullopt);

// P[X >= k] for X ~ Hypergeometric(population M, K marked, m draws).
// Terms are generated by the pmf ratio recurrence outward from the mode and
// summed with Neumaier compensation; the tail is normalized by the total.
double hypergeom_tail_exact(std::int64_t M, std::int64_t K, std::int64_t m,
                            std::int64_t k);

// exp(-m D(alpha || beta)); requires 1 > alpha > beta > 0.
double chernoff_upper(std::int64_t m, double alpha, double beta);

// (8 m alpha (1 - alpha))^-1/2 exp(-m D(alpha || beta)), the binomial tail
// lower bound; alpha * m must be an integer.
double binomial_tail_lower(std::int64_t m, double alpha, double beta);

// binomial_tail_lower minus the (m-1)/(M-1) binomial/hypergeometric
// total-variation correction.
double chernoff_lower(std::int64_t M, std::int64_t m, double alpha, double beta);

struct EventEstimate {
  double estimate = 0.0;
  // 95% normal-approximation half-width.
  double half_width = 0.0;
  std::int64_t trials = 0;
  std::int64_t successes = 0;
};

// Monte Carlo estimate of P[every one of T rounds samples at most b_hat
// Byzantine clients]. Trial i uses its own stream derived from (seed, i), so
// the result does not depend on `workers` (0 = FEDRO_THREADS default).
EventEstimate event_probability_mc(const SamplingSpec& spec, std::int64_t n_hat,
                                   std::int64_t b_hat, std::int64_t trials,
                                   std::uint64_t seed, unsigned workers = 0);

}  // namespace fedro::planner
