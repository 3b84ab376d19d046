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

#include "fedro/sampling_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedro/parallel.hpp"
#include "fedro/rng.hpp"

namespace fedro::planner {
namespace {

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in (0, 1), got " +
                            std::to_string(v));
  }
}

void require_sample_size(const SamplingSpec& spec, std::int64_t n_hat) {
  if (n_hat < 1 || n_hat > spec.n) {
    throw std::invalid_argument("n_hat must lie in [1, n], got " +
                                std::to_string(n_hat));
  }
}

// Sampling constraint: D(b_hat/n_hat || b/n) >= ln(T/(1-p)) / n_hat.
bool divergence_condition(const SamplingSpec& spec, std::int64_t n_hat,
                          std::int64_t b_hat) {
  const double alpha = static_cast<double>(b_hat) / static_cast<double>(n_hat);
  return kl_bernoulli(alpha, spec.byzantine_fraction()) >=
         log_rounds_over_failure(spec) / static_cast<double>(n_hat);
}

std::int64_t ceil_plus_two(double value) {
  constexpr double cap = 1e18;
  return static_cast<std::int64_t>(std::ceil(std::min(value, cap))) + 2;
}

double log_four_rounds_over_failure(const SamplingSpec& spec) {
  return std::log(4.0 * static_cast<double>(spec.T) / (1.0 - spec.p));
}

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double compensation = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + compensation; }
};

void require_alpha_above_beta(double alpha, double beta) {
  if (!(alpha > beta && beta > 0.0 && alpha < 1.0)) {
    throw std::domain_error("Chernoff bounds require 1 > alpha > beta > 0");
  }
}

}  // namespace

void SamplingSpec::validate() const {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (b < 0) throw std::invalid_argument("b must be non-negative");
  if (2 * b >= n) throw std::invalid_argument("b must satisfy b/n < 1/2");
  if (T < 1) throw std::invalid_argument("T must be at least 1");
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in [0, 1)");
}

double kl_bernoulli(double alpha, double beta) {
  require_open_unit(alpha, "alpha");
  require_open_unit(beta, "beta");
  return alpha * std::log(alpha / beta) +
         (1.0 - alpha) * std::log((1.0 - alpha) / (1.0 - beta));
}

double kl_bernoulli_derivative(double alpha, double beta) {
  require_open_unit(alpha, "alpha");
  require_open_unit(beta, "beta");
  return std::log(alpha / beta) - std::log((1.0 - alpha) / (1.0 - beta));
}

double log_rounds_over_failure(const SamplingSpec& spec) {
  return std::log(static_cast<double>(spec.T) / (1.0 - spec.p));
}

ConditionStatus check_sampling_condition(const SamplingSpec& spec,
                                         std::int64_t n_hat,
                                         std::int64_t b_hat) {
  spec.validate();
  require_sample_size(spec, n_hat);
  if (b_hat < 0 || 2 * b_hat >= n_hat) return ConditionStatus::infeasible_ratio;
  if (spec.b == 0) return ConditionStatus::satisfied;
  // b/n < b_hat/n_hat, compared in integers.
  if (spec.b * n_hat >= b_hat * spec.n) return ConditionStatus::infeasible_ratio;
  if (n_hat == spec.n) return ConditionStatus::satisfied;
  return divergence_condition(spec, n_hat, b_hat) ? ConditionStatus::satisfied
                                                  : ConditionStatus::violated;
}

ToleranceRange tolerance_range(const SamplingSpec& spec, std::int64_t n_hat) {
  spec.validate();
  require_sample_size(spec, n_hat);
  // Smallest b_hat with b_hat * n > b * n_hat, largest with 2 b_hat < n_hat.
  return {spec.b * n_hat / spec.n + 1, (n_hat - 1) / 2};
}

std::optional<std::int64_t> min_tolerable_byz(const SamplingSpec& spec,
                                              std::int64_t n_hat) {
  spec.validate();
  require_sample_size(spec, n_hat);
  if (spec.b == 0) return 0;
  const auto [first, last] = tolerance_range(spec, n_hat);
  if (first > last) return std::nullopt;
  if (n_hat == spec.n) return first;
  if (!divergence_condition(spec, n_hat, last)) return std::nullopt;
  std::int64_t lo = first;
  std::int64_t hi = last;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (divergence_condition(spec, n_hat, mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

std::int64_t sampling_threshold_unclamped(const SamplingSpec& spec) {
  spec.validate();
  if (spec.b == 0) return 1;
  const double d = kl_bernoulli(0.5, spec.byzantine_fraction());
  return ceil_plus_two(log_four_rounds_over_failure(spec) / d);
}

std::int64_t sampling_threshold(const SamplingSpec& spec) {
  return std::min(spec.n, sampling_threshold_unclamped(spec));
}

std::int64_t optimal_threshold_unclamped(const SamplingSpec& spec) {
  spec.validate();
  if (spec.b == 0) return 1;
  const double beta = spec.byzantine_fraction();
  const double gap = 0.5 - beta;
  const double factor = std::max(1.0 / (gap * gap), 3.0 / beta);
  return ceil_plus_two(factor * log_four_rounds_over_failure(spec));
}

std::int64_t optimal_threshold(const SamplingSpec& spec) {
  return std::min(spec.n, optimal_threshold_unclamped(spec));
}

double impossibility_bound(const SamplingSpec& spec) {
  spec.validate();
  if (spec.p < 0.5) {
    throw std::domain_error("the impossibility bound requires p >= 1/2");
  }
  if (spec.b == 0) return -1.0;
  const double d = kl_bernoulli(0.5, spec.byzantine_fraction());
  return std::log(static_cast<double>(spec.T) / (3.0 * (1.0 - spec.p))) /
             (d + 2.0) -
         1.0;
}

bool is_unsafe(const SamplingSpec& spec, std::int64_t n_hat) {
  return static_cast<double>(n_hat) < impossibility_bound(spec);
}

SamplingPlan make_plan(const SamplingSpec& spec,
                       std::optional<std::int64_t> n_hat) {
  SamplingPlan plan;
  plan.n_th = sampling_threshold(spec);
  plan.n_opt = optimal_threshold(spec);
  if (n_hat) {
    plan.n_hat = *n_hat;
    if (auto b_hat = min_tolerable_byz(spec, *n_hat)) {
      plan.b_hat = *b_hat;
      plan.feasible = true;
    }
  }
  return plan;
}

double hypergeom_tail_exact(std::int64_t M, std::int64_t K, std::int64_t m,
                            std::int64_t k) {
  if (M < 0 || K < 0 || K > M || m < 0 || m > M || k < 0 || k > m) {
    throw std::domain_error("hypergeometric parameters out of range");
  }
  const std::int64_t lo = std::max<std::int64_t>(0, m - (M - K));
  const std::int64_t hi = std::min(K, m);
  if (k <= lo) return 1.0;
  if (k > hi) return 0.0;

  const std::int64_t mode = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(((m + 1) * (K + 1)) / (M + 2)), lo, hi);
  const auto up_ratio = [&](std::int64_t x) {
    // P[X = x + 1] / P[X = x]
    return static_cast<double>(K - x) * static_cast<double>(m - x) /
           (static_cast<double>(x + 1) * static_cast<double>(M - K - m + x + 1));
  };
  const auto down_ratio = [&](std::int64_t x) {
    // P[X = x - 1] / P[X = x]
    return static_cast<double>(x) * static_cast<double>(M - K - m + x) /
           (static_cast<double>(K - x + 1) * static_cast<double>(m - x + 1));
  };

  CompensatedSum below_k;
  CompensatedSum at_or_above_k;
  const auto add = [&](std::int64_t x, double term) {
    (x >= k ? at_or_above_k : below_k).add(term);
  };
  add(mode, 1.0);
  double term = 1.0;
  for (std::int64_t x = mode; x < hi && term > 0.0; ++x) {
    term *= up_ratio(x);
    add(x + 1, term);
  }
  term = 1.0;
  for (std::int64_t x = mode; x > lo && term > 0.0; --x) {
    term *= down_ratio(x);
    add(x - 1, term);
  }
  const double tail = at_or_above_k.value();
  return tail / (tail + below_k.value());
}

double chernoff_upper(std::int64_t m, double alpha, double beta) {
  require_alpha_above_beta(alpha, beta);
  if (m < 0) throw std::domain_error("m must be non-negative");
  return std::exp(-static_cast<double>(m) * kl_bernoulli(alpha, beta));
}

double binomial_tail_lower(std::int64_t m, double alpha, double beta) {
  require_alpha_above_beta(alpha, beta);
  if (m < 1) throw std::domain_error("m must be positive");
  const double count = alpha * static_cast<double>(m);
  if (std::abs(count - std::round(count)) > 1e-9 * std::max(1.0, count)) {
    throw std::domain_error("alpha * m must be an integer");
  }
  const double md = static_cast<double>(m);
  return std::exp(-md * kl_bernoulli(alpha, beta)) /
         std::sqrt(8.0 * md * alpha * (1.0 - alpha));
}

double chernoff_lower(std::int64_t M, std::int64_t m, double alpha, double beta) {
  if (M < 1 || m > M) throw std::domain_error("chernoff_lower requires m <= M");
  const double correction =
      M > 1 ? static_cast<double>(m - 1) / static_cast<double>(M - 1) : 0.0;
  return binomial_tail_lower(m, alpha, beta) - correction;
}

EventEstimate event_probability_mc(const SamplingSpec& spec, std::int64_t n_hat,
                                   std::int64_t b_hat, std::int64_t trials,
                                   std::uint64_t seed, unsigned workers) {
  spec.validate();
  require_sample_size(spec, n_hat);
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");

  std::vector<char> held(static_cast<std::size_t>(trials), 1);
  if (spec.b > 0) {
    parallel_for(held.size(), workers, [&](std::size_t trial) {
      rng::RngStream stream(rng::derive_seed(seed, rng::Tag::event_trial, trial));
      // Byzantine clients are 0..b-1. A partial shuffle of an already
      // shuffled permutation is still a uniform sample.
      std::vector<std::int64_t> perm(static_cast<std::size_t>(spec.n));
      std::iota(perm.begin(), perm.end(), 0);
      for (std::int64_t round = 0; round < spec.T; ++round) {
        std::int64_t byzantine = 0;
        for (std::int64_t i = 0; i < n_hat; ++i) {
          const auto j = i + static_cast<std::int64_t>(
                                 stream.below(static_cast<std::uint64_t>(spec.n - i)));
          std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
          if (perm[static_cast<std::size_t>(i)] < spec.b) ++byzantine;
        }
        if (byzantine > b_hat) {
          held[trial] = 0;
          return;
        }
      }
    });
  }

  EventEstimate out;
  out.trials = trials;
  out.successes = std::count(held.begin(), held.end(), 1);
  out.estimate = static_cast<double>(out.successes) / static_cast<double>(trials);
  out.half_width =
      1.96 * std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  return out;
}

}  // namespace fedro::planner
