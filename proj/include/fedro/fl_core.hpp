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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fedro/aggregation.hpp"
#include "fedro/attacks.hpp"
#include "fedro/parameter_vector.hpp"
#include "fedro/rng.hpp"
#include "fedro/tasks.hpp"

namespace fedro {

enum class ViolationMode { continue_and_flag, takeover_zero };

std::string_view violation_mode_name(ViolationMode mode);
ViolationMode parse_violation_mode(std::string_view name);

struct RunConfig {
  tasks::TaskSpec task;
  int n_hat = 1;
  int b_hat = 0;
  int T = 1;
  int K = 1;
  // Unset means plan_step_sizes' choice for the task constants.
  std::optional<double> gamma_c;
  double gamma_s = 1.0;
  // Its b_hat is overridden by RunConfig::b_hat.
  aggregation::AggregatorConfig aggregator;
  attacks::AttackSpec attack;
  std::uint64_t master_seed = 0;
  // Zero vector when unset.
  std::optional<ParameterVector> x0;
  ViolationMode violation_mode = ViolationMode::continue_and_flag;
  // Worker cap for per-client local SGD; 0 reads FEDRO_THREADS.
  unsigned threads = 0;
};

// Throws std::invalid_argument naming the offending field. Checks
// 1 <= n_hat <= n, 0 <= b_hat, 2 b_hat < n_hat, T >= 1, K >= 1, positive
// step sizes and the x0 dimension.
void validate(const RunConfig& config, const tasks::Task& task);

struct RoundTrace {
  int round = 0;
  double grad_norm_sq = 0.0;
  double loss = 0.0;
  int byz_sampled = 0;
  bool event_violated = false;
  // NaN when no honest client was sampled.
  double dev_norm_sq = 0.0;
  double honest_spread = 0.0;
};

struct RunMetrics {
  std::vector<RoundTrace> traces;
  // (1/T) sum_t ||grad F(x_t)||^2.
  double avg_grad_norm_sq = 0.0;
  // Same average restricted to rounds without a violation; NaN if none.
  double avg_grad_norm_sq_conditional = 0.0;
  double final_grad_norm_sq = 0.0;
  // x_t for t drawn uniformly from {0, ..., T-1}.
  ParameterVector output_model;
  int output_round = 0;
  ParameterVector final_model;
  bool event_held = true;
  double gamma_c = 0.0;
  double gamma_s = 0.0;
};

// Sorted indices of n_hat distinct clients drawn uniformly from 0..n-1 by a
// partial Fisher-Yates shuffle. Throws unless 1 <= n_hat <= n.
std::vector<int> sample_clients(int n, int n_hat, rng::RngStream& stream);

struct LocalResult {
  ParameterVector update;
  ParameterVector final_model;
};

// K steps of x <- x - gamma_c g with g a stochastic gradient; the update is
// x^K - x_t.
LocalResult local_sgd(const tasks::Task& task, int client, const ParameterVector& x_t,
                      int K, double gamma_c, rng::RngStream& stream);

struct RoundResult {
  ParameterVector next_model;
  RoundTrace trace;
};

// One round at model x. Streams: client sampling from (seed, round), local
// SGD from (seed, round, client). gamma_c must already be resolved.
RoundResult run_round(const tasks::Task& task, const RunConfig& config, double gamma_c,
                      const ParameterVector& x, int round);

RunMetrics run_fedro(const RunConfig& config);
RunMetrics run_fedro(const RunConfig& config, const tasks::Task& task);

struct StepSizes {
  double gamma_s = 1.0;
  double gamma_c = 0.0;
  // The three candidates whose minimum is gamma_c (+inf when not active).
  std::array<double, 3> candidates{};
};

// gamma_s = 1 and gamma_c = min{1/(36LK),
//   (1/(2K)) sqrt(n_hat Delta0 / (L T (sigma^2/K + 6 r zeta^2))),
//   cbrt(3 Delta0 / (2K(K-1) T L^2 (sigma^2 + 4K zeta^2)))}
// with r = max(0, 1 - (n_hat - b_hat)/(n - b)). Zero denominators make a
// candidate +inf; Delta0 = 0 yields 1/(36LK). Throws std::invalid_argument
// for L <= 0, Delta0 < 0 or non-positive counts.
StepSizes plan_step_sizes(const tasks::TaskConstants& constants, int K, int T, int n_hat,
                          int b_hat, int n, int b);

struct ErrorBound {
  // Optimization, sampling-noise, local-drift noise, local-drift
  // heterogeneity, robustness.
  std::array<double, 5> terms{};
  double total = 0.0;
};

// Bound on E||grad F(x_hat)||^2 under the event that no round samples more
// than b_hat Byzantine clients. Throws std::invalid_argument unless
// gamma_c <= 1/(16LK) and gamma_c gamma_s <= 1/(36LK) (relative slack 1e-12).
ErrorBound theoretical_error_bound(const tasks::TaskConstants& constants, int K, int T,
                                   int n_hat, int b_hat, int n, int b, double kappa,
                                   double gamma_c, double gamma_s);

// Bound on the expected spread of the honest local models after K steps:
// 3K sigma^2 gamma_c^2 + 18 K^2 gamma_c^2 zeta^2. The aggregation deviation
// bound is kappa times this.
double local_spread_bound(int K, double sigma, double zeta, double gamma_c);
double aggregation_deviation_bound(int K, double sigma, double zeta, double gamma_c,
                                   double kappa);

}  // namespace fedro
