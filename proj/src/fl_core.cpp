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

#include "fedro/fl_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fedro/parallel.hpp"
#include "fedro/simd/kernels.hpp"

namespace fedro {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double resolve_gamma_c(const RunConfig& config, const tasks::Task& task,
                       const ParameterVector& x0) {
  if (config.gamma_c) return *config.gamma_c;
  return plan_step_sizes(task.constants(x0), config.K, config.T, config.n_hat,
                         config.b_hat, task.num_clients(), task.num_byzantine())
      .gamma_c;
}

}  // namespace

std::string_view violation_mode_name(ViolationMode mode) {
  return mode == ViolationMode::continue_and_flag ? "continue_and_flag" : "takeover_zero";
}

ViolationMode parse_violation_mode(std::string_view name) {
  if (name == "continue_and_flag") return ViolationMode::continue_and_flag;
  if (name == "takeover_zero") return ViolationMode::takeover_zero;
  throw std::invalid_argument("unknown violation mode: " + std::string(name));
}

void validate(const RunConfig& config, const tasks::Task& task) {
  const int n = task.num_clients();
  if (config.n_hat < 1 || config.n_hat > n) {
    throw std::invalid_argument("n_hat must satisfy 1 <= n_hat <= n (n_hat=" +
                                std::to_string(config.n_hat) + ", n=" + std::to_string(n) +
                                ")");
  }
  if (config.b_hat < 0 || 2 * config.b_hat >= config.n_hat) {
    throw std::invalid_argument("b_hat must satisfy 0 <= b_hat < n_hat/2");
  }
  if (config.T < 1) throw std::invalid_argument("T must be >= 1");
  if (config.K < 1) throw std::invalid_argument("K must be >= 1");
  if (config.gamma_c && !(*config.gamma_c > 0 && std::isfinite(*config.gamma_c))) {
    throw std::invalid_argument("gamma_c must be positive");
  }
  if (!(config.gamma_s > 0 && std::isfinite(config.gamma_s))) {
    throw std::invalid_argument("gamma_s must be positive");
  }
  if (config.x0 && config.x0->size() != task.dimension()) {
    throw std::invalid_argument("x0 must have dimension " + std::to_string(task.dimension()));
  }
}

std::vector<int> sample_clients(int n, int n_hat, rng::RngStream& stream) {
  if (n_hat < 1 || n_hat > n) {
    throw std::invalid_argument("sample_clients requires 1 <= n_hat <= n");
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 0; i < n_hat; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   static_cast<std::size_t>(stream.below(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
  }
  perm.resize(static_cast<std::size_t>(n_hat));
  std::sort(perm.begin(), perm.end());
  return perm;
}

LocalResult local_sgd(const tasks::Task& task, int client, const ParameterVector& x_t,
                      int K, double gamma_c, rng::RngStream& stream) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  const auto& k = simd::kernels();
  ParameterVector x = x_t;
  for (int step = 0; step < K; ++step) {
    const ParameterVector g = task.stochastic_gradient(client, x, stream);
    k.axpy(-gamma_c, g.data(), x.data(), x.size());
  }
  LocalResult out;
  out.update = difference(x, x_t);
  out.final_model = std::move(x);
  return out;
}

RoundResult run_round(const tasks::Task& task, const RunConfig& config, double gamma_c,
                      const ParameterVector& x, int round) {
  const std::size_t d = task.dimension();
  const auto r = static_cast<std::uint64_t>(round);
  rng::RngStream sampling(rng::derive_seed(config.master_seed, rng::Tag::client_sampling, r));
  const std::vector<int> sampled = sample_clients(task.num_clients(), config.n_hat, sampling);

  std::vector<int> honest_ids;
  for (int c : sampled) {
    if (task.is_honest(c)) honest_ids.push_back(c);
  }
  const int byz = config.n_hat - static_cast<int>(honest_ids.size());

  std::vector<LocalResult> local(honest_ids.size());
  parallel_for(honest_ids.size(), config.threads, [&](std::size_t i) {
    rng::RngStream stream(rng::derive_seed(config.master_seed, rng::Tag::local_sgd, r,
                                           static_cast<std::uint64_t>(honest_ids[i])));
    local[i] = local_sgd(task, honest_ids[i], x, config.K, gamma_c, stream);
  });
  std::vector<ParameterVector> honest_updates;
  honest_updates.reserve(local.size());
  for (const auto& l : local) honest_updates.push_back(l.update);

  attacks::ByzantineOutput crafted;
  if (!honest_updates.empty() || config.attack.kind == attacks::AttackKind::takeover_zero) {
    crafted = attacks::craft_byzantine_updates(
        honest_updates, byz, config.attack,
        attacks::RoundContext{config.n_hat, config.b_hat, round});
  }
  if (crafted.updates.size() != static_cast<std::size_t>(byz)) {
    crafted.updates.assign(static_cast<std::size_t>(byz), ParameterVector(d));
  }

  // Updates in sampled-index order.
  std::vector<ParameterVector> updates;
  updates.reserve(sampled.size());
  std::size_t next_honest = 0;
  std::size_t next_byz = 0;
  for (int c : sampled) {
    if (task.is_honest(c)) {
      updates.push_back(honest_updates[next_honest++]);
    } else {
      updates.push_back(crafted.updates[next_byz++]);
    }
  }

  aggregation::AggregatorConfig agg = config.aggregator;
  agg.b_hat = config.b_hat;
  const ParameterVector aggregate = aggregation::aggregate(updates, agg);

  RoundResult out;
  RoundTrace& trace = out.trace;
  trace.round = round;
  trace.grad_norm_sq = squared_norm(task.global_gradient(x));
  trace.loss = task.global_loss(x);
  trace.byz_sampled = byz;
  trace.event_violated = byz > config.b_hat;
  if (honest_updates.empty()) {
    trace.dev_norm_sq = kNaN;
    trace.honest_spread = kNaN;
  } else {
    trace.dev_norm_sq = squared_distance(aggregate, shifted_mean(honest_updates));
    std::vector<ParameterVector> finals;
    finals.reserve(local.size());
    for (const auto& l : local) finals.push_back(l.final_model);
    const ParameterVector center = shifted_mean(finals);
    double acc = 0.0;
    for (const auto& f : finals) acc += squared_distance(f, center);
    trace.honest_spread = acc / static_cast<double>(finals.size());
  }

  out.next_model = x;
  simd::kernels().axpy(config.gamma_s, aggregate.data(), out.next_model.data(), d);
  if (trace.event_violated &&
      (config.violation_mode == ViolationMode::takeover_zero || crafted.takeover)) {
    out.next_model = ParameterVector(d);
  }
  return out;
}

RunMetrics run_fedro(const RunConfig& config) {
  const auto task = tasks::make_task(config.task);
  return run_fedro(config, *task);
}

RunMetrics run_fedro(const RunConfig& config, const tasks::Task& task) {
  validate(config, task);
  const std::size_t d = task.dimension();
  ParameterVector x = config.x0.value_or(ParameterVector(d));

  RunMetrics metrics;
  metrics.gamma_c = resolve_gamma_c(config, task, x);
  metrics.gamma_s = config.gamma_s;
  if (!(metrics.gamma_c > 0 && std::isfinite(metrics.gamma_c))) {
    throw std::invalid_argument("gamma_c must be positive");
  }
  rng::RngStream selection(rng::derive_seed(config.master_seed, rng::Tag::output_selection));
  metrics.output_round = static_cast<int>(selection.below(static_cast<std::uint64_t>(config.T)));

  metrics.traces.reserve(static_cast<std::size_t>(config.T));
  double sum = 0.0;
  double conditional_sum = 0.0;
  int conditional_count = 0;
  for (int t = 0; t < config.T; ++t) {
    if (t == metrics.output_round) metrics.output_model = x;
    RoundResult result = run_round(task, config, metrics.gamma_c, x, t);
    const RoundTrace& trace = result.trace;
    sum += trace.grad_norm_sq;
    if (trace.event_violated) {
      metrics.event_held = false;
    } else {
      conditional_sum += trace.grad_norm_sq;
      ++conditional_count;
    }
    metrics.traces.push_back(trace);
    x = std::move(result.next_model);
  }
  metrics.avg_grad_norm_sq = sum / config.T;
  metrics.avg_grad_norm_sq_conditional =
      conditional_count > 0 ? conditional_sum / conditional_count : kNaN;
  metrics.final_grad_norm_sq = squared_norm(task.global_gradient(x));
  metrics.final_model = std::move(x);
  return metrics;
}

StepSizes plan_step_sizes(const tasks::TaskConstants& c, int K, int T, int n_hat,
                          int b_hat, int n, int b) {
  if (!(c.L > 0)) throw std::invalid_argument("L must be positive");
  if (!(c.delta0 >= 0)) throw std::invalid_argument("delta0 must be non-negative");
  if (K < 1 || T < 1 || n_hat < 1 || n < 1 || b < 0 || b >= n || b_hat < 0) {
    throw std::invalid_argument("step-size planning needs positive counts");
  }
  const double L = c.L;
  const double Kd = K;
  const double sigma_sq = c.sigma * c.sigma;
  const double zeta_sq = c.zeta * c.zeta;
  const double r = std::max(0.0, 1.0 - static_cast<double>(n_hat - b_hat) / (n - b));

  StepSizes out;
  out.candidates = {1.0 / (36.0 * L * Kd), kInf, kInf};
  if (c.delta0 > 0) {
    const double noise = sigma_sq / Kd + 6.0 * r * zeta_sq;
    if (noise > 0) {
      out.candidates[1] = (1.0 / (2.0 * Kd)) * std::sqrt(n_hat * c.delta0 / (L * T * noise));
    }
    const double drift = 2.0 * Kd * (Kd - 1.0) * T * L * L * (sigma_sq + 4.0 * Kd * zeta_sq);
    if (drift > 0) out.candidates[2] = std::cbrt(3.0 * c.delta0 / drift);
  }
  out.gamma_c = std::min({out.candidates[0], out.candidates[1], out.candidates[2]});
  return out;
}

ErrorBound theoretical_error_bound(const tasks::TaskConstants& c, int K, int T, int n_hat,
                                   int b_hat, int n, int b, double kappa, double gamma_c,
                                   double gamma_s) {
  if (!(c.L > 0)) throw std::invalid_argument("L must be positive");
  if (K < 1 || T < 1 || n_hat < 1 || n < 1 || b < 0 || b >= n || b_hat < 0) {
    throw std::invalid_argument("error bound needs positive counts");
  }
  if (!(gamma_c > 0) || !(gamma_s > 0)) {
    throw std::invalid_argument("step sizes must be positive");
  }
  const double L = c.L;
  const double Kd = K;
  constexpr double slack = 1.0 + 1e-12;
  if (gamma_c > slack / (16.0 * L * Kd)) {
    throw std::invalid_argument("step-size condition gamma_c <= 1/(16LK) violated");
  }
  if (gamma_c * gamma_s > slack / (36.0 * L * Kd)) {
    throw std::invalid_argument("step-size condition gamma_c gamma_s <= 1/(36LK) violated");
  }
  const double sigma_sq = c.sigma * c.sigma;
  const double zeta_sq = c.zeta * c.zeta;
  const double r = std::max(0.0, 1.0 - static_cast<double>(n_hat - b_hat) / (n - b));
  const double gg = gamma_c * gamma_s;

  ErrorBound out;
  out.terms[0] = 5.0 * c.delta0 / (T * Kd * gg);
  out.terms[1] = 20.0 * L * Kd * gg / n_hat * (sigma_sq / Kd + 6.0 * r * zeta_sq);
  out.terms[2] = (10.0 / 3.0) * gamma_c * gamma_c * L * L * (Kd - 1.0) * sigma_sq;
  out.terms[3] = (40.0 / 3.0) * gamma_c * gamma_c * L * L * Kd * (Kd - 1.0) * zeta_sq;
  out.terms[4] = 165.0 * kappa * (sigma_sq / Kd + 6.0 * zeta_sq);
  out.total = out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3] + out.terms[4];
  return out;
}

double local_spread_bound(int K, double sigma, double zeta, double gamma_c) {
  const double Kd = K;
  const double g2 = gamma_c * gamma_c;
  return 3.0 * Kd * sigma * sigma * g2 + 18.0 * Kd * Kd * g2 * zeta * zeta;
}

double aggregation_deviation_bound(int K, double sigma, double zeta, double gamma_c,
                                   double kappa) {
  return kappa * local_spread_bound(K, sigma, zeta, gamma_c);
}

}  // namespace fedro
