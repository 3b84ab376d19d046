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
#include <map>

#include "fedro/fl_core.hpp"

namespace fedro {
namespace {

using aggregation::Rule;
using attacks::AttackKind;

RunConfig make_config(int n, int b, int n_hat, int b_hat, int T, int K, double gamma_c) {
  RunConfig c;
  c.task.n = n;
  c.task.b = b;
  c.task.d = 3;
  c.task.L = 1.0;
  c.task.spread = 0.0;
  c.task.sigma = 0.0;
  c.task.seed = 1;
  c.n_hat = n_hat;
  c.b_hat = b_hat;
  c.T = T;
  c.K = K;
  c.gamma_c = gamma_c;
  c.master_seed = 77;
  return c;
}

tasks::QuadraticTask shared_center_task(int n, int b, const ParameterVector& c, double sigma) {
  return tasks::QuadraticTask(1.0, std::vector<ParameterVector>(static_cast<std::size_t>(n), c), b,
                              sigma);
}

TEST(SampleClients, FullSetAndErrors) {
  rng::RngStream s(1);
  const auto all = sample_clients(6, 6, s);
  EXPECT_EQ(all, (std::vector<int>{0, 1, 2, 3, 4, 5}));
  EXPECT_THROW(sample_clients(5, 6, s), std::invalid_argument);
  EXPECT_THROW(sample_clients(5, 0, s), std::invalid_argument);
}

TEST(SampleClients, UniformOverPairs) {
  rng::RngStream s(2);
  std::map<std::vector<int>, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sample_clients(5, 2, s)];
  ASSERT_EQ(counts.size(), 10u);
  const double expected = draws / 10.0;
  double chi2 = 0.0;
  for (const auto& [subset, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 0.999 quantile of chi-square with 9 degrees of freedom.
  EXPECT_LT(chi2, 27.877);
}

TEST(SampleClients, SingletonFrequencies) {
  rng::RngStream s(3);
  const int n = 8;
  const int draws = 80000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(sample_clients(n, 1, s)[0])];
  const double p = 1.0 / n;
  const double sd = std::sqrt(draws * p * (1 - p));
  for (int c : counts) EXPECT_NEAR(c, draws * p, 3 * sd);
}

TEST(LocalSgd, Examples) {
  const auto task = shared_center_task(2, 0, ParameterVector{0.0}, 0.0);
  rng::RngStream s(1);
  EXPECT_NEAR(local_sgd(task, 0, ParameterVector{2.0}, 1, 0.1, s).update[0], -0.2, 1e-15);
  const auto two = local_sgd(task, 0, ParameterVector{2.0}, 2, 0.1, s);
  EXPECT_NEAR(two.update[0], -0.38, 1e-15);
  EXPECT_NEAR(two.final_model[0], 1.62, 1e-15);
  EXPECT_EQ(local_sgd(task, 0, ParameterVector{0.0}, 3, 0.1, s).update[0], 0.0);
}

TEST(RunRound, ExactHonestUpdateUnderAgreement) {
  const ParameterVector c{1.0, -2.0, 0.5};
  const auto task = shared_center_task(20, 6, c, 0.0);
  for (auto kind : {AttackKind::sign_flipping, AttackKind::foe, AttackKind::alie,
                    AttackKind::mimic}) {
    RunConfig config = make_config(20, 6, 10, 4, 1, 4, 1.0 / 64);
    config.aggregator.rule = Rule::cw_trimmed_mean;
    config.attack.kind = kind;
    const ParameterVector x{3.0, 3.0, -1.0};
    rng::RngStream unused(0);
    const auto honest = local_sgd(task, 10, x, config.K, *config.gamma_c, unused).update;
    for (int round = 0; round < 30; ++round) {
      const auto r = run_round(task, config, *config.gamma_c, x, round);
      if (r.trace.event_violated) continue;
      ParameterVector expected = x;
      for (std::size_t j = 0; j < 3; ++j) expected[j] += 1.0 * honest[j];
      EXPECT_EQ(r.next_model, expected) << attacks::attack_name(kind) << " round " << round;
      EXPECT_EQ(r.trace.dev_norm_sq, 0.0);
      EXPECT_EQ(r.trace.honest_spread, 0.0);
    }
  }
}

TEST(RunRound, NoHonestClientGivesNaNDiagnostics) {
  const auto task = shared_center_task(5, 2, ParameterVector{0.0}, 0.0);
  RunConfig config = make_config(5, 2, 1, 0, 1, 1, 0.1);
  config.attack.kind = AttackKind::sign_flipping;
  bool seen = false;
  for (int round = 0; round < 40 && !seen; ++round) {
    const auto r = run_round(task, config, 0.1, ParameterVector{1.0}, round);
    if (r.trace.byz_sampled == 1) {
      seen = true;
      EXPECT_TRUE(r.trace.event_violated);
      EXPECT_TRUE(std::isnan(r.trace.dev_norm_sq));
      EXPECT_TRUE(std::isnan(r.trace.honest_spread));
      EXPECT_EQ(r.next_model, ParameterVector{1.0});
    }
  }
  EXPECT_TRUE(seen);
}

TEST(RunRound, TakeoverZeroResetsModelOnViolation) {
  const auto task = shared_center_task(5, 2, ParameterVector{2.0}, 0.0);
  for (bool via_attack : {false, true}) {
    RunConfig config = make_config(5, 2, 1, 0, 1, 1, 0.1);
    config.attack.kind = via_attack ? AttackKind::takeover_zero : AttackKind::sign_flipping;
    config.violation_mode =
        via_attack ? ViolationMode::continue_and_flag : ViolationMode::takeover_zero;
    int violations = 0;
    for (int round = 0; round < 40; ++round) {
      const auto r = run_round(task, config, 0.1, ParameterVector{1.0}, round);
      if (r.trace.event_violated) {
        ++violations;
        EXPECT_EQ(r.next_model, ParameterVector{0.0});
      } else {
        EXPECT_NE(r.next_model, ParameterVector{0.0});
      }
    }
    EXPECT_GT(violations, 0);
  }
}

TEST(RunFedro, ClosedFormContraction) {
  const ParameterVector c{0.5, -1.0, 2.0};
  const auto task = shared_center_task(10, 0, c, 0.0);
  RunConfig config = make_config(10, 0, 4, 0, 60, 3, 0.05);
  config.gamma_s = 0.8;
  config.x0 = ParameterVector{3.0, 1.0, -1.0};
  const auto m = run_fedro(config, task);
  const double rho = 1.0 - 0.8 * (1.0 - std::pow(1.0 - 0.05, 3));
  for (int t = 0; t < config.T; t += 7) {
    const double expected = std::pow(rho, 2 * t) * squared_distance(*config.x0, c);
    EXPECT_NEAR(m.traces[static_cast<std::size_t>(t)].grad_norm_sq / expected, 1.0, 1e-9);
  }
  const double final_expected = std::pow(rho, 2 * config.T) * squared_distance(*config.x0, c);
  EXPECT_NEAR(m.final_grad_norm_sq / final_expected, 1.0, 1e-9);
}

TEST(RunFedro, MetricsConsistency) {
  RunConfig config = make_config(30, 6, 10, 3, 80, 2, 0.02);
  config.task.spread = 1.0;
  config.task.sigma = 0.5;
  config.aggregator.rule = Rule::cw_median;
  config.attack.kind = AttackKind::foe;
  const auto m = run_fedro(config);
  ASSERT_EQ(m.traces.size(), 80u);
  double sum = 0.0;
  double cond = 0.0;
  int kept = 0;
  bool held = true;
  for (const auto& t : m.traces) {
    sum += t.grad_norm_sq;
    if (t.event_violated) {
      held = false;
    } else {
      cond += t.grad_norm_sq;
      ++kept;
    }
  }
  EXPECT_NEAR(m.avg_grad_norm_sq, sum / 80, 1e-12);
  EXPECT_NEAR(m.avg_grad_norm_sq_conditional, cond / kept, 1e-12);
  EXPECT_EQ(m.event_held, held);
  ASSERT_GE(m.output_round, 0);
  ASSERT_LT(m.output_round, 80);
  const auto task = tasks::make_task(config.task);
  EXPECT_EQ(squared_norm(task->global_gradient(m.output_model)),
            m.traces[static_cast<std::size_t>(m.output_round)].grad_norm_sq);
}

TEST(RunFedro, EventHeldWithoutByzantine) {
  RunConfig config = make_config(10, 0, 3, 1, 50, 1, 0.1);
  config.task.sigma = 1.0;
  EXPECT_TRUE(run_fedro(config).event_held);
}

TEST(RunFedro, DeterministicAcrossThreadCounts) {
  RunConfig config = make_config(40, 8, 16, 6, 40, 3, 0.01);
  config.task.spread = 1.0;
  config.task.sigma = 1.0;
  config.aggregator.rule = Rule::geometric_median;
  config.aggregator.nnm = true;
  config.attack.kind = AttackKind::alie;
  config.threads = 1;
  const auto a = run_fedro(config);
  config.threads = 4;
  const auto b = run_fedro(config);
  ASSERT_EQ(a.traces.size(), b.traces.size());
  for (std::size_t t = 0; t < a.traces.size(); ++t) {
    EXPECT_EQ(a.traces[t].grad_norm_sq, b.traces[t].grad_norm_sq);
    EXPECT_EQ(a.traces[t].dev_norm_sq, b.traces[t].dev_norm_sq);
    EXPECT_EQ(a.traces[t].honest_spread, b.traces[t].honest_spread);
  }
  EXPECT_EQ(a.final_model, b.final_model);
  config.master_seed += 1;
  EXPECT_NE(run_fedro(config).final_model, a.final_model);
}

TEST(RunFedro, ValidationErrors) {
  const auto base = make_config(10, 2, 5, 2, 10, 1, 0.1);
  auto c = base;
  c.n_hat = 11;
  EXPECT_THROW(run_fedro(c), std::invalid_argument);
  c = base;
  c.b_hat = 3;
  EXPECT_THROW(run_fedro(c), std::invalid_argument);
  c = base;
  c.K = 0;
  EXPECT_THROW(run_fedro(c), std::invalid_argument);
  c = base;
  c.gamma_c = -1.0;
  EXPECT_THROW(run_fedro(c), std::invalid_argument);
  c = base;
  c.x0 = ParameterVector{1.0};
  EXPECT_THROW(run_fedro(c), std::invalid_argument);
  EXPECT_NO_THROW(run_fedro(base));
}

TEST(RunFedro, AutoStepSizeUsesPlanner) {
  RunConfig config = make_config(20, 2, 10, 2, 100, 2, 0.0);
  config.gamma_c.reset();
  config.task.sigma = 1.0;
  config.x0 = ParameterVector{1.0, 1.0, 1.0};
  const auto task = tasks::make_task(config.task);
  const auto planned = plan_step_sizes(task->constants(*config.x0), 2, 100, 10, 2, 20, 2);
  EXPECT_EQ(run_fedro(config).gamma_c, planned.gamma_c);
}

TEST(StepSizes, Examples) {
  tasks::TaskConstants c;
  c.L = 2.0;
  c.delta0 = 1.0;
  auto s = plan_step_sizes(c, 1, 100, 10, 2, 20, 2);
  EXPECT_DOUBLE_EQ(s.gamma_c, 1.0 / 72.0);
  EXPECT_EQ(s.gamma_s, 1.0);

  c.L = 1.0;
  c.sigma = 1.0;
  s = plan_step_sizes(c, 2, 100, 10, 2, 20, 2);
  EXPECT_DOUBLE_EQ(s.gamma_c, 1.0 / 72.0);
  EXPECT_NEAR(s.candidates[0], 0.013888889, 1e-9);
  EXPECT_NEAR(s.candidates[1], 0.111803399, 1e-9);
  EXPECT_NEAR(s.candidates[2], 0.195743382, 1e-9);

  c.delta0 = 0.0;
  EXPECT_DOUBLE_EQ(plan_step_sizes(c, 3, 100, 10, 2, 20, 2).gamma_c, 1.0 / 108.0);
  c.L = 0.0;
  EXPECT_THROW(plan_step_sizes(c, 1, 1, 1, 0, 2, 0), std::invalid_argument);
}

TEST(StepSizes, AlwaysSatisfyBoundPreconditions) {
  tasks::TaskConstants c;
  for (double L : {0.5, 1.0, 4.0}) {
    for (double delta0 : {0.0, 1e-4, 10.0}) {
      for (int K : {1, 2, 8}) {
        c.L = L;
        c.delta0 = delta0;
        c.sigma = 1.0;
        c.zeta = 0.3;
        const auto s = plan_step_sizes(c, K, 50, 10, 2, 40, 4);
        EXPECT_LE(s.gamma_c, 1.0 / (16 * L * K));
        EXPECT_LE(s.gamma_c * s.gamma_s, 1.0 / (36 * L * K) * (1 + 1e-15));
        EXPECT_NO_THROW(theoretical_error_bound(c, K, 50, 10, 2, 40, 4, 0.5, s.gamma_c, s.gamma_s));
      }
    }
  }
}

TEST(ErrorBound, Terms) {
  tasks::TaskConstants c;
  c.L = 1.0;
  c.delta0 = 2.0;
  const double g = 1.0 / 72.0;
  auto b = theoretical_error_bound(c, 2, 100, 10, 2, 20, 2, 0.3, g, 1.0);
  EXPECT_DOUBLE_EQ(b.total, 5.0 * 2.0 / (100 * 2 * g));
  EXPECT_EQ(b.terms[1] + b.terms[2] + b.terms[3] + b.terms[4], 0.0);

  c.sigma = 1.0;
  c.zeta = 0.5;
  b = theoretical_error_bound(c, 1, 100, 10, 2, 20, 2, 0.3, 1.0 / 36, 1.0);
  EXPECT_EQ(b.terms[2], 0.0);
  EXPECT_EQ(b.terms[3], 0.0);

  const auto single = theoretical_error_bound(c, 3, 100, 10, 2, 20, 2, 0.3, 1.0 / 108, 1.0);
  const auto doubled = theoretical_error_bound(c, 3, 100, 10, 2, 20, 2, 0.6, 1.0 / 108, 1.0);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(single.terms[i], doubled.terms[i]);
  EXPECT_DOUBLE_EQ(doubled.terms[4], 2 * single.terms[4]);
  // 165 kappa (sigma^2/K + 6 zeta^2).
  EXPECT_DOUBLE_EQ(single.terms[4], 165 * 0.3 * (1.0 / 3 + 6 * 0.25));

  EXPECT_THROW(theoretical_error_bound(c, 1, 100, 10, 2, 20, 2, 0.3, 1.0 / 15, 1.0),
               std::invalid_argument);
  EXPECT_THROW(theoretical_error_bound(c, 1, 100, 10, 2, 20, 2, 0.3, 1.0 / 36, 1.1),
               std::invalid_argument);
}

TEST(ErrorBound, LocalSpreadBounds) {
  EXPECT_DOUBLE_EQ(local_spread_bound(2, 1.0, 0.5, 0.1), 3 * 2 * 0.01 + 18 * 4 * 0.01 * 0.25);
  EXPECT_DOUBLE_EQ(aggregation_deviation_bound(2, 1.0, 0.5, 0.1, 0.5),
                   0.5 * local_spread_bound(2, 1.0, 0.5, 0.1));
}

TEST(RunFedro, HonestSpreadRespectsBoundOnAverage) {
  RunConfig config = make_config(40, 4, 10, 2, 100, 4, 1.0 / 144);
  config.task.d = 10;
  config.task.spread = 0.5;
  config.task.sigma = 1.0;
  config.aggregator.rule = Rule::cw_trimmed_mean;
  config.attack.kind = AttackKind::alie;
  const auto task = tasks::make_task(config.task);
  const auto c = task->constants(ParameterVector(10));
  double acc = 0.0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    config.master_seed = 100 + static_cast<std::uint64_t>(s);
    const auto m = run_fedro(config, *task);
    double spread = 0.0;
    for (const auto& t : m.traces) spread += t.honest_spread;
    acc += spread / config.T;
  }
  EXPECT_LE(acc / seeds, 1.2 * local_spread_bound(4, c.sigma, c.zeta, 1.0 / 144));
}

}  // namespace
}  // namespace fedro
