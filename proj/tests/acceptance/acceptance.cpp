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

// Acceptance run: one PASS/FAIL line per criterion. Exits 1 if any fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fedro/aggregation.hpp"
#include "fedro/attacks.hpp"
#include "fedro/fl_core.hpp"
#include "fedro/harness/checks.hpp"
#include "fedro/harness/presets.hpp"
#include "fedro/harness/report.hpp"
#include "fedro/parallel.hpp"
#include "fedro/rng.hpp"
#include "fedro/sampling_planner.hpp"
#include "fedro/tasks.hpp"
#include "support/oracles.hpp"

#ifndef FEDRO_CLI_PATH
#error "FEDRO_CLI_PATH must name the fedro executable"
#endif

namespace {

using namespace fedro;
using harness::CsvTable;
using harness::format_double;

constexpr std::uint64_t kMasterSeed = 20240611;

struct Outcome {
  bool passed = false;
  std::string detail;
  // Everything the criterion computed, for the worker-count comparison.
  std::string csv;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome(unsigned workers)> run;
};

std::string fmt(double v) { return format_double(v); }

// Splits a CSV body into rows of cells; header dropped.
std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string cli_output(const std::string& args, int* code) {
  const std::string cmd = std::string(FEDRO_CLI_PATH) + " " + args + " 2>&1";
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    *code = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = ::pclose(pipe);
  *code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

long cli_value(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + ": ");
  if (pos == std::string::npos) return -1;
  return std::stol(out.substr(pos + key.size() + 2));
}

// --- 1 -----------------------------------------------------------------------

Outcome planner_exactness(unsigned) {
  Outcome o;
  const planner::SamplingSpec a{150, 15, 500, 0.99};
  const planner::SamplingSpec b{150, 15, 1500, 0.99};
  const auto start = std::chrono::steady_clock::now();
  const auto th_a = planner::sampling_threshold(a);
  const auto th_b = planner::sampling_threshold(b);
  const double micros =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
  int code_a = 0;
  int code_b = 0;
  const long cli_a = cli_value(cli_output("plan --n 150 --b 15 --T 500 --p 0.99", &code_a), "n_th");
  const long cli_b =
      cli_value(cli_output("plan --n 150 --b 15 --T 1500 --p 0.99", &code_b), "n_th");
  o.passed = th_a == 26 && th_b == 29 && cli_a == 26 && cli_b == 29 && code_a == 0 &&
             code_b == 0 && micros < 1000.0;
  o.detail = "n_th(T=500)=" + std::to_string(th_a) + " n_th(T=1500)=" + std::to_string(th_b) +
             " cli=" + std::to_string(cli_a) + "/" + std::to_string(cli_b) +
             " planner_us=" + fmt(micros);
  o.csv = std::to_string(th_a) + "," + std::to_string(th_b) + "\n";
  return o;
}

// --- 2 -----------------------------------------------------------------------

Outcome solver_consistency(unsigned workers) {
  const std::vector<std::int64_t> ns = [] {
    std::vector<std::int64_t> v;
    for (std::int64_t n = 10; n <= 60; ++n) v.push_back(n);
    return v;
  }();
  struct Tally {
    std::int64_t checked = 0;
    std::int64_t mismatches = 0;
    std::int64_t feasible = 0;
    std::string first_mismatch;
  };
  std::vector<Tally> tallies(ns.size());
  parallel_for(ns.size(), workers, [&](std::size_t i) {
    const std::int64_t n = ns[i];
    Tally& t = tallies[i];
    for (std::int64_t b = 0; 2 * b < n; ++b) {
      for (std::int64_t T : {10, 100, 1000}) {
        for (double p : {0.9, 0.99}) {
          const planner::SamplingSpec spec{n, b, T, p};
          for (std::int64_t n_hat = 1; n_hat <= n; ++n_hat) {
            const auto got = planner::min_tolerable_byz(spec, n_hat);
            const auto want = testing::linear_scan_b_hat(n, b, T, p, n_hat);
            ++t.checked;
            if (want) ++t.feasible;
            if (got != want) {
              ++t.mismatches;
              if (t.first_mismatch.empty()) {
                t.first_mismatch = "n=" + std::to_string(n) + " b=" + std::to_string(b) +
                                   " T=" + std::to_string(T) + " p=" + fmt(p) +
                                   " n_hat=" + std::to_string(n_hat);
              }
            }
          }
        }
      }
    }
  });
  Outcome o;
  CsvTable table({"n", "checked", "feasible", "mismatches"});
  std::int64_t checked = 0;
  std::int64_t mismatches = 0;
  std::string first;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    table.add(static_cast<long long>(ns[i]))
        .add(static_cast<long long>(tallies[i].checked))
        .add(static_cast<long long>(tallies[i].feasible))
        .add(static_cast<long long>(tallies[i].mismatches));
    table.end_row();
    checked += tallies[i].checked;
    mismatches += tallies[i].mismatches;
    if (first.empty()) first = tallies[i].first_mismatch;
  }
  o.passed = mismatches == 0 && checked > 0;
  o.detail = "instances=" + std::to_string(checked) + " mismatches=" + std::to_string(mismatches);
  if (!first.empty()) o.detail += " first=" + first;
  o.csv = table.str();
  return o;
}

// --- 3, 4 --------------------------------------------------------------------

Outcome from_report(const harness::CheckReport& r) {
  Outcome o;
  o.passed = r.passed();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& item : r.items) worst = std::min(worst, item.margin);
  o.detail = std::to_string(r.items.size()) + " properties, min margin=" + fmt(worst);
  for (const auto& item : r.items) {
    if (!item.passed) o.detail += " failed:" + item.name;
  }
  o.csv = r.str();
  return o;
}

Outcome d_properties(unsigned) { return from_report(harness::check_d_properties()); }

Outcome chernoff_sandwich(unsigned workers) {
  // Library tail and exact rational tail, each sandwiched.
  struct Job {
    std::int64_t M;
    int tenths;
  };
  std::vector<Job> jobs;
  for (std::int64_t M = 10; M <= 60; M += 10) {
    for (int tenths : {1, 2, 3}) jobs.push_back({M, tenths});
  }
  struct Tally {
    std::int64_t instances = 0;
    std::int64_t violations = 0;
    double max_oracle_gap = 0.0;
    double min_lower_slack = std::numeric_limits<double>::infinity();
    double min_upper_slack = std::numeric_limits<double>::infinity();
  };
  std::vector<Tally> tallies(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto [M, tenths] = jobs[j];
    const std::int64_t K = M * tenths / 10;
    const double beta = static_cast<double>(K) / static_cast<double>(M);
    Tally& t = tallies[j];
    for (std::int64_t m = 1; m <= M; ++m) {
      for (std::int64_t k = 1; k < m; ++k) {
        const double alpha = static_cast<double>(k) / static_cast<double>(m);
        if (!(alpha > beta)) continue;
        const double exact = testing::exact_hypergeom_tail(M, K, m, k);
        const double lib = planner::hypergeom_tail_exact(M, K, m, k);
        const double lo = planner::chernoff_lower(M, m, alpha, beta);
        const double up = planner::chernoff_upper(m, alpha, beta);
        ++t.instances;
        if (!(lo <= exact && exact <= up && lo <= lib && lib <= up)) ++t.violations;
        t.max_oracle_gap = std::max(t.max_oracle_gap, std::abs(lib - exact));
        t.min_lower_slack = std::min(t.min_lower_slack, exact - lo);
        t.min_upper_slack = std::min(t.min_upper_slack, up - exact);
      }
    }
  });
  Tally total;
  CsvTable table({"M", "beta", "instances", "violations", "max_oracle_gap", "min_lower_slack",
                  "min_upper_slack"});
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Tally& t = tallies[j];
    table.add(static_cast<long long>(jobs[j].M))
        .add(jobs[j].tenths / 10.0)
        .add(static_cast<long long>(t.instances))
        .add(static_cast<long long>(t.violations))
        .add(t.max_oracle_gap)
        .add(t.min_lower_slack)
        .add(t.min_upper_slack);
    table.end_row();
    total.instances += t.instances;
    total.violations += t.violations;
    total.max_oracle_gap = std::max(total.max_oracle_gap, t.max_oracle_gap);
    total.min_lower_slack = std::min(total.min_lower_slack, t.min_lower_slack);
    total.min_upper_slack = std::min(total.min_upper_slack, t.min_upper_slack);
  }
  Outcome o;
  o.passed = total.violations == 0 && total.instances > 0 && total.max_oracle_gap <= 1e-12;
  o.detail = "instances=" + std::to_string(total.instances) +
             " violations=" + std::to_string(total.violations) +
             " min_lower_slack=" + fmt(total.min_lower_slack) +
             " min_upper_slack=" + fmt(total.min_upper_slack) +
             " max|lib-exact|=" + fmt(total.max_oracle_gap);
  o.csv = table.str();
  return o;
}

// --- 5 -----------------------------------------------------------------------

Outcome event_statistics(unsigned workers) {
  const planner::SamplingSpec a{150, 15, 500, 0.99};
  const auto safe = planner::event_probability_mc(
      a, 26, 12, 2000, rng::derive_seed(kMasterSeed, rng::Tag::event_trial, 1), workers);
  const planner::SamplingSpec b{150, 30, 500, 0.99};
  const auto unsafe = planner::event_probability_mc(
      b, 1, 0, 2000, rng::derive_seed(kMasterSeed, rng::Tag::event_trial, 2), workers);
  const double floor = 0.99 - 3.0 * std::sqrt(0.01 * 0.99 / 2000.0);
  Outcome o;
  o.passed = safe.estimate >= floor && unsafe.estimate <= 0.01;
  o.detail = "P(n_hat=26,b_hat=12)=" + fmt(safe.estimate) + " floor=" + fmt(floor) +
             " P(n_hat=1,b/n=0.2)=" + fmt(unsafe.estimate);
  CsvTable table({"case", "trials", "successes", "estimate", "half_width"});
  table.add(std::string_view("n_hat=26"))
      .add(static_cast<long long>(safe.trials))
      .add(static_cast<long long>(safe.successes))
      .add(safe.estimate)
      .add(safe.half_width);
  table.end_row();
  table.add(std::string_view("n_hat=1"))
      .add(static_cast<long long>(unsafe.trials))
      .add(static_cast<long long>(unsafe.successes))
      .add(unsafe.estimate)
      .add(unsafe.half_width);
  table.end_row();
  o.csv = table.str();
  return o;
}

// --- 6 -----------------------------------------------------------------------

Outcome certification(unsigned) {
  aggregation::AggregatorConfig avg;
  avg.rule = aggregation::Rule::average;
  const auto mean_cert = aggregation::certify_robustness(
      avg, 10, 0, 1e-12, 200, rng::derive_seed(kMasterSeed, rng::Tag::certification, 6), 2);

  const std::vector<ParameterVector> inputs = {{1.0}, {2.0}, {3.0}, {100.0}};
  aggregation::AggregatorConfig tm;
  tm.rule = aggregation::Rule::cw_trimmed_mean;
  const auto k = aggregation::kappa_empirical(inputs, 1, tm);
  std::vector<double> witness;
  for (int i : k.witness_subset) witness.push_back(inputs[static_cast<std::size_t>(i)][0]);
  const bool witness_ok = witness == std::vector<double>{2.0, 3.0, 100.0};

  Outcome o;
  o.passed = mean_cert.instances >= 200 && mean_cert.max_ratio <= 1e-12 &&
             std::abs(k.kappa_hat - 0.49996) <= 1e-4 && witness_ok;
  std::string w;
  for (double v : witness) w += (w.empty() ? "" : ",") + fmt(v);
  o.detail = "average kappa_hat=" + fmt(mean_cert.max_ratio) + " over " +
             std::to_string(mean_cert.instances) +
             " instances; trimmed_mean kappa_hat=" + fmt(k.kappa_hat) + " witness={" + w + "}";
  o.csv = fmt(mean_cert.max_ratio) + "," + fmt(k.kappa_hat) + "," + w + "\n";
  return o;
}

// --- 7 -----------------------------------------------------------------------

Outcome exactness_under_agreement(unsigned workers) {
  constexpr int K = 4;
  constexpr int T = 200;
  constexpr double L = 1.0;
  tasks::TaskSpec spec;
  spec.kind = tasks::TaskKind::quadratic;
  spec.n = 20;
  spec.b = 6;
  spec.d = 10;
  spec.L = L;
  spec.spread = 0.0;
  spec.sigma = 0.0;
  spec.seed = rng::derive_seed(kMasterSeed, rng::Tag::task_generation, 7);
  const auto task = tasks::make_task(spec);
  // Shared center is the origin; start away from it so the check is not vacuous.
  const ParameterVector x0(10, 1.0);
  const double g0 = squared_norm(task->global_gradient(x0));
  const double gamma_c = 1.0 / (16.0 * L * K);
  // No violated round: every round contracts by (1 - gamma_c L)^K.
  const double rho = std::pow(1.0 - gamma_c * L, K);
  const double predicted = g0 * std::pow(rho, 2.0 * T);

  CsvTable table({"attack", "final_grad_norm_sq", "violated_rounds", "nonzero_dev_rounds"});
  double worst_final = 0.0;
  int nonzero_dev = 0;
  double trivial_final = 0.0;
  for (auto kind : {attacks::AttackKind::sign_flipping, attacks::AttackKind::foe,
                    attacks::AttackKind::alie, attacks::AttackKind::mimic}) {
    RunConfig c;
    c.task = spec;
    c.n_hat = 10;
    c.b_hat = 4;
    c.T = T;
    c.K = K;
    c.gamma_c = gamma_c;
    c.gamma_s = 1.0;
    c.aggregator.rule = aggregation::Rule::cw_trimmed_mean;
    c.attack.kind = kind;
    c.master_seed = kMasterSeed;
    c.threads = workers;
    c.x0 = x0;
    const auto m = run_fedro(c, *task);
    int violated = 0;
    int bad = 0;
    for (const auto& t : m.traces) {
      if (t.event_violated) {
        ++violated;
      } else if (!(t.dev_norm_sq == 0.0)) {
        ++bad;
      }
    }
    const double final_g = squared_norm(task->global_gradient(m.final_model));
    worst_final = std::max(worst_final, final_g);
    nonzero_dev += bad;
    table.add(attacks::attack_name(kind)).add(final_g).add(violated).add(bad);
    table.end_row();

    c.x0.reset();
    const auto trivial = run_fedro(c, *task);
    trivial_final = std::max(trivial_final, squared_norm(task->global_gradient(trivial.final_model)));
  }
  Outcome o;
  o.passed = worst_final <= 1e-18 && nonzero_dev == 0;
  o.detail = "max final_grad_norm_sq=" + fmt(worst_final) + " (threshold 1e-18, start " +
             fmt(g0) + ", violation-free closed form " + fmt(predicted) +
             "); dev_norm_sq nonzero on " + std::to_string(nonzero_dev) +
             " non-violated rounds; start at the shared center gives " + fmt(trivial_final);
  o.csv = table.str();
  return o;
}

// --- 8 -----------------------------------------------------------------------

Outcome fedavg_reduction(unsigned workers) {
  tasks::TaskSpec spec;
  spec.kind = tasks::TaskKind::quadratic;
  spec.n = 12;
  spec.b = 0;
  spec.d = 7;
  spec.L = 1.5;
  spec.spread = 1.0;
  spec.sigma = 0.5;
  spec.seed = rng::derive_seed(kMasterSeed, rng::Tag::task_generation, 8);
  const auto task = tasks::make_task(spec);

  RunConfig c;
  c.task = spec;
  c.n_hat = spec.n;
  c.b_hat = 0;
  c.T = 60;
  c.K = 1;
  c.gamma_c = 0.05;
  c.gamma_s = 0.8;
  c.aggregator.rule = aggregation::Rule::average;
  c.master_seed = kMasterSeed;
  c.threads = workers;
  c.x0 = ParameterVector{3.0, -1.0, 0.5, 2.0, -2.5, 0.25, 1.0};
  const auto m = run_fedro(c, *task);

  // Distributed SGD with plain loops: each client steps from x, the server
  // adds gamma_s times the mean step, mean taken relative to client 0.
  const std::size_t d = static_cast<std::size_t>(spec.d);
  ParameterVector x = *c.x0;
  int mismatched_rounds = 0;
  double max_sgd_gap = 0.0;
  for (int t = 0; t < c.T; ++t) {
    const double g_ref = squared_norm(task->global_gradient(x));
    if (std::memcmp(&g_ref, &m.traces[static_cast<std::size_t>(t)].grad_norm_sq,
                    sizeof(double)) != 0) {
      ++mismatched_rounds;
    }
    std::vector<std::vector<double>> steps;
    std::vector<double> plain(d, 0.0);
    for (int i = 0; i < spec.n; ++i) {
      rng::RngStream stream(rng::derive_seed(c.master_seed, rng::Tag::local_sgd,
                                             static_cast<std::uint64_t>(t),
                                             static_cast<std::uint64_t>(i)));
      const ParameterVector g = task->stochastic_gradient(i, x, stream);
      std::vector<double> step(d);
      for (std::size_t j = 0; j < d; ++j) {
        const double moved = x[j] + (-*c.gamma_c) * g[j];
        step[j] = moved - x[j];
        plain[j] += g[j];
      }
      steps.push_back(std::move(step));
    }
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t i = 1; i < steps.size(); ++i) acc = acc + (steps[i][j] - steps[0][j]);
      const double mean = steps[0][j] + acc / static_cast<double>(steps.size());
      const double textbook = x[j] - c.gamma_s * *c.gamma_c * plain[j] / spec.n;
      x[j] = x[j] + c.gamma_s * mean;
      max_sgd_gap = std::max(max_sgd_gap, std::abs(x[j] - textbook));
    }
  }
  const bool final_equal =
      x.size() == m.final_model.size() &&
      std::memcmp(x.data(), m.final_model.data(), x.size() * sizeof(double)) == 0;
  Outcome o;
  o.passed = final_equal && mismatched_rounds == 0;
  o.detail = std::string("final model ") + (final_equal ? "bit-identical" : "differs") +
             ", per-round gradient mismatches=" + std::to_string(mismatched_rounds) +
             ", max gap to textbook SGD update=" + fmt(max_sgd_gap);
  o.csv = harness::trace_csv(m.traces);
  return o;
}

// --- 9, 10, 11 ---------------------------------------------------------------

const std::vector<std::string>* find_row(const std::vector<std::vector<std::string>>& rows,
                                         const std::string& first, const std::string& second = "") {
  for (const auto& r : rows) {
    if (r.at(0) == first && (second.empty() || r.at(1) == second)) return &r;
  }
  return nullptr;
}

Outcome local_steps_benefit(unsigned workers) {
  harness::PresetOptions opt;
  opt.master_seed = kMasterSeed;
  opt.workers = workers;
  opt.replicates = 20;
  opt.rounds = 300;
  const auto r = harness::run_preset("local_steps_sweep", opt);
  const auto rows = csv_rows(r.aggregate_csv);
  // Columns: K, replicates, median_avg_grad_norm_sq, ...
  std::vector<double> med;
  std::string detail;
  for (const char* K : {"1", "4", "16"}) {
    const auto* row = find_row(rows, K);
    med.push_back(row ? std::stod(row->at(2)) : std::numeric_limits<double>::quiet_NaN());
    detail += std::string(detail.empty() ? "" : " ") + "K=" + K + ":" + fmt(med.back());
  }
  Outcome o;
  o.passed = med[0] > med[1] && med[1] > med[2];
  o.detail = "median avg_grad_norm_sq " + detail;
  o.csv = r.aggregate_csv;
  for (const auto& cell : r.cells) o.csv += cell.label + "\n" + cell.csv;
  return o;
}

Outcome diminishing_return(unsigned workers) {
  harness::PresetOptions opt;
  opt.master_seed = kMasterSeed;
  opt.workers = workers;
  opt.replicates = 20;
  opt.rounds = 300;
  const auto r = harness::run_preset("subsample_sweep", opt);
  const auto rows = csv_rows(r.aggregate_csv);
  const planner::SamplingSpec spec{400, 40, 300, 0.99};
  const auto n_th = std::to_string(planner::sampling_threshold(spec));
  const auto n_opt = std::to_string(planner::optimal_threshold(spec));
  // Columns: n_hat, b_hat, replicates, median_avg_grad_norm_sq, ...
  const auto value = [&](const std::string& n_hat) {
    const auto* row = find_row(rows, n_hat);
    return row ? std::stod(row->at(3)) : std::numeric_limits<double>::quiet_NaN();
  };
  const double e_th = value(n_th);
  const double e_opt = value(n_opt);
  const double e_n = value("400");
  const double gain_low = e_th - e_opt;
  const double gain_high = e_opt - e_n;
  Outcome o;
  o.passed = gain_low > 0 && gain_high <= 0.25 * gain_low;
  o.detail = "median avg_grad_norm_sq n_th=" + n_th + ":" + fmt(e_th) + " n_opt=" + n_opt + ":" +
             fmt(e_opt) + " n=400:" + fmt(e_n) + " gain(opt->n)/gain(th->opt)=" +
             fmt(gain_high / gain_low);
  o.csv = r.aggregate_csv;
  for (const auto& cell : r.cells) o.csv += cell.label + "\n" + cell.csv;
  return o;
}

Outcome spread_and_deviation(unsigned workers) {
  // Same task and per-replicate seeds as the local-steps sweep.
  tasks::TaskSpec spec;
  spec.kind = tasks::TaskKind::quadratic;
  spec.n = 50;
  spec.b = 5;
  spec.d = 10;
  spec.L = 1.0;
  spec.spread = 0.1;
  spec.sigma = 1.0;
  spec.seed = rng::derive_seed(kMasterSeed, rng::Tag::task_generation,
                               rng::fnv1a("local_steps_sweep"));
  const auto task = tasks::make_task(spec);
  const auto constants = task->constants(ParameterVector(10));

  aggregation::AggregatorConfig tm;
  tm.rule = aggregation::Rule::cw_trimmed_mean;
  const auto cert = aggregation::certify_robustness(
      tm, 10, 2, std::numeric_limits<double>::infinity(), 200,
      rng::derive_seed(kMasterSeed, rng::Tag::certification, 11), 10);
  const double kappa = cert.max_ratio;

  CsvTable table({"K", "replicate", "mean_honest_spread", "mean_dev_norm_sq"});
  bool ok = true;
  std::string detail = "kappa_hat=" + fmt(kappa) + " zeta=" + fmt(constants.zeta);
  for (int K : {1, 4, 16}) {
    const double gamma_c = 1.0 / (36.0 * spec.L * K);
    const std::string label = "K=" + std::to_string(K);
    std::vector<double> spreads(20);
    std::vector<double> devs(20);
    parallel_for(20, workers, [&](std::size_t rep) {
      RunConfig c;
      c.task = spec;
      c.n_hat = 10;
      c.b_hat = 2;
      c.T = 300;
      c.K = K;
      c.gamma_c = gamma_c;
      c.gamma_s = 1.0;
      c.aggregator = tm;
      c.attack.kind = attacks::AttackKind::alie;
      c.attack.scale = 1.0;
      c.master_seed = rng::derive_seed(kMasterSeed, rng::Tag::preset_cell,
                                       rng::fnv1a("local_steps_sweep/" + label), rep);
      c.threads = 1;
      const auto m = run_fedro(c, *task);
      double s = 0.0;
      double v = 0.0;
      int count = 0;
      for (const auto& t : m.traces) {
        if (t.event_violated || !std::isfinite(t.dev_norm_sq)) continue;
        s += t.honest_spread;
        v += t.dev_norm_sq;
        ++count;
      }
      spreads[rep] = s / count;
      devs[rep] = v / count;
    });
    for (std::size_t rep = 0; rep < 20; ++rep) {
      table.add(K).add(static_cast<long long>(rep)).add(spreads[rep]).add(devs[rep]);
      table.end_row();
    }
    const double spread_bound = local_spread_bound(K, constants.sigma, constants.zeta, gamma_c);
    const double dev_bound =
        aggregation_deviation_bound(K, constants.sigma, constants.zeta, gamma_c, kappa);
    const double s_med = harness::median(spreads);
    const double d_med = harness::median(devs);
    ok = ok && s_med <= 1.2 * spread_bound && d_med <= 1.2 * dev_bound;
    detail += " " + label + ": spread " + fmt(s_med) + "/" + fmt(spread_bound) + " dev " +
              fmt(d_med) + "/" + fmt(dev_bound);
  }
  Outcome o;
  o.passed = ok && kappa > 0;
  o.detail = detail;
  o.csv = table.str();
  return o;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "planner_exactness", 1.0, planner_exactness},
      {2, "solver_consistency", 30.0, solver_consistency},
      {3, "d_properties", 1.0, d_properties},
      {4, "chernoff_sandwich", 10.0, chernoff_sandwich},
      {5, "event_statistics", 60.0, event_statistics},
      {6, "certification", 5.0, certification},
      {7, "exactness_under_agreement", 1.0, exactness_under_agreement},
      {8, "fedavg_reduction", 1.0, fedavg_reduction},
      {9, "local_steps_benefit", 300.0, local_steps_benefit},
      {10, "diminishing_return", 600.0, diminishing_return},
      {11, "spread_and_deviation", 300.0, spread_and_deviation},
  };

  bool all = true;
  std::vector<std::string> first_csv;
  const auto report = [&](int id, const char* name, bool passed, double seconds, double limit,
                          const std::string& detail) {
    const bool in_time = seconds < limit;
    const bool ok = passed && in_time;
    all = all && ok;
    char time[32];
    std::snprintf(time, sizeof time, "%.3fs", seconds);
    std::cout << (ok ? "PASS" : "FAIL") << " C" << id << " " << name << " time=" << time
              << (in_time ? "" : " (over " + format_double(limit) + "s limit)") << " " << detail
              << std::endl;
  };

  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(1);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(c.id, c.name, o.passed, s, c.limit_seconds, o.detail);
    first_csv.push_back(o.csv);
  }

  // Same seeds, different worker count.
  const auto start = std::chrono::steady_clock::now();
  std::string differing;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string csv;
    try {
      csv = criteria[i].run(3).csv;
    } catch (const std::exception& e) {
      csv = std::string("exception: ") + e.what();
    }
    if (csv != first_csv[i] || csv.empty()) {
      differing += (differing.empty() ? "" : ",") + std::string("C") + std::to_string(criteria[i].id);
    }
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(12, "determinism", differing.empty(), s, std::numeric_limits<double>::infinity(),
         differing.empty() ? "criteria 1-11 byte-identical with workers=1 and workers=3"
                           : "outputs differ for " + differing);
  return all ? 0 : 1;
}
