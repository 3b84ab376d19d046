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

#include "fedro/harness/presets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

#include "fedro/fl_core.hpp"
#include "fedro/harness/report.hpp"
#include "fedro/parallel.hpp"
#include "fedro/rng.hpp"
#include "fedro/sampling_planner.hpp"

namespace fedro::harness {
namespace {

using Coords = std::vector<std::pair<std::string, std::string>>;
using Extras = std::vector<std::pair<std::string, double>>;

struct CellPlan {
  Coords coords;
  RunConfig config;
  // Cell-level quantities repeated on every replicate row.
  std::function<Extras(std::uint64_t cell_seed)> extras;
};

struct ReplicateRow {
  int replicate = 0;
  std::uint64_t seed = 0;
  double avg = 0.0;
  double conditional = 0.0;
  double final_value = 0.0;
  bool held = true;
  int violated = 0;
  double mean_dev = 0.0;
  double mean_spread = 0.0;
};

std::string label_of(const Coords& coords) {
  std::string s;
  for (const auto& [k, v] : coords) {
    if (!s.empty()) s += '_';
    s += k + "=" + v;
  }
  return s;
}

double finite_mean(const std::vector<RoundTrace>& traces, double RoundTrace::*field) {
  double acc = 0.0;
  int count = 0;
  for (const auto& t : traces) {
    if (std::isfinite(t.*field)) {
      acc += t.*field;
      ++count;
    }
  }
  return count > 0 ? acc / count : std::numeric_limits<double>::quiet_NaN();
}

std::uint64_t cell_seed(std::string_view preset, const std::string& label,
                        std::uint64_t master, int replicate) {
  const std::string key = std::string(preset) + "/" + label;
  return rng::derive_seed(master, rng::Tag::preset_cell, rng::fnv1a(key),
                          static_cast<std::uint64_t>(replicate));
}

const std::vector<std::string> kRunColumns = {
    "replicate",        "master_seed",          "avg_grad_norm_sq", "avg_grad_norm_sq_conditional",
    "final_grad_norm_sq", "event_held",         "violated_rounds",  "mean_dev_norm_sq",
    "mean_honest_spread"};

// Runs every cell of a simulation grid and assembles the per-cell and
// aggregate tables.
PresetResult run_grid(std::string_view name, const std::vector<CellPlan>& cells,
                      const tasks::Task& task, int replicates, const PresetOptions& options) {
  struct CellOutput {
    std::vector<ReplicateRow> rows;
    Extras extras;
  };
  std::vector<CellOutput> outputs(cells.size());
  parallel_for(cells.size(), options.workers, [&](std::size_t c) {
    const CellPlan& plan = cells[c];
    const std::string label = label_of(plan.coords);
    CellOutput& out = outputs[c];
    if (plan.extras) out.extras = plan.extras(cell_seed(name, label, options.master_seed, -1));
    for (int rep = 0; rep < replicates; ++rep) {
      RunConfig config = plan.config;
      config.master_seed = cell_seed(name, label, options.master_seed, rep);
      config.threads = 1;
      const RunMetrics m = run_fedro(config, task);
      ReplicateRow row;
      row.replicate = rep;
      row.seed = config.master_seed;
      row.avg = m.avg_grad_norm_sq;
      row.conditional = m.avg_grad_norm_sq_conditional;
      row.final_value = m.final_grad_norm_sq;
      row.held = m.event_held;
      for (const auto& t : m.traces) row.violated += t.event_violated ? 1 : 0;
      row.mean_dev = finite_mean(m.traces, &RoundTrace::dev_norm_sq);
      row.mean_spread = finite_mean(m.traces, &RoundTrace::honest_spread);
      out.rows.push_back(row);
    }
  });

  PresetResult result;
  result.name = std::string(name);
  std::vector<std::string> agg_columns;
  for (const auto& [k, v] : cells.front().coords) agg_columns.push_back(k);
  for (const char* col : {"replicates", "median_avg_grad_norm_sq",
                          "median_avg_grad_norm_sq_conditional", "median_final_grad_norm_sq",
                          "violation_freq", "median_mean_dev_norm_sq",
                          "median_mean_honest_spread"}) {
    agg_columns.emplace_back(col);
  }
  for (const auto& [k, v] : outputs.front().extras) agg_columns.push_back(k);
  CsvTable aggregate(agg_columns);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const CellOutput& out = outputs[c];
    std::vector<std::string> columns = kRunColumns;
    for (const auto& [k, v] : out.extras) columns.push_back(k);
    CsvTable table(columns);
    std::vector<double> avg;
    std::vector<double> cond;
    std::vector<double> fin;
    std::vector<double> dev;
    std::vector<double> spread;
    int violations = 0;
    for (const auto& row : out.rows) {
      table.add(row.replicate)
          .add(std::string_view(std::to_string(row.seed)))
          .add(row.avg)
          .add(row.conditional)
          .add(row.final_value)
          .add(row.held)
          .add(row.violated)
          .add(row.mean_dev)
          .add(row.mean_spread);
      for (const auto& [k, v] : out.extras) table.add(v);
      table.end_row();
      avg.push_back(row.avg);
      cond.push_back(row.conditional);
      fin.push_back(row.final_value);
      dev.push_back(row.mean_dev);
      spread.push_back(row.mean_spread);
      violations += row.held ? 0 : 1;
    }
    result.cells.push_back({label_of(cells[c].coords), table.str()});

    for (const auto& [k, v] : cells[c].coords) aggregate.add(std::string_view(v));
    aggregate.add(static_cast<int>(out.rows.size()))
        .add(median(avg))
        .add(median(cond))
        .add(median(fin))
        .add(static_cast<double>(violations) / static_cast<double>(out.rows.size()))
        .add(median(dev))
        .add(median(spread));
    for (const auto& [k, v] : out.extras) aggregate.add(v);
    aggregate.end_row();
  }
  result.aggregate_csv = aggregate.str();
  return result;
}

std::string fmt(double v) { return format_double(v); }

tasks::TaskSpec quadratic(std::string_view preset, std::uint64_t master, int n, int b,
                          double spread) {
  tasks::TaskSpec t;
  t.kind = tasks::TaskKind::quadratic;
  t.n = n;
  t.b = b;
  t.d = 10;
  t.L = 1.0;
  t.spread = spread;
  t.sigma = 1.0;
  t.seed = rng::derive_seed(master, rng::Tag::task_generation, rng::fnv1a(preset));
  return t;
}

RunConfig base_config(const tasks::TaskSpec& task, int n_hat, int b_hat, int T, int K) {
  RunConfig c;
  c.task = task;
  c.n_hat = n_hat;
  c.b_hat = b_hat;
  c.T = T;
  c.K = K;
  c.gamma_c = 1.0 / (36.0 * task.L * K);
  c.gamma_s = 1.0;
  c.aggregator.rule = aggregation::Rule::cw_trimmed_mean;
  c.attack.kind = attacks::AttackKind::alie;
  c.attack.scale = 1.0;
  return c;
}

PresetResult plan_sweep(const PresetOptions&) {
  const std::vector<std::string> columns = {
      "beta", "n", "b", "T", "p", "n_th", "n_opt", "impossibility_bound", "b_hat_at_n_th",
      "b_hat_at_n_opt"};
  PresetResult result;
  result.name = "plan_sweep";
  CsvTable aggregate(columns);
  for (int k = 1; k <= 9; ++k) {
    planner::SamplingSpec spec{1000, 50 * k, 500, 0.99};
    const auto n_th = planner::sampling_threshold(spec);
    const auto n_opt = planner::optimal_threshold(spec);
    const auto at_th = planner::min_tolerable_byz(spec, n_th);
    const auto at_opt = planner::min_tolerable_byz(spec, n_opt);
    const std::string beta = fmt(spec.byzantine_fraction());
    const auto fill = [&](CsvTable& t) {
      t.add(std::string_view(beta))
          .add(static_cast<long long>(spec.n))
          .add(static_cast<long long>(spec.b))
          .add(static_cast<long long>(spec.T))
          .add(spec.p)
          .add(static_cast<long long>(n_th))
          .add(static_cast<long long>(n_opt))
          .add(planner::impossibility_bound(spec))
          .add(std::string_view(at_th ? std::to_string(*at_th) : "none"))
          .add(std::string_view(at_opt ? std::to_string(*at_opt) : "none"));
      t.end_row();
    };
    CsvTable cell(columns);
    fill(cell);
    fill(aggregate);
    result.cells.push_back({"beta=" + beta, cell.str()});
  }
  result.aggregate_csv = aggregate.str();
  return result;
}

PresetResult threshold_break(const PresetOptions& o) {
  const int T = o.rounds.value_or(100);
  const planner::SamplingSpec spec{150, 30, T, 0.99};
  const auto spec_task = quadratic("threshold_break", o.master_seed, 150, 30, 0.1);
  const auto task = tasks::make_task(spec_task);
  std::vector<CellPlan> cells;
  for (std::int64_t n_hat = 1; n_hat <= planner::sampling_threshold(spec); ++n_hat) {
    const int nh = static_cast<int>(n_hat);
    const int bh = (nh + 1) / 2 - 1;
    CellPlan plan;
    plan.coords = {{"n_hat", std::to_string(nh)}, {"b_hat", std::to_string(bh)}};
    plan.config = base_config(spec_task, nh, bh, T, 1);
    plan.config.attack = {attacks::AttackKind::sign_flipping, std::nullopt, 0};
    plan.config.violation_mode = ViolationMode::takeover_zero;
    plan.extras = [spec, n_hat, bh](std::uint64_t seed) {
      const auto est = planner::event_probability_mc(spec, n_hat, bh, 2000, seed, 1);
      return Extras{{"mc_violation_prob", 1.0 - est.estimate},
                    {"mc_half_width", est.half_width}};
    };
    cells.push_back(std::move(plan));
  }
  return run_grid("threshold_break", cells, *task, o.replicates.value_or(50), o);
}

PresetResult attack_grid(const PresetOptions& o) {
  const int T = o.rounds.value_or(200);
  const auto spec_task = quadratic("attack_grid", o.master_seed, 50, 5, 0.5);
  const auto task = tasks::make_task(spec_task);
  std::vector<CellPlan> cells;
  struct RuleChoice {
    std::string name;
    aggregation::AggregatorConfig config;
  };
  std::vector<RuleChoice> rules;
  for (auto r : {aggregation::Rule::average, aggregation::Rule::cw_trimmed_mean,
                 aggregation::Rule::cw_median, aggregation::Rule::geometric_median}) {
    aggregation::AggregatorConfig a;
    a.rule = r;
    rules.push_back({std::string(aggregation::rule_name(r)), a});
  }
  aggregation::AggregatorConfig nnm;
  nnm.rule = aggregation::Rule::cw_trimmed_mean;
  nnm.nnm = true;
  rules.push_back({"nnm_cw_trimmed_mean", nnm});
  for (auto kind : {attacks::AttackKind::sign_flipping, attacks::AttackKind::foe,
                    attacks::AttackKind::alie, attacks::AttackKind::mimic}) {
    for (const auto& rule : rules) {
      CellPlan plan;
      plan.coords = {{"attack", std::string(attacks::attack_name(kind))}, {"rule", rule.name}};
      plan.config = base_config(spec_task, 20, 4, T, 4);
      plan.config.aggregator = rule.config;
      plan.config.attack = {kind, std::nullopt, 0};
      if (kind == attacks::AttackKind::alie) plan.config.attack.scale = 1.0;
      cells.push_back(std::move(plan));
    }
  }
  return run_grid("attack_grid", cells, *task, o.replicates.value_or(5), o);
}

PresetResult local_steps_sweep(const PresetOptions& o) {
  const int T = o.rounds.value_or(300);
  const auto spec_task = quadratic("local_steps_sweep", o.master_seed, 50, 5, 0.1);
  const auto task = tasks::make_task(spec_task);
  std::vector<CellPlan> cells;
  for (int K : {1, 2, 4, 8, 16}) {
    CellPlan plan;
    plan.coords = {{"K", std::to_string(K)}};
    plan.config = base_config(spec_task, 10, 2, T, K);
    cells.push_back(std::move(plan));
  }
  return run_grid("local_steps_sweep", cells, *task, o.replicates.value_or(20), o);
}

PresetResult subsample_sweep(const PresetOptions& o) {
  const int T = o.rounds.value_or(300);
  const planner::SamplingSpec spec{400, 40, T, 0.99};
  const auto spec_task = quadratic("subsample_sweep", o.master_seed, 400, 40, 0.1);
  const auto task = tasks::make_task(spec_task);
  const auto n_th = planner::sampling_threshold(spec);
  const auto n_opt = planner::optimal_threshold(spec);
  std::vector<std::int64_t> sizes = {n_th, (n_th + n_opt) / 4, (n_th + n_opt) / 2, n_opt,
                                     spec.n};
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::vector<CellPlan> cells;
  for (std::int64_t n_hat : sizes) {
    const auto b_hat = planner::min_tolerable_byz(spec, n_hat);
    if (!b_hat) continue;
    CellPlan plan;
    plan.coords = {{"n_hat", std::to_string(n_hat)}, {"b_hat", std::to_string(*b_hat)}};
    plan.config = base_config(spec_task, static_cast<int>(n_hat), static_cast<int>(*b_hat), T, 4);
    cells.push_back(std::move(plan));
  }
  return run_grid("subsample_sweep", cells, *task, o.replicates.value_or(20), o);
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"plan_sweep", "threshold_break", "attack_grid",
                                                 "local_steps_sweep", "subsample_sweep"};
  return names;
}

double median(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return !std::isfinite(v); }),
               values.end());
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

PresetResult run_preset(std::string_view name, const PresetOptions& options) {
  if (options.replicates && *options.replicates < 1) {
    throw std::invalid_argument("replicates must be >= 1");
  }
  if (options.rounds && *options.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (name == "plan_sweep") return plan_sweep(options);
  if (name == "threshold_break") return threshold_break(options);
  if (name == "attack_grid") return attack_grid(options);
  if (name == "local_steps_sweep") return local_steps_sweep(options);
  if (name == "subsample_sweep") return subsample_sweep(options);
  throw std::invalid_argument("unknown preset: " + std::string(name));
}

void write_preset(const PresetResult& result, const std::filesystem::path& dir) {
  for (const auto& cell : result.cells) write_file(dir / (cell.label + ".csv"), cell.csv);
  write_file(dir / "aggregate.csv", result.aggregate_csv);
}

}  // namespace fedro::harness
