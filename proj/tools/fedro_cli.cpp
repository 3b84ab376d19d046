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

// fedro: planning, simulation, presets and property checks.
//
// Exit codes: 0 success, 1 failed check or runtime error, 2 invalid
// arguments or configuration, 3 no feasible b_hat for the requested n_hat.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fedro/fl_core.hpp"
#include "fedro/harness/checks.hpp"
#include "fedro/harness/config.hpp"
#include "fedro/harness/presets.hpp"
#include "fedro/harness/report.hpp"
#include "fedro/sampling_planner.hpp"

namespace {

using fedro::harness::format_double;

constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;

struct PlanArgs {
  std::int64_t n = 0;
  std::int64_t b = 0;
  std::int64_t T = 0;
  double p = 0.0;
  std::optional<std::int64_t> n_hat;
  bool json = false;
};

int cmd_plan(const PlanArgs& a) {
  namespace planner = fedro::planner;
  const planner::SamplingSpec spec{a.n, a.b, a.T, a.p};
  try {
    spec.validate();
    if (a.n_hat && (*a.n_hat < 1 || *a.n_hat > a.n)) {
      throw std::invalid_argument("--n-hat must satisfy 1 <= n_hat <= n");
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  const auto plan = planner::make_plan(spec, a.n_hat);
  std::optional<double> bound;
  if (spec.p >= 0.5) bound = planner::impossibility_bound(spec);

  std::optional<std::int64_t> b_hat;
  std::optional<planner::ConditionStatus> status;
  if (a.n_hat) {
    b_hat = planner::min_tolerable_byz(spec, *a.n_hat);
    if (b_hat) status = planner::check_sampling_condition(spec, *a.n_hat, *b_hat);
  }
  const auto status_name = [](planner::ConditionStatus s) {
    switch (s) {
      case planner::ConditionStatus::satisfied:
        return "satisfied";
      case planner::ConditionStatus::violated:
        return "violated";
      case planner::ConditionStatus::infeasible_ratio:
        return "infeasible_ratio";
    }
    return "unknown";
  };

  if (a.json) {
    nlohmann::ordered_json j;
    j["n"] = a.n;
    j["b"] = a.b;
    j["T"] = a.T;
    j["p"] = a.p;
    j["n_th"] = plan.n_th;
    j["n_opt"] = plan.n_opt;
    j["impossibility_bound"] = bound ? nlohmann::ordered_json(*bound) : nullptr;
    if (a.n_hat) {
      j["n_hat"] = *a.n_hat;
      j["b_hat_star"] = b_hat ? nlohmann::ordered_json(*b_hat) : nullptr;
      j["condition"] = status ? status_name(*status) : "infeasible";
      j["unsafe"] = spec.p >= 0.5 && planner::is_unsafe(spec, *a.n_hat);
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "n_th: " << plan.n_th << "\n"
              << "n_opt: " << plan.n_opt << "\n"
              << "impossibility_bound: " << (bound ? format_double(*bound) : "n/a") << "\n";
    if (a.n_hat) {
      std::cout << "n_hat: " << *a.n_hat << "\n"
                << "b_hat_star: " << (b_hat ? std::to_string(*b_hat) : "none") << "\n"
                << "condition: " << (status ? status_name(*status) : "infeasible") << "\n";
      if (spec.p >= 0.5 && planner::is_unsafe(spec, *a.n_hat)) {
        std::cout << "warning: n_hat is below the impossibility bound\n";
      }
    }
  }
  if (a.n_hat && !b_hat) {
    std::cerr << "error: no feasible b_hat for n_hat = " << *a.n_hat << "\n";
    return kExitInfeasible;
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::filesystem::path& out_dir) {
  fedro::RunConfig config;
  try {
    config = fedro::harness::load_run_config(config_path);
  } catch (const fedro::harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInvalid;
  }
  fedro::RunMetrics metrics;
  try {
    metrics = fedro::run_fedro(config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInvalid;
  }
  fedro::harness::write_file(out_dir / "trace.csv", fedro::harness::trace_csv(metrics.traces));
  fedro::harness::write_file(out_dir / "summary.json",
                             fedro::harness::summary_json(config, metrics));
  std::cout << "avg_grad_norm_sq: " << format_double(metrics.avg_grad_norm_sq) << "\n"
            << "final_grad_norm_sq: " << format_double(metrics.final_grad_norm_sq) << "\n"
            << "event_held: " << (metrics.event_held ? "true" : "false") << "\n"
            << "wrote " << (out_dir / "trace.csv").string() << " and "
            << (out_dir / "summary.json").string() << "\n";
  return 0;
}

struct PresetArgs {
  std::string name;
  std::string out = "preset_out";
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::optional<int> replicates;
  std::optional<int> rounds;
};

int cmd_preset(const PresetArgs& a) {
  fedro::harness::PresetOptions options;
  options.master_seed = a.seed;
  options.workers = a.workers;
  options.replicates = a.replicates;
  options.rounds = a.rounds;
  fedro::harness::PresetResult result;
  try {
    result = fedro::harness::run_preset(a.name, options);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  const std::filesystem::path dir = std::filesystem::path(a.out) / a.name;
  fedro::harness::write_preset(result, dir);
  std::cout << result.aggregate_csv;
  std::cout << "wrote " << result.cells.size() << " cell tables and aggregate.csv to "
            << dir.string() << "\n";
  return 0;
}

struct CheckArgs {
  std::string suite = "all";
  std::string rule = "average";
  bool nnm = false;
  int n_hat = 10;
  int b_hat = 0;
  std::optional<double> kappa_claim;
  int trials = 200;
  std::uint64_t seed = 1;
  std::string task_kind = "quadratic";
  double spread = 1.0;
  double sigma = 1.0;
  int samples = 100000;
  int grid = 10;
};

int cmd_check(const CheckArgs& a) {
  using namespace fedro::harness;
  std::vector<CheckReport> reports;
  try {
    const bool all = a.suite == "all";
    if (all || a.suite == "d-properties") reports.push_back(check_d_properties());
    if (all || a.suite == "chernoff") reports.push_back(check_chernoff());
    if (all || a.suite == "kappa") {
      KappaCheckOptions o;
      o.rule.rule = fedro::aggregation::parse_rule(a.rule);
      o.rule.nnm = a.nnm;
      o.n_hat = a.n_hat;
      o.b_hat = a.b_hat;
      o.kappa_claim = a.kappa_claim;
      o.trials = a.trials;
      o.seed = a.seed;
      reports.push_back(check_kappa(o));
    }
    if (all || a.suite == "assumptions") {
      fedro::tasks::TaskSpec t;
      t.kind = fedro::tasks::parse_task_kind(a.task_kind);
      t.n = 20;
      t.b = 2;
      t.d = 10;
      t.spread = a.spread;
      t.sigma = a.sigma;
      t.seed = a.seed;
      reports.push_back(check_assumptions(t, a.samples, a.grid, a.seed));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  bool ok = true;
  for (const auto& r : reports) {
    std::cout << r.str();
    ok = ok && r.passed();
  }
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-robust federated averaging simulator and planner"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Sample-size thresholds and tolerance b_hat");
  plan_cmd->add_option("--n", plan.n, "Number of clients")->required();
  plan_cmd->add_option("--b", plan.b, "Number of Byzantine clients")->required();
  plan_cmd->add_option("--T", plan.T, "Number of rounds")->required();
  plan_cmd->add_option("--p", plan.p, "Target success probability")->required();
  plan_cmd->add_option("--n-hat", plan.n_hat, "Clients sampled per round");
  plan_cmd->add_flag("--json", plan.json, "Emit JSON");

  std::string config_path;
  std::string run_out = ".";
  auto* run_cmd = app.add_subcommand("run", "Run one simulation from a JSON config");
  run_cmd->add_option("config", config_path, "Run configuration")->required();
  run_cmd->add_option("--out-dir", run_out, "Directory for trace.csv and summary.json");

  PresetArgs preset;
  auto* preset_cmd = app.add_subcommand("preset", "Run an experiment preset");
  preset_cmd->add_option("name", preset.name, "Preset name")
      ->required()
      ->check(CLI::IsMember(fedro::harness::preset_names()));
  preset_cmd->add_option("--out", preset.out, "Output directory");
  preset_cmd->add_option("--seed", preset.seed, "Master seed");
  preset_cmd->add_option("--workers", preset.workers, "Worker cap (0: FEDRO_THREADS)");
  preset_cmd->add_option("--replicates", preset.replicates, "Replicates per cell");
  preset_cmd->add_option("--rounds", preset.rounds, "Rounds per run");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Run property suites");
  check_cmd->add_option("--suite", check.suite, "Suite to run")
      ->check(CLI::IsMember({"all", "d-properties", "chernoff", "kappa", "assumptions"}));
  check_cmd->add_option("--rule", check.rule, "Aggregation rule (kappa)");
  check_cmd->add_flag("--nnm", check.nnm, "Apply nearest-neighbor mixing (kappa)");
  check_cmd->add_option("--n-hat", check.n_hat, "Inputs per instance (kappa)");
  check_cmd->add_option("--b-hat", check.b_hat, "Tolerated Byzantine inputs (kappa)");
  check_cmd->add_option("--kappa-claim", check.kappa_claim, "Claimed robustness constant");
  check_cmd->add_option("--trials", check.trials, "Random instances (kappa)");
  check_cmd->add_option("--seed", check.seed, "Seed");
  check_cmd->add_option("--task", check.task_kind, "quadratic or logistic (assumptions)");
  check_cmd->add_option("--spread", check.spread, "Center spread (assumptions)");
  check_cmd->add_option("--sigma", check.sigma, "Noise level (assumptions)");
  check_cmd->add_option("--samples", check.samples, "Noise samples (assumptions)");
  check_cmd->add_option("--grid", check.grid, "Grid points (assumptions)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*plan_cmd) return cmd_plan(plan);
    if (*run_cmd) return cmd_run(config_path, run_out);
    if (*preset_cmd) return cmd_preset(preset);
    if (*check_cmd) return cmd_check(check);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitInvalid;
}
