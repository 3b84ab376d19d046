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
#include <string>
#include <vector>

#include "fedro/aggregation.hpp"
#include "fedro/tasks.hpp"

namespace fedro::harness {

struct CheckItem {
  std::string name;
  bool passed = false;
  // Smallest slack observed; negative when the check failed.
  double margin = 0.0;
  std::string detail;
};

struct CheckReport {
  std::string suite;
  std::vector<CheckItem> items;
  bool passed() const;
  std::string str() const;
};

// Derivative formula (central differences, 1e-6), monotonicity on either
// side of beta, positivity off the diagonal with D(beta || beta) <= 1e-12,
// and midpoint convexity in the first argument (slack 1e-9) on a grid.
CheckReport check_d_properties();

// chernoff_lower <= exact hypergeometric tail <= chernoff_upper for
// M in {10, 20, ..., 60}, beta in {0.1, 0.2, 0.3}, every m <= M and every
// integer alpha m with beta < alpha < 1.
CheckReport check_chernoff();

struct KappaCheckOptions {
  aggregation::AggregatorConfig rule;
  int n_hat = 10;
  int b_hat = 0;
  std::optional<double> kappa_claim;
  int trials = 200;
  std::uint64_t seed = 1;
  int dim = 2;
};

// Reports the empirical kappa over the certification instances; fails when
// it exceeds the claim (or is not finite when no claim is given).
CheckReport check_kappa(const KappaCheckOptions& options);

// verify_assumptions on the given task.
CheckReport check_assumptions(const tasks::TaskSpec& task, int sample_count, int grid,
                              std::uint64_t seed);

}  // namespace fedro::harness
