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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedro::harness {

// plan_sweep: thresholds against b/n in {0.05, ..., 0.45} (n=1000, T=500,
//   p=0.99).
// threshold_break: n=150, b=30, n_hat from 1 to n_th with
//   b_hat = ceil(n_hat/2) - 1, takeover_zero violation mode; the observed
//   violation frequency is reported next to the Monte Carlo estimate.
// attack_grid: every attack against every rule on a heterogeneous
//   quadratic.
// local_steps_sweep: K in {1, 2, 4, 8, 16} with gamma_c = 1/(36LK), ALIE.
// subsample_sweep: n=400, b=40, n_hat from n_th through n_opt to n with the
//   smallest tolerable b_hat at each size.
const std::vector<std::string>& preset_names();

struct PresetOptions {
  std::uint64_t master_seed = 0;
  // 0 reads FEDRO_THREADS.
  unsigned workers = 0;
  // Per-cell replicate count and round count overrides.
  std::optional<int> replicates;
  std::optional<int> rounds;
};

struct PresetCell {
  // Grid coordinates, e.g. "K=4"; also the file stem.
  std::string label;
  std::string csv;
};

struct PresetResult {
  std::string name;
  std::vector<PresetCell> cells;
  // One row per cell keyed by the grid coordinates; every column is
  // recomputable from the cell files.
  std::string aggregate_csv;
};

// Throws std::invalid_argument for an unknown preset name.
PresetResult run_preset(std::string_view name, const PresetOptions& options);

// Writes <dir>/<label>.csv for each cell and <dir>/aggregate.csv.
void write_preset(const PresetResult& result, const std::filesystem::path& dir);

// Median of the finite values; NaN when there are none.
double median(std::vector<double> values);

}  // namespace fedro::harness
