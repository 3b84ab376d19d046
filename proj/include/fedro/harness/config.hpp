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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fedro/fl_core.hpp"

namespace fedro::harness {

// Schema or value error in a run configuration; the message starts with the
// dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Parses a JSON run configuration. Unknown fields, missing required fields,
// wrong types and values violating the run invariants raise ConfigError.
//
//   {
//     "task": {"kind": "quadratic", "n": 20, "b": 2, "d": 10, "L": 1.0,
//              "spread": 0.1, "sigma": 1.0, "seed": 7},
//     "n_hat": 10, "b_hat": 2, "T": 100, "K": 4,
//     "gamma_c": 0.005,            // or "auto"
//     "gamma_s": 1.0,
//     "aggregator": {"rule": "cw_trimmed_mean", "nnm": false},
//     "attack": {"kind": "alie", "scale": 1.0},
//     "master_seed": 1,
//     "x0": [0, ...],              // optional, zero by default
//     "violation_mode": "continue_and_flag",
//     "threads": 0                 // optional
//   }
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Inverse of parse_run_config.
std::string run_config_json(const RunConfig& config);

}  // namespace fedro::harness
