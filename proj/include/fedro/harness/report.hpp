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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fedro/fl_core.hpp"

namespace fedro::harness {

inline constexpr std::string_view kTraceHeader =
    "round,grad_norm_sq,loss,byz_sampled,event_violated,dev_norm_sq,honest_spread";

// 17 significant digits, '.' decimal point regardless of locale; nan and
// inf spelled out.
std::string format_double(double value);

std::string trace_csv(const std::vector<RoundTrace>& traces);
void write_trace_csv(std::ostream& out, const std::vector<RoundTrace>& traces);

// Summary document for one run.
std::string summary_json(const RunConfig& config, const RunMetrics& metrics);

// Generic table writer used by the presets.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  CsvTable& add(std::string_view cell);
  CsvTable& add(double value);
  CsvTable& add(long long value);
  CsvTable& add(int value) { return add(static_cast<long long>(value)); }
  CsvTable& add(bool value) { return add(static_cast<long long>(value ? 1 : 0)); }
  // Throws std::logic_error if the row is incomplete.
  void end_row();

  std::string str() const;
  std::size_t rows() const { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::string body_;
  std::size_t filled_ = 0;
  std::size_t rows_ = 0;
};

// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace fedro::harness
