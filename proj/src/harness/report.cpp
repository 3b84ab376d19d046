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

#include "fedro/harness/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace fedro::harness {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const std::vector<RoundTrace>& traces) {
  out << trace_csv(traces);
}

std::string trace_csv(const std::vector<RoundTrace>& traces) {
  std::string s(kTraceHeader);
  s += '\n';
  for (const auto& t : traces) {
    s += std::to_string(t.round);
    s += ',';
    s += format_double(t.grad_norm_sq);
    s += ',';
    s += format_double(t.loss);
    s += ',';
    s += std::to_string(t.byz_sampled);
    s += ',';
    s += t.event_violated ? '1' : '0';
    s += ',';
    s += format_double(t.dev_norm_sq);
    s += ',';
    s += format_double(t.honest_spread);
    s += '\n';
  }
  return s;
}

namespace {

// JSON has no NaN or infinity; those become strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::json vector_json(const ParameterVector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (double x : v) arr.push_back(number(x));
  return arr;
}

}  // namespace

std::string summary_json(const RunConfig& config, const RunMetrics& metrics) {
  int violated = 0;
  for (const auto& t : metrics.traces) violated += t.event_violated ? 1 : 0;
  nlohmann::ordered_json j;
  j["task"] = std::string(tasks::task_kind_name(config.task.kind));
  j["n"] = config.task.n;
  j["b"] = config.task.b;
  j["n_hat"] = config.n_hat;
  j["b_hat"] = config.b_hat;
  j["T"] = config.T;
  j["K"] = config.K;
  j["gamma_c"] = number(metrics.gamma_c);
  j["gamma_s"] = number(metrics.gamma_s);
  j["aggregator"] = aggregation::describe(config.aggregator);
  j["attack"] = std::string(attacks::attack_name(config.attack.kind));
  j["violation_mode"] = std::string(violation_mode_name(config.violation_mode));
  j["master_seed"] = config.master_seed;
  j["avg_grad_norm_sq"] = number(metrics.avg_grad_norm_sq);
  j["avg_grad_norm_sq_conditional"] = number(metrics.avg_grad_norm_sq_conditional);
  j["final_grad_norm_sq"] = number(metrics.final_grad_norm_sq);
  j["event_held"] = metrics.event_held;
  j["violated_rounds"] = violated;
  j["output_round"] = metrics.output_round;
  j["output_model"] = vector_json(metrics.output_model);
  j["final_model"] = vector_json(metrics.final_model);
  return j.dump(2) + "\n";
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::add(std::string_view cell) {
  if (filled_ == columns_.size()) throw std::logic_error("csv row has too many cells");
  if (filled_ > 0) body_ += ',';
  body_ += cell;
  ++filled_;
  return *this;
}

CsvTable& CsvTable::add(double value) { return add(std::string_view(format_double(value))); }

CsvTable& CsvTable::add(long long value) { return add(std::string_view(std::to_string(value))); }

void CsvTable::end_row() {
  if (filled_ != columns_.size()) throw std::logic_error("csv row is incomplete");
  body_ += '\n';
  filled_ = 0;
  ++rows_;
}

std::string CsvTable::str() const {
  std::string s;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i > 0) s += ',';
    s += columns_[i];
  }
  s += '\n';
  return s + body_;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace fedro::harness
