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

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fedro {

// A dense d-dimensional model, update or gradient vector.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::size_t dim, double fill = 0.0)
      : values_(dim, fill) {}
  ParameterVector(std::initializer_list<double> values) : values_(values) {}
  explicit ParameterVector(std::vector<double> values)
      : values_(std::move(values)) {}

  static ParameterVector zeros(std::size_t dim) { return ParameterVector(dim); }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }

  const std::vector<double>& values() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool all_finite() const;

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;

 private:
  std::vector<double> values_;
};

double squared_norm(const ParameterVector& v);
double squared_distance(const ParameterVector& a, const ParameterVector& b);

// a - b
ParameterVector difference(const ParameterVector& a, const ParameterVector& b);

// Mean of the selected vectors computed as
//   first + (sum_i (v_i - first)) / count,
// accumulated in the given order. The result equals the common value
// exactly when all selected vectors agree.
ParameterVector shifted_mean(std::span<const ParameterVector> vectors);
ParameterVector shifted_mean(std::span<const ParameterVector> vectors,
                             std::span<const int> indices);

}  // namespace fedro
