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

#include "fedro/parameter_vector.hpp"

#include <cmath>
#include <stdexcept>

#include "fedro/simd/kernels.hpp"

namespace fedro {

bool ParameterVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double squared_norm(const ParameterVector& v) {
  return simd::dot(v.span(), v.span());
}

double squared_distance(const ParameterVector& a, const ParameterVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  return simd::squared_distance(a.span(), b.span());
}

ParameterVector difference(const ParameterVector& a, const ParameterVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  ParameterVector out(a.size());
  simd::kernels().scaled_diff(1.0, a.data(), b.data(), out.data(), a.size());
  return out;
}

namespace {

template <typename At>
ParameterVector shifted_mean_impl(std::size_t count, At at) {
  if (count == 0) throw std::invalid_argument("mean of an empty set");
  const ParameterVector& base = at(0);
  const std::size_t d = base.size();
  const auto& k = simd::kernels();
  ParameterVector acc(d);
  for (std::size_t i = 1; i < count; ++i) {
    const ParameterVector& v = at(i);
    if (v.size() != d) throw std::invalid_argument("dimension mismatch");
    k.accumulate_diff(v.data(), base.data(), acc.data(), d);
  }
  ParameterVector out(d);
  k.finish_shifted_mean(base.data(), acc.data(), static_cast<double>(count),
                        out.data(), d);
  return out;
}

}  // namespace

ParameterVector shifted_mean(std::span<const ParameterVector> vectors) {
  return shifted_mean_impl(vectors.size(), [&](std::size_t i) -> const ParameterVector& {
    return vectors[i];
  });
}

ParameterVector shifted_mean(std::span<const ParameterVector> vectors,
                             std::span<const int> indices) {
  return shifted_mean_impl(indices.size(), [&](std::size_t i) -> const ParameterVector& {
    return vectors[static_cast<std::size_t>(indices[i])];
  });
}

}  // namespace fedro
