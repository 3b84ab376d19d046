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

#include <cstddef>

#include "fedro/simd/kernels.hpp"

namespace fedro::simd::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double sum = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  double sum = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void accumulate_diff(const double* a, const double* base, double* acc,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + (a[i] - base[i]);
}

void finish_shifted_mean(const double* base, const double* acc, double count,
                         double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + acc[i] / count;
}

void scaled_diff(double scale, const double* a, const double* b, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * (a[i] - b[i]);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Backend::scalar,  &dot,
                             &squared_distance, &axpy,
                             &accumulate_diff, &finish_shifted_mean,
                             &scaled_diff};
  return t;
}

}  // namespace fedro::simd::scalar
