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

#include <immintrin.h>

#include <cstddef>

#include "fedro/simd/kernels.hpp"

namespace fedro::simd::avx2 {
namespace {

// Lane k of the accumulator holds the scalar backend's partial sum s_k.
inline double combine_lanes(__m256d acc) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod =
        _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  double sum = combine_lanes(acc);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double sum = combine_lanes(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void accumulate_diff(const double* a, const double* base, double* acc,
                     std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(base + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), d));
  }
  for (; i < n; ++i) acc[i] = acc[i] + (a[i] - base[i]);
}

void finish_shifted_mean(const double* base, const double* acc, double count,
                         double* out, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(count);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d q = _mm256_div_pd(_mm256_loadu_pd(acc + i), vc);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(base + i), q));
  }
  for (; i < n; ++i) out[i] = base[i] + acc[i] / count;
}

void scaled_diff(double scale, const double* a, const double* b, double* out,
                 std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, d));
  }
  for (; i < n; ++i) out[i] = scale * (a[i] - b[i]);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Backend::avx2,    &dot,
                             &squared_distance, &axpy,
                             &accumulate_diff, &finish_shifted_mean,
                             &scaled_diff};
  return t;
}

}  // namespace fedro::simd::avx2
