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

#include <arm_neon.h>

#include <cstddef>

#include "fedro/simd/kernels.hpp"

// Two float64x2 accumulators stand in for the four canonical lanes:
// lo = (s0, s1), hi = (s2, s3).
namespace fedro::simd::neon {
namespace {

inline double combine_lanes(float64x2_t lo, float64x2_t hi) {
  return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
         (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double sum = combine_lanes(lo, hi);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    lo = vaddq_f64(lo, vmulq_f64(d0, d0));
    hi = vaddq_f64(hi, vmulq_f64(d1, d1));
  }
  double sum = combine_lanes(lo, hi);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void accumulate_diff(const double* a, const double* base, double* acc,
                     std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(base + i));
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), d));
  }
  for (; i < n; ++i) acc[i] = acc[i] + (a[i] - base[i]);
}

void finish_shifted_mean(const double* base, const double* acc, double count,
                         double* out, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(count);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i,
              vaddq_f64(vld1q_f64(base + i), vdivq_f64(vld1q_f64(acc + i), vc)));
  }
  for (; i < n; ++i) out[i] = base[i] + acc[i] / count;
}

void scaled_diff(double scale, const double* a, const double* b, double* out,
                 std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vmulq_f64(vs, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
  }
  for (; i < n; ++i) out[i] = scale * (a[i] - b[i]);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Backend::neon,    &dot,
                             &squared_distance, &axpy,
                             &accumulate_diff, &finish_shifted_mean,
                             &scaled_diff};
  return t;
}

}  // namespace fedro::simd::neon
