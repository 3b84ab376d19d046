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
#include <span>
#include <string_view>

namespace fedro::simd {

// Dense double-precision kernels used by the aggregation rules, local SGD
// and the run diagnostics.
//
// Every backend computes bit-identical results:
//  * element-wise kernels perform exactly one IEEE operation per step
//    (no fused multiply-add);
//  * reductions accumulate into four interleaved partial sums (lane k takes
//    indices i with i % 4 == k over the blocked prefix), combine them as
//    (s0 + s1) + (s2 + s3), and then add the tail sequentially.
// The scalar backend is the reference; the SIMD backends are tested for
// exact equality against it.

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  Backend backend;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y[i] = y[i] + alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // acc[i] = acc[i] + (a[i] - base[i])
  void (*accumulate_diff)(const double* a, const double* base, double* acc,
                          std::size_t n);
  // out[i] = base[i] + acc[i] / count
  void (*finish_shifted_mean)(const double* base, const double* acc,
                              double count, double* out, std::size_t n);
  // out[i] = scale * (a[i] - b[i])
  void (*scaled_diff)(double scale, const double* a, const double* b,
                      double* out, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}
#if defined(__x86_64__)
namespace avx2 {
const KernelTable& table();
}
#endif
#if defined(__aarch64__)
namespace neon {
const KernelTable& table();
}
#endif

std::string_view backend_name(Backend backend);

// True when the backend is compiled in and supported by the running CPU.
bool backend_available(Backend backend);

// The active table. Chosen once at first use: the best available backend,
// unless the FEDRO_SIMD environment variable names another one.
const KernelTable& kernels();

// Table for a specific backend; throws std::invalid_argument if unavailable.
const KernelTable& kernels_for(Backend backend);

Backend active_backend();
void set_backend(Backend backend);

// Span conveniences over the active table; throw std::invalid_argument on a
// length mismatch.
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace fedro::simd
