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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fedro/simd/kernels.hpp"

namespace fedro::simd {
namespace {

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(FEDRO_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::neon:
#if defined(FEDRO_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* table_pointer(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return &scalar::table();
    case Backend::avx2:
#if defined(FEDRO_HAVE_AVX2)
      return &avx2::table();
#else
      return nullptr;
#endif
    case Backend::neon:
#if defined(FEDRO_HAVE_NEON)
      return &neon::table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Backend best_backend() {
  if (const char* forced = std::getenv("FEDRO_SIMD")) {
    const std::string name(forced);
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
      if (name == backend_name(b) && backend_available(b)) return b;
    }
  }
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{table_pointer(best_backend())};
  return table;
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

bool backend_available(Backend backend) {
  return table_pointer(backend) != nullptr && cpu_supports(backend);
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

const KernelTable& kernels_for(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("SIMD backend not available: " +
                                std::string(backend_name(backend)));
  }
  return *table_pointer(backend);
}

Backend active_backend() { return kernels().backend; }

void set_backend(Backend backend) {
  active().store(&kernels_for(backend), std::memory_order_release);
}

namespace {
void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return kernels().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return kernels().squared_distance(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size());
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace fedro::simd
