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

#include <cstdint>
#include <random>
#include <string_view>

namespace fedro::rng {

// Purpose tags keep streams for different consumers disjoint even when the
// remaining coordinates coincide.
enum class Tag : std::uint64_t {
  client_sampling = 1,
  local_sgd = 2,
  output_selection = 3,
  task_generation = 4,
  event_trial = 5,
  certification = 6,
  preset_cell = 7,
  assumption_check = 8,
};

// splitmix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for the stream identified by (master, tag, a, b, c).
constexpr std::uint64_t derive_seed(std::uint64_t master, Tag tag,
                                    std::uint64_t a = 0, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  std::uint64_t h = mix(master);
  h = mix(h ^ static_cast<std::uint64_t>(tag));
  h = mix(h ^ a);
  h = mix(h ^ b);
  return mix(h ^ c);
}

// 64-bit FNV-1a, used to turn preset cell labels into seeds.
constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// A deterministic random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the distributions are implemented here
// because the standard library's are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). Unbiased (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound);

  // Standard normal (Box-Muller; the second variate is cached).
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace fedro::rng
