// Copyright 2026 The leakbench Authors
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

#ifndef LEAKBENCH_RNG_HPP_
#define LEAKBENCH_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

namespace leakbench {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// mt19937_64 keyed by a seed and a stream path, e.g. (kind, m, circuit).
// Draws use raw 64-bit outputs only, so results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) : engine_(mix(seed, stream)) {}
  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform over the 4^n Pauli labels.
  std::uint64_t pauli_index(int n) {
    if (n < 1 || n > 32) throw std::invalid_argument("Pauli sampling supports 1 <= n <= 32");
    const std::uint64_t x = next();
    return n == 32 ? x : x & ((std::uint64_t{1} << (2 * n)) - 1);
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
    std::uint64_t state = seed;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t part : stream) {
      state = h ^ part;
      h = splitmix64(state);
    }
    return h;
  }

  std::mt19937_64 engine_;
};

}  // namespace leakbench

#endif  // LEAKBENCH_RNG_HPP_
