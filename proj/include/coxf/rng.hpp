// Copyright 2026 The coxf Authors. All Rights Reserved.
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

#ifndef COXF_RNG_HPP_
#define COXF_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "coxf/types.hpp"

namespace coxf {

// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

// Seed for stream `stream` of a generator seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seedable, splittable generator.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// implements its own bounded-integer and unit-interval draws, so a given seed
/// produces the same values on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Independent child generator; does not advance this one.
  Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Uniform on [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal (Box-Muller, no cached second value).
  double normal();

  // k distinct values from [0, population), partial Fisher-Yates, sorted.
  std::vector<Index> sample_without_replacement(Index population, Index k);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Draws floor(d) or ceil(d) with the probabilities that make the mean d.
Index draw_fractional_count(Rng& rng, double d);

}  // namespace coxf

#endif  // COXF_RNG_HPP_
