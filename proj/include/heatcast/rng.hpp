// Copyright 2026 The Heatcast Authors
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

#ifndef HEATCAST_RNG_HPP_
#define HEATCAST_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "heatcast/vec2.hpp"

namespace heatcast
{

// splitmix64 step; used to derive independent substreams from one base seed
// (e.g. one stream per sweep row) so parallel evaluation order can never
// change results.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt)
{
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 is fully specified by the standard, and the transforms below use
// only elementary operations, so draws are reproducible across platforms.
// std::normal_distribution is deliberately avoided: its algorithm is
// implementation-defined.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal pair via Box-Muller (no state caching: a 2D draw costs
  // two engine steps, which keeps stream accounting simple).
  Vec2 standard_normal_2d()
  {
    double u1 = uniform();
    while (u1 == 0.0) {
      u1 = uniform();
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace heatcast

#endif  // HEATCAST_RNG_HPP_
