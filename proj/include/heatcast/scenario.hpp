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

#ifndef HEATCAST_SCENARIO_HPP_
#define HEATCAST_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "heatcast/grid.hpp"
#include "heatcast/rng.hpp"
#include "heatcast/sampling.hpp"
#include "heatcast/vec2.hpp"

namespace heatcast
{

// Synthetic endpoint distribution: isotropic Gaussian modes with positive
// weights summing to 1. Ground truth for every synthetic evaluation in this
// library is drawn from one of these, so metric expectations have known or
// brute-force-checkable values.
struct MixtureComponent
{
  Vec2 mean;
  double sigma = 1.0;   // meters, isotropic
  double weight = 1.0;  // positive, mixture weights sum to 1
};

struct GaussianMixture
{
  std::string name;
  std::vector<MixtureComponent> components;
  std::uint64_t seed = 0;  // default stream for draws tied to this scenario
};

// Throws std::invalid_argument for empty mixtures, non-positive sigma/weight,
// or weights that do not sum to 1 within 1e-6.
void validate(const GaussianMixture & mixture);

// Rasterized mixture density: value = density at the pixel center times the
// pixel area. Every mode mean must lie inside the grid. Mass approaches 1 as
// the grid covers the modes (within 2% when every mean is >= 5 sigma from the
// border).
ProbabilityGrid mixture_to_grid(const GaussianMixture & mixture, const GridSpec & spec);

// One endpoint draw: component chosen by weight, then an isotropic Gaussian
// sample from it. Consumes exactly three uniforms from `rng`.
Vec2 draw_ground_truth(const GaussianMixture & mixture, Rng & rng);

// Single-draw convenience with a fresh stream.
Vec2 draw_ground_truth(const GaussianMixture & mixture, std::uint64_t seed);

// Miss-rate / displacement trade-off of the refinement stage.
struct TradeoffRow
{
  int iterations = 0;  // refinement iterations L
  double expected_mr = 0.0;
  double expected_fde = 0.0;
};

struct TradeoffCurve
{
  std::vector<TradeoffRow> rows;
};

// For each L in `l_values` (strictly ascending, starting at 0): rasterize the
// mixture, run the coverage sampler once, refine its picks with L iterations,
// and Monte-Carlo estimate expected miss rate / displacement with `draws`
// fresh ground-truth draws on a per-(seed, L) stream. Row L=0 is the pure
// coverage sampler. Deterministic given (mixture, config, seed).
TradeoffCurve sweep_tradeoff(
  const GaussianMixture & mixture, const SamplerConfig & config, std::span<const int> l_values,
  std::int64_t draws, std::uint64_t seed, const GridSpec & spec = GridSpec::centered(224, 224, 0.5));

// Fixed ten-mixture evaluation suite. Each mixture has 4-5 narrow modes in
// three well-separated groups: one or two asymmetric pairs (a heavy and a
// light core 2.4 m apart, 3:1 weight ratio) plus isolated singletons, with
// dyadic weights summing to exactly 1. Designed so the qualitative sampler
// relationships are decisively visible with K = 3 endpoints:
//   - coverage picks straddle each pair and refinement walks them toward the
//     heavy core (expected displacement falls, miss rate rises with L);
//   - value-ranked picking spends its budget on the strongest peaks and
//     never serves the light cores.
std::vector<GaussianMixture> synthetic_suite();

// Plain-text mixture description:
//
//   # comment / blank lines ignored
//   name <identifier>
//   seed <uint64>
//   mode <mean_x> <mean_y> <sigma> <weight>   (one line per component)
//
// Weights are renormalized to sum exactly 1 after validation. Errors carry
// the offending line number.
GaussianMixture read_mixture_file(const std::filesystem::path & path);
void write_mixture_file(const std::filesystem::path & path, const GaussianMixture & mixture);

// CSV rows "L,expected_mr,expected_fde".
void write_tradeoff_csv(const std::filesystem::path & path, const TradeoffCurve & curve);

}  // namespace heatcast

#endif  // HEATCAST_SCENARIO_HPP_
