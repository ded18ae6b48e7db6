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

#ifndef HEATCAST_ORACLE_HPP_
#define HEATCAST_ORACLE_HPP_

#include <cstdint>
#include <span>

#include "heatcast/grid.hpp"
#include "heatcast/metrics.hpp"
#include "heatcast/sampling.hpp"
#include "heatcast/scenario.hpp"
#include "heatcast/vec2.hpp"

namespace heatcast
{

// Slow, independent evaluators the samplers are tested against. None of these
// share code with the samplers beyond the basic grid types.

// Probability mass within `radius` of at least one point:
//   sum_i p_i * 1[min_k ||c_k - x_i|| <= radius]
// over all pixel centers x_i. On a normalized grid this is 1 minus the
// expected miss rate of the points at that radius.
double objective_coverage(
  const ProbabilityGrid & grid, std::span<const Vec2> points, double radius);

// Probability-weighted expected distance to the nearest point:
//   sum_i p_i * min_k ||c_k - x_i||.
double objective_fde(const ProbabilityGrid & grid, std::span<const Vec2> points);

// Exhaustive optimum of objective_coverage over all K-subsets of pixel
// centers (kernel radius defines coverage). Ties broken by lexicographic
// pixel order. Exponential: restricted to grids of at most 24x24 and
// k <= 3 (std::invalid_argument beyond).
SampleSet brute_force_coverage(const ProbabilityGrid & grid, const CircleKernel & kernel, int k);

// Monte-Carlo estimate of endpoint metrics for a fixed sample set against a
// mixture: `draws` ground-truth draws from a stream seeded with `seed`.
// Samples are treated as single-point trajectories, so min_ade == min_fde.
// The p-variants use the samples' own probabilities and are NaN unless all
// of them are positive. Deterministic given (mixture, samples, draws, seed).
MetricsReport monte_carlo_metrics(
  const GaussianMixture & mixture, const SampleSet & samples, std::int64_t draws,
  std::uint64_t seed, double miss_threshold = 2.0);

}  // namespace heatcast

#endif  // HEATCAST_ORACLE_HPP_
