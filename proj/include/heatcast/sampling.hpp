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

#ifndef HEATCAST_SAMPLING_HPP_
#define HEATCAST_SAMPLING_HPP_

#include <span>
#include <utility>
#include <vector>

#include "heatcast/grid.hpp"
#include "heatcast/vec2.hpp"

namespace heatcast
{

// Integer pixel offsets (dx, dy) with dx^2 + dy^2 <= (radius/resolution)^2,
// i.e. a rasterized disk used both for sliding circle integrals and for
// zeroing covered regions. Always contains (0, 0) and is symmetric under
// negation and axis swap.
struct CircleKernel
{
  double radius = 0.0;      // meters
  double resolution = 0.0;  // meters per pixel of the grid it applies to
  std::vector<std::pair<int, int>> offsets;
};

// Throws std::invalid_argument unless radius and resolution are positive.
CircleKernel circle_kernel(double radius_m, double resolution_m_per_px);

// coverage[p] = sum of grid values over the kernel disk centered at p, with
// zero padding outside the grid: the probability mass captured by accepting
// pixel p as an endpoint. Kernel resolution must match the grid's.
ProbabilityGrid coverage_map(const ProbabilityGrid & grid, const CircleKernel & kernel);

// K endpoint candidates in metric coordinates. `probabilities` is the
// sampler's own mass-fraction estimate (callers typically re-assign via
// assign_probabilities); `covered_mass` is the greedy gain per pick for the
// coverage sampler, and the plain circle integral at the returned point for
// the other samplers. Covered mass is always expressed in input-grid units
// (upsampled-grid sums are divided by the squared upsample factor), so the
// gains of disjoint disks never exceed total_mass(input).
struct SampleSet
{
  std::vector<Vec2> points;
  std::vector<double> probabilities;
  std::vector<double> covered_mass;
};

struct SamplerConfig
{
  int k = 6;                       // number of endpoints
  double mr_radius_m = 1.8;        // coverage / suppression disk radius
  int upsample_factor = 2;         // bilinear upsampling before sampling
  int fde_iters = 0;               // centroid refinement iterations (L)
  double fde_neighborhood_m = 3.0; // refinement influence radius
  double miss_threshold_m = 2.0;   // miss distance used by evaluation
};

// Throws std::invalid_argument on non-positive k/radii/factor.
void validate(const SamplerConfig & config);

// Greedy coverage sampler. The grid is bilinearly upsampled by
// config.upsample_factor, then K times: take the argmax of the coverage map
// (ties: larger center value, then lowest row-major index; already-picked
// pixels are skipped so an exhausted grid keeps yielding distinct pixels in
// tie-break order with zero gain) and zero the kernel disk around the pick.
// Directly minimizes the expected miss rate of the K picks.
// Throws std::domain_error if the grid has no positive mass.
SampleSet sample_mr(const ProbabilityGrid & grid, const SamplerConfig & config);

// Expected-distance refinement. Starting from `init` (normally the coverage
// sampler's output), runs config.fde_iters simultaneous centroid updates over
// the nonzero pixels x_i (weight p_i) of the same upsampled grid:
//
//   c_k <- sum_i 1[d_ik <= r] (p_i / d_ik)(m_i / d_ik) x_i / (analogous sum)
//
// with d_ik the distance to centroid k, m_i the distance to the nearest
// centroid, r = config.fde_neighborhood_m, and d_ik clamped below by half a
// pixel in both denominator factors. A centroid whose neighborhood carries no
// weight is left unchanged. More iterations trade miss rate for expected
// final displacement. fde_iters = 0 returns `init` verbatim; otherwise
// covered_mass is recomputed as the circle integral at each refined point.
SampleSet sample_fde(
  const ProbabilityGrid & grid, const SampleSet & init, const SamplerConfig & config);

// Baseline: rank pixels by value (ties: lowest row-major index) and accept
// greedily, skipping pixels within config.mr_radius_m of an accepted pick,
// until K picks. Runs on the same upsampled grid as the other samplers.
SampleSet sample_nms(const ProbabilityGrid & grid, const SamplerConfig & config);

// Baseline: probability-weighted Lloyd iterations (hard assignment to the
// nearest centroid, weighted-mean update, empty clusters keep their centroid)
// initialized from sample_mr, run to assignment convergence or 50 iterations.
SampleSet sample_kmeans(const ProbabilityGrid & grid, const SamplerConfig & config);

// Point-cloud cores of the two refiners, exposed for direct testing and
// reuse. `min_distance` is the distance clamp (half a pixel when called on a
// grid). Centroid updates accumulate compensated fixed-block-order sums, so
// results are deterministic for any thread count and exactly invariant to a
// common scale on `weights` whenever the scaled weights are exact.
std::vector<Vec2> fde_refine(
  std::span<const Vec2> points, std::span<const double> weights, std::vector<Vec2> centroids,
  int iterations, double neighborhood, double min_distance);

std::vector<Vec2> kmeans_refine(
  std::span<const Vec2> points, std::span<const double> weights, std::vector<Vec2> centroids,
  int max_iterations = 50);

}  // namespace heatcast

#endif  // HEATCAST_SAMPLING_HPP_
