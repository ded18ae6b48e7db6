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

#include "heatcast/oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "heatcast/rng.hpp"

namespace heatcast
{

namespace
{

// Pixel set as a fixed-width bitmask; 9 words cover the 24x24 limit.
constexpr int kBruteForceMaxSide = 24;
constexpr std::size_t kMaskWords = (kBruteForceMaxSide * kBruteForceMaxSide + 63) / 64;
using PixelMask = std::array<std::uint64_t, kMaskWords>;

double masked_weight(
  const PixelMask & mask, const PixelMask & exclude, std::span<const double> values)
{
  double sum = 0.0;
  for (std::size_t w = 0; w < kMaskWords; ++w) {
    std::uint64_t bits = mask[w] & ~exclude[w];
    while (bits != 0) {
      const int bit = std::countr_zero(bits);
      sum += values[w * 64 + static_cast<std::size_t>(bit)];
      bits &= bits - 1;
    }
  }
  return sum;
}

PixelMask mask_union(const PixelMask & a, const PixelMask & b)
{
  PixelMask out{};
  for (std::size_t w = 0; w < kMaskWords; ++w) {
    out[w] = a[w] | b[w];
  }
  return out;
}

}  // namespace

double objective_coverage(const ProbabilityGrid & grid, std::span<const Vec2> points, double radius)
{
  validate(grid);
  if (points.empty() || !(radius > 0.0)) {
    throw std::invalid_argument("objective needs points and a positive radius");
  }
  const GridSpec & spec = grid.spec;
  const double radius_sq = radius * radius;
  std::vector<double> row_sums(static_cast<std::size_t>(spec.height), 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < spec.height; ++iy) {
    double sum = 0.0;
    for (int ix = 0; ix < spec.width; ++ix) {
      const Vec2 center = spec.pixel_center(ix, iy);
      for (Vec2 point : points) {
        if (squared_distance(center, point) <= radius_sq) {
          sum += grid.at(ix, iy);
          break;
        }
      }
    }
    row_sums[static_cast<std::size_t>(iy)] = sum;
  }
  double total = 0.0;
  for (double sum : row_sums) {
    total += sum;
  }
  return total;
}

double objective_fde(const ProbabilityGrid & grid, std::span<const Vec2> points)
{
  validate(grid);
  if (points.empty()) {
    throw std::invalid_argument("objective needs points");
  }
  const GridSpec & spec = grid.spec;
  std::vector<double> row_sums(static_cast<std::size_t>(spec.height), 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < spec.height; ++iy) {
    double sum = 0.0;
    for (int ix = 0; ix < spec.width; ++ix) {
      const double value = grid.at(ix, iy);
      if (value == 0.0) {
        continue;
      }
      const Vec2 center = spec.pixel_center(ix, iy);
      double nearest_sq = std::numeric_limits<double>::infinity();
      for (Vec2 point : points) {
        nearest_sq = std::min(nearest_sq, squared_distance(center, point));
      }
      sum += value * std::sqrt(nearest_sq);
    }
    row_sums[static_cast<std::size_t>(iy)] = sum;
  }
  double total = 0.0;
  for (double sum : row_sums) {
    total += sum;
  }
  return total;
}

SampleSet brute_force_coverage(const ProbabilityGrid & grid, const CircleKernel & kernel, int k)
{
  validate(grid);
  const GridSpec & spec = grid.spec;
  if (spec.width > kBruteForceMaxSide || spec.height > kBruteForceMaxSide) {
    throw std::invalid_argument("brute force is limited to 24x24 grids");
  }
  if (k < 1 || k > 3) {
    throw std::invalid_argument("brute force is limited to k in 1..3");
  }
  if (kernel.resolution != spec.resolution) {
    throw std::invalid_argument("kernel was built for a different grid resolution");
  }
  const int n = static_cast<int>(spec.num_pixels());
  if (k > n) {
    throw std::invalid_argument("more picks requested than grid pixels");
  }

  // Coverage footprint of every candidate center, as a pixel mask.
  std::vector<PixelMask> masks(static_cast<std::size_t>(n));
  for (int iy = 0; iy < spec.height; ++iy) {
    for (int ix = 0; ix < spec.width; ++ix) {
      PixelMask & mask = masks[static_cast<std::size_t>(iy) * spec.width + ix];
      mask.fill(0);
      for (const auto & [dx, dy] : kernel.offsets) {
        const int jx = ix + dx;
        const int jy = iy + dy;
        if (spec.contains(jx, jy)) {
          const std::size_t bit = static_cast<std::size_t>(jy) * spec.width + jx;
          mask[bit / 64] |= std::uint64_t{1} << (bit % 64);
        }
      }
    }
  }

  struct Best
  {
    double weight = -1.0;
    std::array<int, 3> picks{-1, -1, -1};
  };
  const PixelMask empty_mask{};
  const std::span<const double> values(grid.values);

  // Enumerate K-subsets in lexicographic order; incremental union weights
  // keep the inner loop proportional to the kernel footprint. Each leading
  // pick gets its own slot so the parallel scan merges deterministically.
  std::vector<Best> best_per_lead(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1)
  for (int c1 = 0; c1 < n; ++c1) {
    Best best;
    const double w1 = masked_weight(masks[static_cast<std::size_t>(c1)], empty_mask, values);
    if (k == 1) {
      best = {w1, {c1, -1, -1}};
    } else {
      for (int c2 = c1 + 1; c2 < n; ++c2) {
        const double w2 =
          w1 + masked_weight(masks[static_cast<std::size_t>(c2)],
                             masks[static_cast<std::size_t>(c1)], values);
        if (k == 2) {
          if (w2 > best.weight) {
            best = {w2, {c1, c2, -1}};
          }
        } else {
          const PixelMask pair_mask =
            mask_union(masks[static_cast<std::size_t>(c1)], masks[static_cast<std::size_t>(c2)]);
          for (int c3 = c2 + 1; c3 < n; ++c3) {
            const double w3 =
              w2 + masked_weight(masks[static_cast<std::size_t>(c3)], pair_mask, values);
            if (w3 > best.weight) {
              best = {w3, {c1, c2, c3}};
            }
          }
        }
      }
    }
    best_per_lead[static_cast<std::size_t>(c1)] = best;
  }

  Best best;
  for (const Best & candidate : best_per_lead) {
    if (candidate.weight > best.weight) {  // strict: lexicographic first wins ties
      best = candidate;
    }
  }

  const double total = total_mass(grid);
  SampleSet out;
  PixelMask covered{};
  for (int j = 0; j < k; ++j) {
    const int index = best.picks[static_cast<std::size_t>(j)];
    out.points.push_back(spec.pixel_center(index % spec.width, index / spec.width));
    const double gain = masked_weight(masks[static_cast<std::size_t>(index)], covered, values);
    out.covered_mass.push_back(gain);
    out.probabilities.push_back(total > 0.0 ? gain / total : 0.0);
    covered = mask_union(covered, masks[static_cast<std::size_t>(index)]);
  }
  return out;
}

MetricsReport monte_carlo_metrics(
  const GaussianMixture & mixture, const SampleSet & samples, std::int64_t draws,
  std::uint64_t seed, double miss_threshold)
{
  validate(mixture);
  if (samples.points.empty()) {
    throw std::invalid_argument("monte_carlo_metrics needs a non-empty sample set");
  }
  if (samples.probabilities.size() != samples.points.size()) {
    throw std::invalid_argument("sample set field lengths disagree");
  }
  if (draws < 1) {
    throw std::invalid_argument("monte_carlo_metrics needs at least one draw");
  }
  if (!(miss_threshold > 0.0)) {
    throw std::invalid_argument("miss threshold must be positive");
  }

  bool p_defined = true;
  for (double p : samples.probabilities) {
    p_defined = p_defined && p > 0.0;
  }

  Rng rng(seed);
  MetricsReport report;
  report.num_cases = draws;
  report.misses.reserve(static_cast<std::size_t>(draws));
  const double threshold_sq = miss_threshold * miss_threshold;

  double mr_sum = 0.0;
  double fde_sum = 0.0;
  double p_fde_sum = 0.0;
  for (std::int64_t d = 0; d < draws; ++d) {
    const Vec2 gt = draw_ground_truth(mixture, rng);
    double nearest_sq = std::numeric_limits<double>::infinity();
    std::size_t nearest_k = 0;
    for (std::size_t m = 0; m < samples.points.size(); ++m) {
      const double sq = squared_distance(samples.points[m], gt);
      if (sq < nearest_sq) {  // strict: ties keep the lowest mode
        nearest_sq = sq;
        nearest_k = m;
      }
    }
    const bool missed = nearest_sq > threshold_sq;
    report.misses.push_back(missed ? 1 : 0);
    mr_sum += missed ? 1.0 : 0.0;
    const double fde = std::sqrt(nearest_sq);
    fde_sum += fde;
    if (p_defined) {
      p_fde_sum += fde - std::log(samples.probabilities[nearest_k]);
    }
  }

  const double n = static_cast<double>(draws);
  report.mr = mr_sum / n;
  report.min_fde = fde_sum / n;
  report.min_ade = report.min_fde;  // endpoints are one-point trajectories
  report.p_min_fde = p_defined ? p_fde_sum / n : std::numeric_limits<double>::quiet_NaN();
  report.p_min_ade = report.p_min_fde;
  return report;
}

}  // namespace heatcast
