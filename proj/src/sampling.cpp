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

#include "heatcast/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "heatcast/numerics.hpp"

namespace heatcast
{

namespace
{

// Fixed block size for order-independent parallel accumulation: partials are
// produced per block and combined serially in block order, so sums never
// depend on the thread count.
constexpr std::size_t kReduceBlock = 4096;

struct WorkingGrid
{
  ProbabilityGrid grid;      // upsampled copy the sampler operates on
  double total = 0.0;        // its total mass
  double radius_px = 0.0;    // config.mr_radius_m in working pixels
  double mass_scale = 1.0;   // working-grid sums -> input-grid mass units
};

WorkingGrid prepare_working(const ProbabilityGrid & grid, const SamplerConfig & config)
{
  validate(config);
  validate(grid);
  WorkingGrid working{upsample_bilinear(grid, config.upsample_factor), 0.0, 0.0, 1.0};
  working.total = total_mass(working.grid);
  if (!(working.total > 0.0)) {
    throw std::domain_error("sampler requires a grid with positive total mass");
  }
  if (static_cast<std::int64_t>(config.k) > working.grid.spec.num_pixels()) {
    throw std::invalid_argument("more samples requested than grid pixels");
  }
  working.radius_px = config.mr_radius_m / working.grid.spec.resolution;
  // Value-preserving upsampling multiplies value sums by factor^2; covered
  // mass is reported in input-grid units so it stays comparable with
  // total_mass(input). The factor is a power of two, so the scaling is exact.
  const double factor = static_cast<double>(config.upsample_factor);
  working.mass_scale = 1.0 / (factor * factor);
  return working;
}

// Circle integral at a pixel, by kernel offsets with zero padding. The one
// coverage formula used everywhere: the full map, the incremental greedy
// update, and per-pick bookkeeping all reduce to this, which keeps them
// bit-identical.
double coverage_at_pixel(const ProbabilityGrid & grid, const CircleKernel & kernel, int cx, int cy)
{
  const GridSpec & spec = grid.spec;
  double sum = 0.0;
  for (const auto & [dx, dy] : kernel.offsets) {
    const int ix = cx + dx;
    const int iy = cy + dy;
    if (spec.contains(ix, iy)) {
      sum += grid.at(ix, iy);
    }
  }
  return sum;
}

// Greedy argmax candidate. Coverage decides; plateaus fall back to the
// center-pixel value (so an isolated mode is picked at the mode, not at the
// top-left pixel of its coverage plateau) and finally to the lowest row-major
// index.
struct PickCandidate
{
  double coverage = -1.0;
  double center_value = -1.0;
  std::int64_t index = -1;

  bool better_than(const PickCandidate & other) const
  {
    if (coverage != other.coverage) {
      return coverage > other.coverage;
    }
    if (center_value != other.center_value) {
      return center_value > other.center_value;
    }
    return index < other.index;
  }
};

struct GreedyResult
{
  SampleSet set;
  std::vector<std::int64_t> pixel_indices;  // picks on the working grid
};

GreedyResult greedy_coverage(WorkingGrid & working, const SamplerConfig & config)
{
  const GridSpec & spec = working.grid.spec;
  const CircleKernel kernel = circle_kernel(config.mr_radius_m, spec.resolution);
  const int width = spec.width;
  const int height = spec.height;

  ProbabilityGrid coverage = coverage_map(working.grid, kernel);

  // Already-picked pixels are taken out of the race with a sentinel below any
  // real coverage, so an exhausted grid keeps yielding fresh pixels in
  // tie-break order.
  constexpr double kPickedSentinel = -1.0;

  GreedyResult result;
  const int radius_int = static_cast<int>(std::floor(working.radius_px));
  for (int pick = 0; pick < config.k; ++pick) {
    std::vector<PickCandidate> row_best(static_cast<std::size_t>(height));
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < height; ++iy) {
      PickCandidate best;
      const double * cov_row = coverage.values.data() + static_cast<std::size_t>(iy) * width;
      const double * val_row = working.grid.values.data() + static_cast<std::size_t>(iy) * width;
      for (int ix = 0; ix < width; ++ix) {
        const PickCandidate candidate{
          cov_row[ix], val_row[ix], static_cast<std::int64_t>(iy) * width + ix};
        if (candidate.better_than(best)) {
          best = candidate;
        }
      }
      row_best[static_cast<std::size_t>(iy)] = best;
    }
    PickCandidate best;
    for (const PickCandidate & candidate : row_best) {
      if (candidate.better_than(best)) {
        best = candidate;
      }
    }

    const int cy = static_cast<int>(best.index / width);
    const int cx = static_cast<int>(best.index % width);
    const double gain = std::max(best.coverage, 0.0);  // sentinel rows never win while mass remains

    result.pixel_indices.push_back(best.index);
    result.set.points.push_back(spec.pixel_center(cx, cy));
    result.set.covered_mass.push_back(gain * working.mass_scale);
    result.set.probabilities.push_back(gain / working.total);

    // Zero the covered disk, then refresh coverage only where it could have
    // changed: pixels whose own disk overlaps a zeroed pixel, i.e. a box of
    // twice the kernel radius around the pick. Recomputing them with the same
    // per-pixel formula keeps the map bit-identical to a full rebuild.
    for (const auto & [dx, dy] : kernel.offsets) {
      const int ix = cx + dx;
      const int iy = cy + dy;
      if (spec.contains(ix, iy)) {
        working.grid.at(ix, iy) = 0.0;
      }
    }
    const int x_lo = std::max(0, cx - 2 * radius_int);
    const int x_hi = std::min(width - 1, cx + 2 * radius_int);
    const int y_lo = std::max(0, cy - 2 * radius_int);
    const int y_hi = std::min(height - 1, cy + 2 * radius_int);
    for (int iy = y_lo; iy <= y_hi; ++iy) {
      for (int ix = x_lo; ix <= x_hi; ++ix) {
        coverage.at(ix, iy) = coverage_at_pixel(working.grid, kernel, ix, iy);
      }
    }
    for (std::int64_t picked : result.pixel_indices) {
      coverage.values[static_cast<std::size_t>(picked)] = kPickedSentinel;
    }
  }
  return result;
}

// Nonzero pixels as an origin-relative point cloud. Working in offsets from
// the origin makes every sampler's arithmetic independent of where the grid
// sits in the world, which is what the translation-equivariance contract
// needs.
void extract_point_cloud(
  const ProbabilityGrid & grid, std::vector<Vec2> & points, std::vector<double> & weights)
{
  const GridSpec & spec = grid.spec;
  points.clear();
  weights.clear();
  for (int iy = 0; iy < spec.height; ++iy) {
    const double * row = grid.values.data() + static_cast<std::size_t>(iy) * spec.width;
    for (int ix = 0; ix < spec.width; ++ix) {
      if (row[ix] > 0.0) {
        points.push_back({ix * spec.resolution, iy * spec.resolution});
        weights.push_back(row[ix]);
      }
    }
  }
}

std::vector<Vec2> to_relative(std::span<const Vec2> points, Vec2 origin)
{
  std::vector<Vec2> relative;
  relative.reserve(points.size());
  for (Vec2 p : points) {
    relative.push_back(p - origin);
  }
  return relative;
}

std::vector<Vec2> to_absolute(std::span<const Vec2> points, Vec2 origin)
{
  std::vector<Vec2> absolute;
  absolute.reserve(points.size());
  for (Vec2 p : points) {
    absolute.push_back(origin + p);
  }
  return absolute;
}

}  // namespace

void validate(const SamplerConfig & config)
{
  if (config.k < 1) {
    throw std::invalid_argument("sampler k must be >= 1");
  }
  if (!(config.mr_radius_m > 0.0)) {
    throw std::invalid_argument("coverage radius must be positive");
  }
  if (config.upsample_factor < 1) {
    throw std::invalid_argument("upsample factor must be >= 1");
  }
  if (config.fde_iters < 0) {
    throw std::invalid_argument("refinement iteration count must be >= 0");
  }
  if (!(config.fde_neighborhood_m > 0.0)) {
    throw std::invalid_argument("refinement neighborhood must be positive");
  }
  if (!(config.miss_threshold_m > 0.0)) {
    throw std::invalid_argument("miss threshold must be positive");
  }
}

CircleKernel circle_kernel(double radius_m, double resolution_m_per_px)
{
  if (!(radius_m > 0.0) || !(resolution_m_per_px > 0.0)) {
    throw std::invalid_argument("kernel radius and resolution must be positive");
  }
  CircleKernel kernel;
  kernel.radius = radius_m;
  kernel.resolution = resolution_m_per_px;
  const double radius_px = radius_m / resolution_m_per_px;
  const double radius_px_sq = radius_px * radius_px;
  const int reach = static_cast<int>(std::floor(radius_px));
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy <= radius_px_sq) {
        kernel.offsets.emplace_back(dx, dy);
      }
    }
  }
  return kernel;
}

ProbabilityGrid coverage_map(const ProbabilityGrid & grid, const CircleKernel & kernel)
{
  validate(grid);
  if (kernel.resolution != grid.spec.resolution) {
    throw std::invalid_argument("kernel was built for a different grid resolution");
  }
  ProbabilityGrid out = ProbabilityGrid::zeros(grid.spec);
  const int height = grid.spec.height;
  const int width = grid.spec.width;
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < height; ++iy) {
    double * out_row = out.values.data() + static_cast<std::size_t>(iy) * width;
    for (int ix = 0; ix < width; ++ix) {
      out_row[ix] = coverage_at_pixel(grid, kernel, ix, iy);
    }
  }
  return out;
}

SampleSet sample_mr(const ProbabilityGrid & grid, const SamplerConfig & config)
{
  WorkingGrid working = prepare_working(grid, config);
  return greedy_coverage(working, config).set;
}

SampleSet sample_fde(
  const ProbabilityGrid & grid, const SampleSet & init, const SamplerConfig & config)
{
  validate(config);
  if (init.points.empty()) {
    throw std::invalid_argument("refinement needs a non-empty initialization");
  }
  if (
    init.points.size() != init.probabilities.size() ||
    init.points.size() != init.covered_mass.size()) {
    throw std::invalid_argument("initialization field lengths disagree");
  }
  if (config.fde_iters == 0) {
    validate(grid);
    if (!(total_mass(grid) > 0.0)) {
      throw std::domain_error("sampler requires a grid with positive total mass");
    }
    return init;  // zero iterations: the initialization is the answer
  }

  WorkingGrid working = prepare_working(grid, config);
  std::vector<Vec2> points;
  std::vector<double> weights;
  extract_point_cloud(working.grid, points, weights);

  const Vec2 origin = working.grid.spec.origin;
  std::vector<Vec2> centroids = fde_refine(
    points, weights, to_relative(init.points, origin), config.fde_iters,
    config.fde_neighborhood_m, working.grid.spec.resolution / 2.0);

  SampleSet out;
  out.points = to_absolute(centroids, origin);
  out.probabilities = init.probabilities;
  out.covered_mass.reserve(out.points.size());
  for (Vec2 p : out.points) {
    out.covered_mass.push_back(
      coverage_at(working.grid, p, config.mr_radius_m) * working.mass_scale);
  }
  return out;
}

SampleSet sample_nms(const ProbabilityGrid & grid, const SamplerConfig & config)
{
  WorkingGrid working = prepare_working(grid, config);
  const GridSpec & spec = working.grid.spec;
  const std::int64_t num_pixels = spec.num_pixels();
  const double radius_px_sq = working.radius_px * working.radius_px;

  std::vector<std::int64_t> order(static_cast<std::size_t>(num_pixels));
  std::iota(order.begin(), order.end(), std::int64_t{0});
  const std::vector<double> & values = working.grid.values;
  std::sort(order.begin(), order.end(), [&values](std::int64_t a, std::int64_t b) {
    const double va = values[static_cast<std::size_t>(a)];
    const double vb = values[static_cast<std::size_t>(b)];
    if (va != vb) {
      return va > vb;
    }
    return a < b;
  });

  std::vector<std::int64_t> accepted;
  auto suppressed = [&](std::int64_t index) {
    const std::int64_t ix = index % spec.width;
    const std::int64_t iy = index / spec.width;
    for (std::int64_t a : accepted) {
      const double dx = static_cast<double>(ix - a % spec.width);
      const double dy = static_cast<double>(iy - a / spec.width);
      if (dx * dx + dy * dy <= radius_px_sq) {
        return true;
      }
    }
    return false;
  };
  for (std::int64_t index : order) {
    if (static_cast<int>(accepted.size()) == config.k) {
      break;
    }
    if (!suppressed(index)) {
      accepted.push_back(index);
    }
  }
  // Degenerate grids can suppress everything before K picks; fall back to
  // fresh pixels in tie-break order so the pick count is always K.
  for (std::int64_t index = 0; static_cast<int>(accepted.size()) < config.k; ++index) {
    if (std::find(accepted.begin(), accepted.end(), index) == accepted.end()) {
      accepted.push_back(index);
    }
  }

  SampleSet out;
  double value_sum = 0.0;
  for (std::int64_t index : accepted) {
    value_sum += values[static_cast<std::size_t>(index)];
  }
  for (std::int64_t index : accepted) {
    const int ix = static_cast<int>(index % spec.width);
    const int iy = static_cast<int>(index / spec.width);
    out.points.push_back(spec.pixel_center(ix, iy));
    out.probabilities.push_back(
      value_sum > 0.0 ? values[static_cast<std::size_t>(index)] / value_sum
                      : 1.0 / config.k);
    out.covered_mass.push_back(
      coverage_at(working.grid, out.points.back(), config.mr_radius_m) * working.mass_scale);
  }
  return out;
}

SampleSet sample_kmeans(const ProbabilityGrid & grid, const SamplerConfig & config)
{
  WorkingGrid working = prepare_working(grid, config);
  const GreedyResult init = greedy_coverage(working, config);

  // The greedy stage consumed the working copy; rebuild it for clustering.
  working = prepare_working(grid, config);
  std::vector<Vec2> points;
  std::vector<double> weights;
  extract_point_cloud(working.grid, points, weights);

  const Vec2 origin = working.grid.spec.origin;
  std::vector<Vec2> centroids =
    kmeans_refine(points, weights, to_relative(init.set.points, origin));

  const int k = static_cast<int>(centroids.size());
  std::vector<DoubleDouble> cluster_mass(static_cast<std::size_t>(k));
  DoubleDouble total_weight;
  for (std::size_t i = 0; i < points.size(); ++i) {
    int best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double sq = squared_distance(points[i], centroids[static_cast<std::size_t>(c)]);
      if (sq < best_sq) {
        best_sq = sq;
        best = c;
      }
    }
    cluster_mass[static_cast<std::size_t>(best)].add(weights[i]);
    total_weight.add(weights[i]);
  }

  SampleSet out;
  out.points = to_absolute(centroids, origin);
  for (int c = 0; c < k; ++c) {
    out.probabilities.push_back(dd_divide(cluster_mass[static_cast<std::size_t>(c)], total_weight));
    out.covered_mass.push_back(
      coverage_at(working.grid, out.points[static_cast<std::size_t>(c)], config.mr_radius_m) *
      working.mass_scale);
  }
  return out;
}

std::vector<Vec2> fde_refine(
  std::span<const Vec2> points, std::span<const double> weights, std::vector<Vec2> centroids,
  int iterations, double neighborhood, double min_distance)
{
  if (points.size() != weights.size()) {
    throw std::invalid_argument("points/weights size mismatch");
  }
  if (centroids.empty() || iterations < 0 || !(neighborhood > 0.0) || !(min_distance > 0.0)) {
    throw std::invalid_argument("bad refinement parameters");
  }

  const int k = static_cast<int>(centroids.size());
  const std::size_t n = points.size();
  const std::size_t num_blocks = (n + kReduceBlock - 1) / kReduceBlock;
  const double neighborhood_sq = neighborhood * neighborhood;

  struct Accumulator
  {
    DoubleDouble weight;
    DoubleDouble x;
    DoubleDouble y;
  };

  std::vector<Accumulator> block_accumulators;
  for (int iter = 0; iter < iterations; ++iter) {
    block_accumulators.assign(num_blocks * static_cast<std::size_t>(k), Accumulator{});

#pragma omp parallel for schedule(static)
    for (std::int64_t block = 0; block < static_cast<std::int64_t>(num_blocks); ++block) {
      Accumulator * acc = block_accumulators.data() + static_cast<std::size_t>(block) * k;
      const std::size_t begin = static_cast<std::size_t>(block) * kReduceBlock;
      const std::size_t end = std::min(begin + kReduceBlock, n);
      std::vector<double> dist_sq(static_cast<std::size_t>(k));
      for (std::size_t i = begin; i < end; ++i) {
        double min_sq = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double sq = squared_distance(points[i], centroids[static_cast<std::size_t>(c)]);
          dist_sq[static_cast<std::size_t>(c)] = sq;
          min_sq = std::min(min_sq, sq);
        }
        // Distance to the nearest centroid weights each contribution: points
        // already close to some centroid barely pull on the others.
        const double nearest = std::sqrt(min_sq);
        for (int c = 0; c < k; ++c) {
          const double sq = dist_sq[static_cast<std::size_t>(c)];
          if (sq > neighborhood_sq) {
            continue;
          }
          const double clamped = std::max(std::sqrt(sq), min_distance);
          const double geometry = nearest / (clamped * clamped);
          // Exact products keep the weighted-mean quotient independent of any
          // common scale on the weights.
          acc[c].weight.add_product(weights[i], geometry);
          acc[c].x.add_product(weights[i], geometry * points[i].x);
          acc[c].y.add_product(weights[i], geometry * points[i].y);
        }
      }
    }

    std::vector<Vec2> updated = centroids;
    for (int c = 0; c < k; ++c) {
      Accumulator sum;
      for (std::size_t block = 0; block < num_blocks; ++block) {
        const Accumulator & acc = block_accumulators[block * static_cast<std::size_t>(k) + c];
        sum.weight.add(acc.weight);
        sum.x.add(acc.x);
        sum.y.add(acc.y);
      }
      if (sum.weight.value() > 0.0) {
        updated[static_cast<std::size_t>(c)] = {
          dd_divide(sum.x, sum.weight), dd_divide(sum.y, sum.weight)};
      }
      // else: no weighted neighbors; the centroid stays put.
    }
    centroids = std::move(updated);  // simultaneous update
  }
  return centroids;
}

std::vector<Vec2> kmeans_refine(
  std::span<const Vec2> points, std::span<const double> weights, std::vector<Vec2> centroids,
  int max_iterations)
{
  if (points.size() != weights.size()) {
    throw std::invalid_argument("points/weights size mismatch");
  }
  if (centroids.empty() || max_iterations < 0) {
    throw std::invalid_argument("bad clustering parameters");
  }

  const int k = static_cast<int>(centroids.size());
  const std::size_t n = points.size();
  const std::size_t num_blocks = (n + kReduceBlock - 1) / kReduceBlock;

  struct Accumulator
  {
    DoubleDouble weight;
    DoubleDouble x;
    DoubleDouble y;
  };

  std::vector<int> assignment(n, -1);
  std::vector<int> previous(n, -2);
  for (int iter = 0; iter < max_iterations; ++iter) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      int best = 0;
      double best_sq = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double sq =
          squared_distance(points[static_cast<std::size_t>(i)], centroids[static_cast<std::size_t>(c)]);
        if (sq < best_sq) {  // strict: ties stay with the lowest index
          best_sq = sq;
          best = c;
        }
      }
      assignment[static_cast<std::size_t>(i)] = best;
    }
    if (assignment == previous) {
      break;
    }
    previous = assignment;

    std::vector<Accumulator> block_accumulators(num_blocks * static_cast<std::size_t>(k));
#pragma omp parallel for schedule(static)
    for (std::int64_t block = 0; block < static_cast<std::int64_t>(num_blocks); ++block) {
      Accumulator * acc = block_accumulators.data() + static_cast<std::size_t>(block) * k;
      const std::size_t begin = static_cast<std::size_t>(block) * kReduceBlock;
      const std::size_t end = std::min(begin + kReduceBlock, n);
      for (std::size_t i = begin; i < end; ++i) {
        Accumulator & a = acc[assignment[i]];
        a.weight.add(weights[i]);
        a.x.add_product(weights[i], points[i].x);
        a.y.add_product(weights[i], points[i].y);
      }
    }
    for (int c = 0; c < k; ++c) {
      Accumulator sum;
      for (std::size_t block = 0; block < num_blocks; ++block) {
        const Accumulator & acc = block_accumulators[block * static_cast<std::size_t>(k) + c];
        sum.weight.add(acc.weight);
        sum.x.add(acc.x);
        sum.y.add(acc.y);
      }
      if (sum.weight.value() > 0.0) {
        centroids[static_cast<std::size_t>(c)] = {
          dd_divide(sum.x, sum.weight), dd_divide(sum.y, sum.weight)};
      }
    }
  }
  return centroids;
}

}  // namespace heatcast
