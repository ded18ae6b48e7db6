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

#ifndef HEATCAST_GRID_HPP_
#define HEATCAST_GRID_HPP_

#include <cstdint>
#include <vector>

#include "heatcast/vec2.hpp"

namespace heatcast
{

// Geometry of a metric raster. Pixel (0, 0) is the top-left cell; `origin` is
// the metric coordinate of its *center*. Pixel (ix, iy) is centered at
// origin + (ix, iy) * resolution and values are stored row-major
// (index = iy * width + ix).
struct GridSpec
{
  int width = 0;
  int height = 0;
  double resolution = 0.0;  // meters per pixel
  Vec2 origin{0.0, 0.0};    // metric center of pixel (0, 0)

  bool operator==(const GridSpec &) const = default;

  std::int64_t num_pixels() const
  {
    return static_cast<std::int64_t>(width) * static_cast<std::int64_t>(height);
  }

  Vec2 pixel_center(int ix, int iy) const
  {
    return {origin.x + ix * resolution, origin.y + iy * resolution};
  }

  // Nearest pixel to a metric point (round half away from zero). May be out
  // of bounds; callers check with contains().
  void to_pixel(Vec2 p, int & ix, int & iy) const
  {
    ix = static_cast<int>(std::llround((p.x - origin.x) / resolution));
    iy = static_cast<int>(std::llround((p.y - origin.y) / resolution));
  }

  bool contains(int ix, int iy) const
  {
    return ix >= 0 && ix < width && iy >= 0 && iy < height;
  }

  bool contains(Vec2 p) const
  {
    int ix = 0;
    int iy = 0;
    to_pixel(p, ix, iy);
    return contains(ix, iy);
  }

  // Grid of the given size whose pixel lattice is centered on the metric
  // origin (0, 0).
  static GridSpec centered(int width, int height, double resolution)
  {
    GridSpec spec;
    spec.width = width;
    spec.height = height;
    spec.resolution = resolution;
    spec.origin = {-0.5 * (width - 1) * resolution, -0.5 * (height - 1) * resolution};
    return spec;
  }
};

// Throws std::invalid_argument unless dimensions and resolution are positive.
void validate(const GridSpec & spec);

// Non-negative, finite scalar field over a GridSpec. Values are unnormalized
// probability mass per pixel unless stated otherwise.
struct ProbabilityGrid
{
  GridSpec spec;
  std::vector<double> values;

  double & at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * spec.width + ix]; }
  double at(int ix, int iy) const
  {
    return values[static_cast<std::size_t>(iy) * spec.width + ix];
  }

  static ProbabilityGrid zeros(const GridSpec & spec)
  {
    return {spec, std::vector<double>(static_cast<std::size_t>(spec.num_pixels()), 0.0)};
  }
};

// Supervision target: values in [0, 1] with exactly one pixel equal to 1.
struct TargetGrid
{
  GridSpec spec;
  std::vector<double> values;

  double at(int ix, int iy) const
  {
    return values[static_cast<std::size_t>(iy) * spec.width + ix];
  }
};

// Throws std::invalid_argument if sizes mismatch or any value is negative or
// non-finite (for TargetGrid: outside [0, 1], or no/multiple unit pixels).
void validate(const ProbabilityGrid & grid);
void validate(const TargetGrid & target);

// Unnormalized Gaussian bump centered on the pixel nearest to `ground_truth`:
// value(p) = exp(-d^2 / (2 sigma_px^2)) with d the Euclidean distance in
// pixel units between p and the center pixel. The center pixel is exactly 1.
// Throws std::out_of_range if ground_truth falls outside the grid.
TargetGrid render_gaussian_target(const GridSpec & spec, Vec2 ground_truth, double sigma_px = 4.0);

// Pixel-wise focal loss between a predicted heatmap and a rendered target,
// averaged over all pixels:
//
//   L = -(1/P) * sum_p (Y_p - Yhat_p)^2 * f_p,
//   f_p = log(Yhat_p)                      if Y_p == 1
//       = (1 - Y_p)^4 * log(1 - Yhat_p)    otherwise.
//
// Predictions must be strictly inside (0, 1) (std::domain_error otherwise)
// and are clamped to [1e-7, 1 - 1e-7] before the logs are taken.
double focal_loss(const ProbabilityGrid & pred, const TargetGrid & target);

// Analytic d(loss)/d(Yhat_p), zero where the clamp above is active. Matches
// central finite differences of focal_loss away from the clamp boundaries.
ProbabilityGrid focal_loss_gradient(const ProbabilityGrid & pred, const TargetGrid & target);

// Bilinear upsampling by an integer factor >= 1. Output pixel (u, v) samples
// the input at pixel coordinate (u / factor, v / factor), clamped at the high
// edges, so output pixel (0, 0) coincides with input pixel (0, 0) and the
// output spec keeps the same origin with resolution / factor. Factor 1 is the
// identity. Values stay within the input min/max.
ProbabilityGrid upsample_bilinear(const ProbabilityGrid & grid, int factor);

// Sum of all pixel values (deterministic fixed-order reduction).
double total_mass(const ProbabilityGrid & grid);

// Returns the grid scaled so total_mass == 1. Throws std::domain_error if the
// mass is not positive.
ProbabilityGrid normalize(const ProbabilityGrid & grid);

// Sum of values over pixels whose centers lie within `radius` meters of
// `point` (inclusive boundary). Pixels outside the grid contribute nothing.
double coverage_at(const ProbabilityGrid & grid, Vec2 point, double radius);

}  // namespace heatcast

#endif  // HEATCAST_GRID_HPP_
