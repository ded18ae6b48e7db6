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

#include "heatcast/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatcast
{

namespace
{

constexpr double kPredClamp = 1e-7;

void check_same_shape(const GridSpec & a, const GridSpec & b)
{
  if (!(a == b)) {
    throw std::invalid_argument("grid shapes/specs do not match");
  }
}

// Focal-loss predictions must be strictly inside (0, 1); the clamp only
// guards the logs against saturation.
void check_pred_domain(const std::vector<double> & values)
{
  for (double v : values) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::domain_error(
        "focal loss prediction outside (0, 1): " + std::to_string(v));
    }
  }
}

}  // namespace

void validate(const GridSpec & spec)
{
  if (spec.width <= 0 || spec.height <= 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (!(spec.resolution > 0.0) || !std::isfinite(spec.resolution)) {
    throw std::invalid_argument("grid resolution must be positive and finite");
  }
  if (!std::isfinite(spec.origin.x) || !std::isfinite(spec.origin.y)) {
    throw std::invalid_argument("grid origin must be finite");
  }
}

void validate(const ProbabilityGrid & grid)
{
  validate(grid.spec);
  if (static_cast<std::int64_t>(grid.values.size()) != grid.spec.num_pixels()) {
    throw std::invalid_argument("grid value count does not match width * height");
  }
  for (double v : grid.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("grid values must be finite and non-negative");
    }
  }
}

void validate(const TargetGrid & target)
{
  validate(target.spec);
  if (static_cast<std::int64_t>(target.values.size()) != target.spec.num_pixels()) {
    throw std::invalid_argument("target value count does not match width * height");
  }
  int unit_pixels = 0;
  for (double v : target.values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("target values must lie in [0, 1]");
    }
    if (v == 1.0) {
      ++unit_pixels;
    }
  }
  if (unit_pixels != 1) {
    throw std::invalid_argument("target must have exactly one unit pixel");
  }
}

TargetGrid render_gaussian_target(const GridSpec & spec, Vec2 ground_truth, double sigma_px)
{
  validate(spec);
  if (!(sigma_px > 0.0)) {
    throw std::invalid_argument("sigma must be positive");
  }
  int cx = 0;
  int cy = 0;
  spec.to_pixel(ground_truth, cx, cy);
  if (!spec.contains(cx, cy)) {
    throw std::out_of_range("ground truth endpoint outside grid bounds");
  }

  TargetGrid target{spec, std::vector<double>(static_cast<std::size_t>(spec.num_pixels()))};
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma_px * sigma_px);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < spec.height; ++iy) {
    double * row = target.values.data() + static_cast<std::size_t>(iy) * spec.width;
    const double dy = static_cast<double>(iy - cy);
    for (int ix = 0; ix < spec.width; ++ix) {
      const double dx = static_cast<double>(ix - cx);
      row[ix] = std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq);
    }
  }
  return target;
}

double focal_loss(const ProbabilityGrid & pred, const TargetGrid & target)
{
  check_same_shape(pred.spec, target.spec);
  check_pred_domain(pred.values);

  const int height = pred.spec.height;
  const int width = pred.spec.width;
  std::vector<double> row_sums(static_cast<std::size_t>(height), 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < height; ++iy) {
    const double * p = pred.values.data() + static_cast<std::size_t>(iy) * width;
    const double * y = target.values.data() + static_cast<std::size_t>(iy) * width;
    double sum = 0.0;
    for (int ix = 0; ix < width; ++ix) {
      const double yhat = std::clamp(p[ix], kPredClamp, 1.0 - kPredClamp);
      const double diff = y[ix] - yhat;
      double f = 0.0;
      if (y[ix] == 1.0) {
        f = std::log(yhat);
      } else {
        const double down = 1.0 - y[ix];
        const double down_sq = down * down;
        f = down_sq * down_sq * std::log(1.0 - yhat);
      }
      sum += diff * diff * f;
    }
    row_sums[static_cast<std::size_t>(iy)] = sum;
  }

  // Row partials combined in index order: bit-identical for any thread count.
  double total = 0.0;
  for (double s : row_sums) {
    total += s;
  }
  return -total / static_cast<double>(pred.spec.num_pixels());
}

ProbabilityGrid focal_loss_gradient(const ProbabilityGrid & pred, const TargetGrid & target)
{
  check_same_shape(pred.spec, target.spec);
  check_pred_domain(pred.values);

  ProbabilityGrid grad = ProbabilityGrid::zeros(pred.spec);
  const int height = pred.spec.height;
  const int width = pred.spec.width;
  const double inv_pixels = 1.0 / static_cast<double>(pred.spec.num_pixels());
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < height; ++iy) {
    const double * p = pred.values.data() + static_cast<std::size_t>(iy) * width;
    const double * y = target.values.data() + static_cast<std::size_t>(iy) * width;
    double * g = grad.values.data() + static_cast<std::size_t>(iy) * width;
    for (int ix = 0; ix < width; ++ix) {
      if (p[ix] <= kPredClamp || p[ix] >= 1.0 - kPredClamp) {
        g[ix] = 0.0;  // loss is locally constant where the clamp is active
        continue;
      }
      const double yhat = p[ix];
      const double diff = y[ix] - yhat;
      double d_term = 0.0;
      if (y[ix] == 1.0) {
        // d/dyhat [ (y - yhat)^2 log(yhat) ]
        d_term = -2.0 * diff * std::log(yhat) + diff * diff / yhat;
      } else {
        const double down = 1.0 - y[ix];
        const double down_sq = down * down;
        const double down4 = down_sq * down_sq;
        // d/dyhat [ (y - yhat)^2 (1 - y)^4 log(1 - yhat) ]
        d_term = down4 * (-2.0 * diff * std::log(1.0 - yhat) - diff * diff / (1.0 - yhat));
      }
      g[ix] = -d_term * inv_pixels;
    }
  }
  return grad;
}

ProbabilityGrid upsample_bilinear(const ProbabilityGrid & grid, int factor)
{
  validate(grid);
  if (factor < 1) {
    throw std::invalid_argument("upsampling factor must be >= 1");
  }
  if (factor == 1) {
    return grid;
  }

  GridSpec out_spec = grid.spec;
  out_spec.width = grid.spec.width * factor;
  out_spec.height = grid.spec.height * factor;
  out_spec.resolution = grid.spec.resolution / factor;

  ProbabilityGrid out = ProbabilityGrid::zeros(out_spec);
  const int in_w = grid.spec.width;
  const int in_h = grid.spec.height;
  const double inv_factor = 1.0 / factor;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < out_spec.height; ++v) {
    const double sy = v * inv_factor;
    const int y0 = std::min(static_cast<int>(sy), in_h - 1);
    const int y1 = std::min(y0 + 1, in_h - 1);
    const double fy = sy - y0;
    const double * row0 = grid.values.data() + static_cast<std::size_t>(y0) * in_w;
    const double * row1 = grid.values.data() + static_cast<std::size_t>(y1) * in_w;
    double * out_row = out.values.data() + static_cast<std::size_t>(v) * out_spec.width;
    for (int u = 0; u < out_spec.width; ++u) {
      const double sx = u * inv_factor;
      const int x0 = std::min(static_cast<int>(sx), in_w - 1);
      const int x1 = std::min(x0 + 1, in_w - 1);
      const double fx = sx - x0;
      const double top = (1.0 - fx) * row0[x0] + fx * row0[x1];
      const double bottom = (1.0 - fx) * row1[x0] + fx * row1[x1];
      out_row[u] = (1.0 - fy) * top + fy * bottom;
    }
  }
  return out;
}

double total_mass(const ProbabilityGrid & grid)
{
  const int height = grid.spec.height;
  const int width = grid.spec.width;
  std::vector<double> row_sums(static_cast<std::size_t>(std::max(height, 0)), 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < height; ++iy) {
    const double * row = grid.values.data() + static_cast<std::size_t>(iy) * width;
    double sum = 0.0;
    for (int ix = 0; ix < width; ++ix) {
      sum += row[ix];
    }
    row_sums[static_cast<std::size_t>(iy)] = sum;
  }
  double total = 0.0;
  for (double s : row_sums) {
    total += s;
  }
  return total;
}

ProbabilityGrid normalize(const ProbabilityGrid & grid)
{
  validate(grid);
  const double mass = total_mass(grid);
  if (!(mass > 0.0)) {
    throw std::domain_error("cannot normalize a grid with no positive mass");
  }
  ProbabilityGrid out = grid;
  const double inv = 1.0 / mass;
  for (double & v : out.values) {
    v *= inv;
  }
  return out;
}

double coverage_at(const ProbabilityGrid & grid, Vec2 point, double radius)
{
  if (!(radius > 0.0)) {
    throw std::invalid_argument("coverage radius must be positive");
  }
  const GridSpec & spec = grid.spec;
  // Bounding box of the circle in pixel indices, clipped to the grid.
  const int x_lo = std::max(
    0, static_cast<int>(std::ceil((point.x - radius - spec.origin.x) / spec.resolution)));
  const int x_hi = std::min(
    spec.width - 1,
    static_cast<int>(std::floor((point.x + radius - spec.origin.x) / spec.resolution)));
  const int y_lo = std::max(
    0, static_cast<int>(std::ceil((point.y - radius - spec.origin.y) / spec.resolution)));
  const int y_hi = std::min(
    spec.height - 1,
    static_cast<int>(std::floor((point.y + radius - spec.origin.y) / spec.resolution)));

  const double radius_sq = radius * radius;
  double sum = 0.0;
  for (int iy = y_lo; iy <= y_hi; ++iy) {
    for (int ix = x_lo; ix <= x_hi; ++ix) {
      if (squared_distance(spec.pixel_center(ix, iy), point) <= radius_sq) {
        sum += grid.at(ix, iy);
      }
    }
  }
  return sum;
}

}  // namespace heatcast
