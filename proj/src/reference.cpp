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

#include "heatcast/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatcast::serial
{

namespace
{

constexpr double kPredClamp = 1e-7;

void check_focal_inputs(const ProbabilityGrid & pred, const TargetGrid & target)
{
  if (!(pred.spec == target.spec)) {
    throw std::invalid_argument("grid shapes/specs do not match");
  }
  for (double v : pred.values) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::domain_error(
        "focal loss prediction outside (0, 1): " + std::to_string(v));
    }
  }
}

}  // namespace

ProbabilityGrid coverage_map(const ProbabilityGrid & grid, const CircleKernel & kernel)
{
  validate(grid);
  if (kernel.resolution != grid.spec.resolution) {
    throw std::invalid_argument("kernel was built for a different grid resolution");
  }
  const GridSpec & spec = grid.spec;
  ProbabilityGrid out = ProbabilityGrid::zeros(spec);
  for (int iy = 0; iy < spec.height; ++iy) {
    for (int ix = 0; ix < spec.width; ++ix) {
      double sum = 0.0;
      for (const auto & [dx, dy] : kernel.offsets) {
        const int jx = ix + dx;
        const int jy = iy + dy;
        if (spec.contains(jx, jy)) {
          sum += grid.at(jx, jy);
        }
      }
      out.at(ix, iy) = sum;
    }
  }
  return out;
}

double focal_loss(const ProbabilityGrid & pred, const TargetGrid & target)
{
  check_focal_inputs(pred, target);
  // Single left-to-right accumulation; the parallel version reduces per row,
  // so the two agree only within rounding, not bit for bit.
  double total = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const double yhat = std::clamp(pred.values[i], kPredClamp, 1.0 - kPredClamp);
    const double y = target.values[i];
    const double diff = y - yhat;
    double f = 0.0;
    if (y == 1.0) {
      f = std::log(yhat);
    } else {
      const double down = 1.0 - y;
      const double down_sq = down * down;
      f = down_sq * down_sq * std::log(1.0 - yhat);
    }
    total += diff * diff * f;
  }
  return -total / static_cast<double>(pred.spec.num_pixels());
}

ProbabilityGrid focal_loss_gradient(const ProbabilityGrid & pred, const TargetGrid & target)
{
  check_focal_inputs(pred, target);
  ProbabilityGrid grad = ProbabilityGrid::zeros(pred.spec);
  const double inv_pixels = 1.0 / static_cast<double>(pred.spec.num_pixels());
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    if (pred.values[i] <= kPredClamp || pred.values[i] >= 1.0 - kPredClamp) {
      grad.values[i] = 0.0;
      continue;
    }
    const double yhat = pred.values[i];
    const double y = target.values[i];
    const double diff = y - yhat;
    double d_term = 0.0;
    if (y == 1.0) {
      d_term = -2.0 * diff * std::log(yhat) + diff * diff / yhat;
    } else {
      const double down = 1.0 - y;
      const double down_sq = down * down;
      const double down4 = down_sq * down_sq;
      d_term = down4 * (-2.0 * diff * std::log(1.0 - yhat) - diff * diff / (1.0 - yhat));
    }
    grad.values[i] = -d_term * inv_pixels;
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
  for (int v = 0; v < out_spec.height; ++v) {
    const double sy = v * inv_factor;
    const int y0 = std::min(static_cast<int>(sy), in_h - 1);
    const int y1 = std::min(y0 + 1, in_h - 1);
    const double fy = sy - y0;
    for (int u = 0; u < out_spec.width; ++u) {
      const double sx = u * inv_factor;
      const int x0 = std::min(static_cast<int>(sx), in_w - 1);
      const int x1 = std::min(x0 + 1, in_w - 1);
      const double fx = sx - x0;
      const double top = (1.0 - fx) * grid.at(x0, y0) + fx * grid.at(x1, y0);
      const double bottom = (1.0 - fx) * grid.at(x0, y1) + fx * grid.at(x1, y1);
      out.at(u, v) = (1.0 - fy) * top + fy * bottom;
    }
  }
  return out;
}

ProbabilityGrid mixture_to_grid(const GaussianMixture & mixture, const GridSpec & spec)
{
  heatcast::validate(mixture);
  heatcast::validate(spec);
  for (const MixtureComponent & component : mixture.components) {
    if (!spec.contains(component.mean)) {
      throw std::invalid_argument("mixture mode lies outside the grid");
    }
  }
  ProbabilityGrid grid = ProbabilityGrid::zeros(spec);
  const double pixel_area = spec.resolution * spec.resolution;
  for (int iy = 0; iy < spec.height; ++iy) {
    for (int ix = 0; ix < spec.width; ++ix) {
      const Vec2 center = spec.pixel_center(ix, iy);
      double density = 0.0;
      for (const MixtureComponent & component : mixture.components) {
        const double sigma_sq = component.sigma * component.sigma;
        const double norm = component.weight / (2.0 * std::numbers::pi * sigma_sq);
        density += norm * std::exp(-squared_distance(center, component.mean) / (2.0 * sigma_sq));
      }
      grid.at(ix, iy) = density * pixel_area;
    }
  }
  return grid;
}

TargetGrid render_gaussian_target(const GridSpec & spec, Vec2 ground_truth, double sigma_px)
{
  heatcast::validate(spec);
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
  for (int iy = 0; iy < spec.height; ++iy) {
    const double dy = static_cast<double>(iy - cy);
    for (int ix = 0; ix < spec.width; ++ix) {
      const double dx = static_cast<double>(ix - cx);
      target.values[static_cast<std::size_t>(iy) * spec.width + ix] =
        std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq);
    }
  }
  return target;
}

double total_mass(const ProbabilityGrid & grid)
{
  double total = 0.0;
  for (double v : grid.values) {
    total += v;
  }
  return total;
}

}  // namespace heatcast::serial
