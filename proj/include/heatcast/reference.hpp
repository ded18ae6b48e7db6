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

#ifndef HEATCAST_REFERENCE_HPP_
#define HEATCAST_REFERENCE_HPP_

#include "heatcast/grid.hpp"
#include "heatcast/sampling.hpp"
#include "heatcast/scenario.hpp"

namespace heatcast::serial
{

// Textbook single-threaded implementations of the parallel kernels, kept as
// the comparison baseline for correctness tests and the kernel benchmark.
// Per-pixel kernels must match the parallel versions bit for bit; the scalar
// reductions accumulate in plain left-to-right order and are compared within
// a tight relative tolerance.

ProbabilityGrid coverage_map(const ProbabilityGrid & grid, const CircleKernel & kernel);
double focal_loss(const ProbabilityGrid & pred, const TargetGrid & target);
ProbabilityGrid focal_loss_gradient(const ProbabilityGrid & pred, const TargetGrid & target);
ProbabilityGrid upsample_bilinear(const ProbabilityGrid & grid, int factor);
ProbabilityGrid mixture_to_grid(const GaussianMixture & mixture, const GridSpec & spec);
TargetGrid render_gaussian_target(const GridSpec & spec, Vec2 ground_truth, double sigma_px = 4.0);
double total_mass(const ProbabilityGrid & grid);

}  // namespace heatcast::serial

#endif  // HEATCAST_REFERENCE_HPP_
