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

#include "heatcast/parallel.hpp"

#include <cstdint>
#include <vector>

#include <doctest.h>

#include "heatcast/grid.hpp"
#include "heatcast/oracle.hpp"
#include "heatcast/reference.hpp"
#include "heatcast/rng.hpp"
#include "heatcast/sampling.hpp"
#include "heatcast/scenario.hpp"
#include "test_support.hpp"

namespace heatcast
{
namespace
{

// Restores the configured thread count when a test section ends.
class ThreadCountGuard
{
public:
  ThreadCountGuard() : saved_(max_threads()) {}
  ~ThreadCountGuard() { set_threads(saved_); }
  ThreadCountGuard(const ThreadCountGuard &) = delete;
  ThreadCountGuard & operator=(const ThreadCountGuard &) = delete;

private:
  int saved_;
};

ProbabilityGrid interior_grid(int width, int height, std::uint64_t seed)
{
  ProbabilityGrid grid = testing::random_grid(width, height, 0.5, seed);
  for (double & v : grid.values) {
    v = 0.01 + 0.98 * v;  // keep strictly inside (0, 1) for the focal loss
  }
  return grid;
}

GaussianMixture parallel_mixture()
{
  GaussianMixture mixture;
  mixture.name = "parallel";
  mixture.components = {
    {{-6.0, -2.0}, 0.8, 0.5},
    {{5.0, 4.0}, 0.6, 0.25},
    {{0.0, 8.0}, 0.7, 0.25},
  };
  mixture.seed = 31;
  return mixture;
}

// Everything the library computes with parallel loops, bundled so two runs
// under different thread counts can be compared field by field.
struct KernelOutputs
{
  ProbabilityGrid coverage;
  ProbabilityGrid upsampled;
  ProbabilityGrid gradient;
  ProbabilityGrid mixture;
  TargetGrid target;
  double focal = 0.0;
  double mass = 0.0;
  SampleSet mr;
  SampleSet fde;
  SampleSet nms;
  SampleSet kmeans;
  std::vector<Vec2> refined;
  MetricsReport report;
};

KernelOutputs run_everything()
{
  KernelOutputs out;

  const ProbabilityGrid pred = interior_grid(64, 64, 2026);
  const ProbabilityGrid heat = normalize(pred);
  const GridSpec spec = pred.spec;
  const TargetGrid target = render_gaussian_target(spec, {3.5, -2.0});

  out.coverage = coverage_map(heat, circle_kernel(1.8, spec.resolution));
  out.upsampled = upsample_bilinear(heat, 3);
  out.gradient = focal_loss_gradient(pred, target);
  out.mixture = mixture_to_grid(parallel_mixture(), GridSpec::centered(96, 96, 0.5));
  out.target = target;
  out.focal = focal_loss(pred, target);
  out.mass = total_mass(pred);

  SamplerConfig config;
  config.k = 4;
  config.upsample_factor = 2;
  config.fde_iters = 3;
  out.mr = sample_mr(heat, config);
  out.fde = sample_fde(heat, out.mr, config);
  out.nms = sample_nms(heat, config);
  out.kmeans = sample_kmeans(heat, config);

  Rng rng(777);
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<Vec2> centroids = {{-1.0, 0.0}, {1.0, 1.0}, {0.0, -2.0}};
  for (int i = 0; i < 200; ++i) {
    points.push_back({rng.uniform() * 8.0 - 4.0, rng.uniform() * 8.0 - 4.0});
    weights.push_back(rng.uniform() + 0.01);
  }
  out.refined = fde_refine(points, weights, centroids, 5, 3.0, 0.25);

  out.report = monte_carlo_metrics(parallel_mixture(), out.mr, 2000, 99, 2.0);
  return out;
}

void check_identical(const KernelOutputs & a, const KernelOutputs & b)
{
  CHECK(a.coverage.values == b.coverage.values);
  CHECK(a.upsampled.values == b.upsampled.values);
  CHECK(a.gradient.values == b.gradient.values);
  CHECK(a.mixture.values == b.mixture.values);
  CHECK(a.target.values == b.target.values);
  CHECK(a.focal == b.focal);
  CHECK(a.mass == b.mass);
  const auto check_set = [](const SampleSet & s, const SampleSet & t) {
    CHECK(s.points == t.points);
    CHECK(s.probabilities == t.probabilities);
    CHECK(s.covered_mass == t.covered_mass);
  };
  check_set(a.mr, b.mr);
  check_set(a.fde, b.fde);
  check_set(a.nms, b.nms);
  check_set(a.kmeans, b.kmeans);
  CHECK(a.refined == b.refined);
  CHECK(a.report.mr == b.report.mr);
  CHECK(a.report.min_fde == b.report.min_fde);
  CHECK(a.report.min_ade == b.report.min_ade);
  CHECK(a.report.p_min_fde == b.report.p_min_fde);
  CHECK(a.report.p_min_ade == b.report.p_min_ade);
  CHECK(a.report.misses == b.report.misses);
}

TEST_CASE("thread control reports sane values")
{
  CHECK(max_threads() >= 1);
#ifdef _OPENMP
  ThreadCountGuard guard;
  set_threads(2);
  CHECK(max_threads() == 2);
  set_threads(5);
  CHECK(max_threads() == 5);
#endif
}

TEST_CASE("per-pixel kernels match the serial reference bit for bit")
{
  const ProbabilityGrid pred = interior_grid(48, 40, 11);
  const ProbabilityGrid heat = normalize(pred);
  const TargetGrid target = render_gaussian_target(pred.spec, {1.5, 2.5});
  const CircleKernel kernel = circle_kernel(1.8, pred.spec.resolution);

  CHECK(coverage_map(heat, kernel).values == serial::coverage_map(heat, kernel).values);
  CHECK(upsample_bilinear(heat, 3).values == serial::upsample_bilinear(heat, 3).values);
  CHECK(
    focal_loss_gradient(pred, target).values == serial::focal_loss_gradient(pred, target).values);
  CHECK(
    render_gaussian_target(pred.spec, {1.5, 2.5}).values ==
    serial::render_gaussian_target(pred.spec, {1.5, 2.5}).values);
  const GridSpec spec = GridSpec::centered(96, 96, 0.5);
  CHECK(
    mixture_to_grid(parallel_mixture(), spec).values ==
    serial::mixture_to_grid(parallel_mixture(), spec).values);
}

TEST_CASE("reductions match the serial reference within tight tolerance")
{
  const ProbabilityGrid pred = interior_grid(96, 96, 12);
  const TargetGrid target = render_gaussian_target(pred.spec, {-4.0, 6.0});

  CHECK(focal_loss(pred, target) == doctest::Approx(serial::focal_loss(pred, target)).epsilon(1e-13));
  CHECK(total_mass(pred) == doctest::Approx(serial::total_mass(pred)).epsilon(1e-13));
}

TEST_CASE("every kernel is bit-identical across thread counts")
{
  ThreadCountGuard guard;

  set_threads(1);
  const KernelOutputs single = run_everything();
  set_threads(4);
  const KernelOutputs four = run_everything();
  check_identical(single, four);
  set_threads(3);
  const KernelOutputs three = run_everything();
  check_identical(single, three);
}

}  // namespace
}  // namespace heatcast
