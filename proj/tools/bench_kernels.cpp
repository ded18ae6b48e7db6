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

// Times the parallel kernels against their serial reference implementations
// and cross-checks the results while at it. Wall-clock numbers, single
// process; run on an otherwise idle machine for meaningful ratios.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "heatcast/grid.hpp"
#include "heatcast/parallel.hpp"
#include "heatcast/reference.hpp"
#include "heatcast/rng.hpp"
#include "heatcast/sampling.hpp"
#include "heatcast/scenario.hpp"

namespace
{

using namespace heatcast;

double time_ms(const std::function<void()> & fn, int repeats)
{
  fn();  // warm-up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) {
    fn();
  }
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

void report(const char * name, double serial_ms, double parallel_ms, double max_abs_diff)
{
  std::printf(
    "%-18s %10.3f ms %10.3f ms %8.2fx   max |diff| %.3g\n", name, serial_ms, parallel_ms,
    serial_ms / parallel_ms, max_abs_diff);
}

double max_abs_diff(const std::vector<double> & a, const std::vector<double> & b)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

int main()
{
  const int repeats = 5;
  const GridSpec spec = GridSpec::centered(448, 448, 0.25);
  std::printf("threads: %d\n", max_threads());
  std::printf("grid: %dx%d @ %g m/px, %d repeats\n\n", spec.width, spec.height, spec.resolution,
              repeats);
  std::printf("%-18s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  // Synthetic but non-trivial inputs.
  Rng rng(42);
  ProbabilityGrid noise = ProbabilityGrid::zeros(spec);
  for (double & v : noise.values) {
    v = 0.999 * rng.uniform() + 5e-4;
  }
  GaussianMixture mixture;
  mixture.name = "bench";
  mixture.components = {
    {{12.0, -8.0}, 2.0, 0.5}, {{-20.0, 15.0}, 3.5, 0.3}, {{0.0, 30.0}, 1.5, 0.2}};

  const CircleKernel kernel = circle_kernel(1.8, spec.resolution);
  {
    ProbabilityGrid out_serial;
    ProbabilityGrid out_parallel;
    const double s = time_ms([&] { out_serial = serial::coverage_map(noise, kernel); }, repeats);
    const double p = time_ms([&] { out_parallel = coverage_map(noise, kernel); }, repeats);
    report("coverage_map", s, p, max_abs_diff(out_serial.values, out_parallel.values));
  }
  {
    const TargetGrid target = render_gaussian_target(spec, {3.0, -7.0});
    double out_serial = 0.0;
    double out_parallel = 0.0;
    const double s = time_ms([&] { out_serial = serial::focal_loss(noise, target); }, repeats);
    const double p = time_ms([&] { out_parallel = focal_loss(noise, target); }, repeats);
    report("focal_loss", s, p, std::abs(out_serial - out_parallel));
  }
  {
    const TargetGrid target = render_gaussian_target(spec, {3.0, -7.0});
    ProbabilityGrid out_serial;
    ProbabilityGrid out_parallel;
    const double s =
      time_ms([&] { out_serial = serial::focal_loss_gradient(noise, target); }, repeats);
    const double p = time_ms([&] { out_parallel = focal_loss_gradient(noise, target); }, repeats);
    report("focal_gradient", s, p, max_abs_diff(out_serial.values, out_parallel.values));
  }
  {
    ProbabilityGrid out_serial;
    ProbabilityGrid out_parallel;
    const double s = time_ms([&] { out_serial = serial::upsample_bilinear(noise, 2); }, repeats);
    const double p = time_ms([&] { out_parallel = upsample_bilinear(noise, 2); }, repeats);
    report("upsample_x2", s, p, max_abs_diff(out_serial.values, out_parallel.values));
  }
  {
    ProbabilityGrid out_serial;
    ProbabilityGrid out_parallel;
    const double s = time_ms([&] { out_serial = serial::mixture_to_grid(mixture, spec); }, repeats);
    const double p = time_ms([&] { out_parallel = mixture_to_grid(mixture, spec); }, repeats);
    report("mixture_to_grid", s, p, max_abs_diff(out_serial.values, out_parallel.values));
  }
  {
    TargetGrid out_serial;
    TargetGrid out_parallel;
    const double s =
      time_ms([&] { out_serial = serial::render_gaussian_target(spec, {3.0, -7.0}); }, repeats);
    const double p =
      time_ms([&] { out_parallel = render_gaussian_target(spec, {3.0, -7.0}); }, repeats);
    report("render_target", s, p, max_abs_diff(out_serial.values, out_parallel.values));
  }
  {
    double out_serial = 0.0;
    double out_parallel = 0.0;
    const double s = time_ms([&] { out_serial = serial::total_mass(noise); }, repeats);
    const double p = time_ms([&] { out_parallel = total_mass(noise); }, repeats);
    report("total_mass", s, p, std::abs(out_serial - out_parallel));
  }
  return 0;
}
