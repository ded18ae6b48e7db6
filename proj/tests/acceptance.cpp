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

// Release gate: every guarantee the library advertises, checked end to end.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.
// An optional argument runs a single criterion by number.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatcast/grid.hpp"
#include "heatcast/io.hpp"
#include "heatcast/metrics.hpp"
#include "heatcast/oracle.hpp"
#include "heatcast/rasterizer.hpp"
#include "heatcast/rng.hpp"
#include "heatcast/sampling.hpp"
#include "heatcast/scenario.hpp"
#include "heatcast/vec2.hpp"
#include "test_support.hpp"

namespace heatcast
{
namespace
{

struct Outcome
{
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double value)
{
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4g", value);
  return buffer;
}

// --- 1: greedy coverage vs the exhaustive optimum --------------------------

Outcome check_oracle_optimality()
{
  const auto start = std::chrono::steady_clock::now();
  const double guarantee = 1.0 - 1.0 / std::numbers::e;
  int exact_trials = 0;
  double worst_ratio = 1.0;

  for (int trial = 0; trial < 20; ++trial) {
    const int k = trial % 3 + 1;
    const int cycle = trial / 3;
    // The subset scan is cubic in pixel count, so k = 3 stays on the small
    // sides while k = 1 and k = 2 cover the full 12..24 range.
    const int side = k == 3 ? 12 + 2 * (cycle % 4) : 12 + 2 * (cycle % 7);

    ProbabilityGrid grid = ProbabilityGrid::zeros(GridSpec::centered(side, side, 0.5));
    Rng rng(mix_seed(9100, static_cast<std::uint64_t>(trial)));
    for (double & v : grid.values) {
      v = rng.uniform();
    }

    SamplerConfig config;
    config.k = k;
    config.mr_radius_m = 1.8;
    config.upsample_factor = 1;  // keep greedy and oracle on the same lattice

    const SampleSet greedy = sample_mr(grid, config);
    const SampleSet exact =
      brute_force_coverage(grid, circle_kernel(config.mr_radius_m, 0.5), k);
    const double greedy_value = objective_coverage(grid, greedy.points, config.mr_radius_m);
    const double exact_value = objective_coverage(grid, exact.points, config.mr_radius_m);

    if (k == 1) {
      if (greedy_value != exact_value) {
        return {
          false, "k=1 trial " + std::to_string(trial) + ": greedy " + fmt(greedy_value) +
                   " != optimal " + fmt(exact_value)};
      }
      ++exact_trials;
    } else {
      const double ratio = greedy_value / exact_value;
      worst_ratio = std::min(worst_ratio, ratio);
      if (greedy_value < guarantee * exact_value) {
        return {
          false, "k=" + std::to_string(k) + " trial " + std::to_string(trial) + ": ratio " +
                   fmt(ratio) + " below 1-1/e"};
      }
    }
  }

  const double elapsed = seconds_since(start);
  if (elapsed > 60.0) {
    return {false, "runtime " + fmt(elapsed) + " s exceeds the 60 s budget"};
  }
  return {
    true, std::to_string(exact_trials) + " k=1 grids exact, worst k>=2 ratio " +
            fmt(worst_ratio) + " (bound " + fmt(guarantee) + "), " + fmt(elapsed) + " s"};
}

// --- 2: scale invariance and translation equivariance ----------------------

Outcome check_invariance()
{
  SamplerConfig config;
  config.k = 3;
  config.upsample_factor = 2;
  config.fde_iters = 3;

  const auto run_all = [&config](const ProbabilityGrid & grid) {
    std::array<SampleSet, 4> sets;
    sets[0] = sample_mr(grid, config);
    sets[1] = sample_fde(grid, sets[0], config);
    sets[2] = sample_nms(grid, config);
    sets[3] = sample_kmeans(grid, config);
    return sets;
  };
  const char * names[] = {"mr", "fde", "nms", "kmeans"};

  const std::array<SampleSet, 4> base = run_all(testing::spike_grid());
  for (const double scale : {0.1, 3.0, 1e4}) {
    const std::array<SampleSet, 4> scaled = run_all(testing::spike_grid(scale));
    for (std::size_t s = 0; s < 4; ++s) {
      if (scaled[s].points != base[s].points) {
        return {false, std::string(names[s]) + " points changed under scale " + fmt(scale)};
      }
    }
  }

  const Vec2 shift{7.5, 7.5};
  const std::array<SampleSet, 4> moved = run_all(testing::spike_grid(1.0, shift));
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t i = 0; i < base[s].points.size(); ++i) {
      if (!(moved[s].points[i] == base[s].points[i] + shift)) {
        return {false, std::string(names[s]) + " not equivariant under 7.5 m translation"};
      }
    }
  }
  return {true, "4 samplers, scales {0.1, 3, 1e4} and a 7.5 m shift, all exact"};
}

// --- 3: refinement trades miss rate for displacement -----------------------

Outcome check_tradeoff_direction()
{
  const auto start = std::chrono::steady_clock::now();
  const std::vector<GaussianMixture> suite = synthetic_suite();
  SamplerConfig config;
  config.k = 3;
  const std::vector<int> ls = {0, 1, 2, 3, 4, 5, 6, 7};
  const std::int64_t draws = 100000;
  const double n = static_cast<double>(draws);

  int direction_ok = 0;
  for (const GaussianMixture & mixture : suite) {
    const TradeoffCurve curve = sweep_tradeoff(mixture, config, ls, draws, mixture.seed);
    const std::vector<TradeoffRow> & rows = curve.rows;
    if (
      rows.back().expected_fde < rows.front().expected_fde &&
      rows.back().expected_mr > rows.front().expected_mr) {
      ++direction_ok;
    }
    // Between neighboring rows the trend may only reverse within Monte-Carlo
    // noise: 1% of the level plus three standard errors.
    for (std::size_t l = 0; l + 1 < rows.size(); ++l) {
      const double mr0 = rows[l].expected_mr;
      const double mr1 = rows[l + 1].expected_mr;
      const double mr_noise = 3.0 * std::sqrt((mr0 * (1.0 - mr0) + mr1 * (1.0 - mr1)) / n);
      if (mr1 < mr0 - (0.01 * mr0 + mr_noise)) {
        return {
          false, mixture.name + ": MR fell from " + fmt(mr0) + " to " + fmt(mr1) +
                   " between L=" + std::to_string(l) + " and L=" + std::to_string(l + 1)};
      }
      const double fde0 = rows[l].expected_fde;
      const double fde1 = rows[l + 1].expected_fde;
      const double fde_noise = 3.0 * (fde0 + fde1) / std::sqrt(n);
      if (fde1 > fde0 + (0.01 * fde0 + fde_noise)) {
        return {
          false, mixture.name + ": FDE rose from " + fmt(fde0) + " to " + fmt(fde1) +
                   " between L=" + std::to_string(l) + " and L=" + std::to_string(l + 1)};
      }
    }
  }

  const double elapsed = seconds_since(start);
  if (direction_ok < 9) {
    return {
      false, "L=7 improved FDE and worsened MR on only " + std::to_string(direction_ok) +
               "/10 mixtures"};
  }
  if (elapsed > 300.0) {
    return {false, "runtime " + fmt(elapsed) + " s exceeds the 5 min budget"};
  }
  return {
    true, "direction holds on " + std::to_string(direction_ok) +
            "/10 mixtures, every step within tolerance, " + fmt(elapsed) + " s"};
}

// --- 4: sampler ordering by expected miss rate ------------------------------

Outcome check_baseline_ordering()
{
  const std::vector<GaussianMixture> suite = synthetic_suite();
  SamplerConfig config;
  config.k = 3;
  const std::int64_t draws = 100000;
  const double n = static_cast<double>(draws);

  double mean_mr = 0.0;
  double mean_kmeans = 0.0;
  double mean_nms = 0.0;
  double var_mr = 0.0;
  double var_kmeans = 0.0;
  double var_nms = 0.0;

  for (const GaussianMixture & mixture : suite) {
    const ProbabilityGrid grid = mixture_to_grid(mixture, GridSpec::centered(224, 224, 0.5));
    const std::uint64_t seed = mix_seed(mixture.seed, 777);
    const auto evaluate = [&](const SampleSet & samples, double & mean, double & var) {
      const MetricsReport report =
        monte_carlo_metrics(mixture, samples, draws, seed, config.miss_threshold_m);
      mean += report.mr / 10.0;
      var += report.mr * (1.0 - report.mr) / n / 100.0;
    };
    evaluate(sample_mr(grid, config), mean_mr, var_mr);
    evaluate(sample_kmeans(grid, config), mean_kmeans, var_kmeans);
    evaluate(sample_nms(grid, config), mean_nms, var_nms);
  }

  const double gap_low = mean_kmeans - mean_mr;
  const double gap_high = mean_nms - mean_kmeans;
  const double se_low = std::sqrt(var_mr + var_kmeans);
  const double se_high = std::sqrt(var_kmeans + var_nms);
  if (gap_low <= 2.0 * se_low) {
    return {
      false, "coverage vs kmeans gap " + fmt(gap_low) + " not beyond 2 se (" + fmt(se_low) + ")"};
  }
  if (gap_high <= 2.0 * se_high) {
    return {
      false, "kmeans vs nms gap " + fmt(gap_high) + " not beyond 2 se (" + fmt(se_high) + ")"};
  }
  return {
    true, "mean MR " + fmt(mean_mr) + " (coverage) < " + fmt(mean_kmeans) + " (kmeans) < " +
            fmt(mean_nms) + " (nms), gaps " + fmt(gap_low / se_low) + " and " +
            fmt(gap_high / se_high) + " se"};
}

// --- 5: analytic focal-loss gradient vs central differences -----------------

Outcome check_focal_gradient()
{
  double max_rel = 0.0;
  const double h = 1e-5;

  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(mix_seed(9300, static_cast<std::uint64_t>(trial)));
    const GridSpec spec = GridSpec::centered(8, 8, 0.5);
    ProbabilityGrid pred = ProbabilityGrid::zeros(spec);
    for (double & v : pred.values) {
      v = 0.01 + 0.98 * rng.uniform();
    }
    const Vec2 gt{-1.75 + 3.5 * rng.uniform(), -1.75 + 3.5 * rng.uniform()};
    const TargetGrid target = render_gaussian_target(spec, gt);

    const ProbabilityGrid analytic = focal_loss_gradient(pred, target);
    for (std::size_t p = 0; p < pred.values.size(); ++p) {
      ProbabilityGrid probe = pred;
      probe.values[p] = pred.values[p] + h;
      const double up = focal_loss(probe, target);
      probe.values[p] = pred.values[p] - h;
      const double down = focal_loss(probe, target);
      const double numeric = (up - down) / (2.0 * h);
      const double rel = std::abs(analytic.values[p] - numeric) /
                         std::max({std::abs(analytic.values[p]), std::abs(numeric), 1e-6});
      max_rel = std::max(max_rel, rel);
    }
  }

  if (max_rel >= 1e-4) {
    return {false, "max relative error " + fmt(max_rel)};
  }
  return {true, "100 grids, 6400 pixels, max relative error " + fmt(max_rel)};
}

// --- 6: closed-form miss rate of a unit Gaussian -----------------------------

Outcome check_closed_form_mr()
{
  GaussianMixture mixture;
  mixture.name = "unit";
  mixture.components = {{{0.0, 0.0}, 1.0, 1.0}};
  mixture.seed = 20260819;

  SampleSet samples;
  samples.points = {{0.0, 0.0}};
  samples.probabilities = {1.0};
  samples.covered_mass = {1.0};

  const MetricsReport report = monte_carlo_metrics(mixture, samples, 100000, mixture.seed, 2.0);
  const double expected = std::exp(-2.0);  // P(|X| > 2 sigma) in 2D
  const double error = std::abs(report.mr - expected);
  if (error > 0.01) {
    return {
      false, "MR " + fmt(report.mr) + " deviates from " + fmt(expected) + " by " + fmt(error)};
  }
  return {true, "MR " + fmt(report.mr) + " within " + fmt(error) + " of exp(-2)"};
}

// --- 7: kernel discretization ------------------------------------------------

Outcome check_kernel_counts()
{
  const std::size_t fine = circle_kernel(1.8, 0.5).offsets.size();
  const std::size_t coarse = circle_kernel(2.0, 0.25).offsets.size();
  if (fine != 37 || coarse != 197) {
    return {
      false, "got " + std::to_string(fine) + " and " + std::to_string(coarse) +
               " offsets, expected 37 and 197"};
  }
  return {true, "circle_kernel(1.8, 0.5) = 37 offsets, circle_kernel(2.0, 0.25) = 197"};
}

// --- 8: metric monotonicity ---------------------------------------------------

Outcome check_metric_monotonicity()
{
  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng(mix_seed(9400, static_cast<std::uint64_t>(trial)));
    const Vec2 gt{20.0 * rng.uniform() - 10.0, 20.0 * rng.uniform() - 10.0};
    std::vector<Vec2> endpoints;
    for (int k = 0; k < 6; ++k) {
      endpoints.push_back({20.0 * rng.uniform() - 10.0, 20.0 * rng.uniform() - 10.0});
    }

    for (std::size_t k = 1; k < endpoints.size(); ++k) {
      const std::span<const Vec2> shorter(endpoints.data(), k);
      const std::span<const Vec2> longer(endpoints.data(), k + 1);
      if (miss(longer, gt) && !miss(shorter, gt)) {
        return {false, "appending an endpoint created a miss on trial " + std::to_string(trial)};
      }
      if (min_fde(longer, gt) > min_fde(shorter, gt)) {
        return {false, "appending an endpoint raised minFDE on trial " + std::to_string(trial)};
      }
    }

    const double fde = min_fde(endpoints, gt);
    const double p = trial % 10 == 0 ? 1.0 : 0.05 + 0.95 * rng.uniform();
    if (p_metric(fde, p) < fde) {
      return {false, "probability penalty went negative on trial " + std::to_string(trial)};
    }
  }
  return {true, "1000 random cases: prefix metrics monotone, p_min_fde >= min_fde"};
}

// --- 9: raster contract --------------------------------------------------------

Outcome check_raster_contract()
{
  Scene scene;
  scene.drivable = {{{-5.0, -5.0}, {5.0, -5.0}, {5.0, 5.0}, {-5.0, 5.0}, {-5.0, -5.0}}};
  const RasterStack stack = rasterize_scene(scene);
  if (stack.channels.size() != 45 || kRasterChannels != 45) {
    return {false, "expected 45 channels, got " + std::to_string(stack.channels.size())};
  }

  int drivable_pixels = 0;
  for (const double v : stack.channels[0].values) {
    drivable_pixels += v != 0.0 ? 1 : 0;
  }
  if (drivable_pixels < 360 || drivable_pixels > 440) {
    return {
      false, "10x10 m square covered " + std::to_string(drivable_pixels) +
               " pixels, outside 400 +/- 40"};
  }

  const RgbColor red = hsv_heading_encode(0.0);
  if (red.r != 1.0 || red.g != 0.0 || red.b != 0.0) {
    return {false, "hsv_heading_encode(0) is not pure red"};
  }
  return {
    true, "45 channels, square -> " + std::to_string(drivable_pixels) +
            " drivable pixels, heading 0 -> (1,0,0)"};
}

// --- 10: CLI determinism ---------------------------------------------------------

std::string slurp(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return {};
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Outcome check_cli_determinism()
{
  const char * cli = std::getenv("HEATCAST_CLI");
  if (cli == nullptr || *cli == '\0') {
    return {false, "HEATCAST_CLI is not set; point it at the CLI binary"};
  }
  const std::string binary(cli);
  const testing::TempDir dir("acceptance-cli");

  GaussianMixture mixture;
  mixture.name = "gate";
  mixture.components = {
    {{-10.0, 5.0}, 0.8, 0.5},
    {{8.0, -3.0}, 0.7, 0.25},
    {{0.0, 12.0}, 0.6, 0.25},
  };
  mixture.seed = 4242;
  write_mixture_file(dir.file("mixture.txt"), mixture);

  {
    std::ofstream scene(dir.file("scene.txt"));
    scene << "drivable 5 -5 -5 5 -5 5 5 -5 5 -5 -5\n";
    scene << "boundary 2 -8 -8 8 -8\n";
    scene << "centerline 2 -9 2 0.5 -4 2 0.5\n";
    scene << "agent target 4 2 2\n0 -1 0\n1 0 0\n";
    scene << "agent neighbor 4 2 1\n0 9 9\n";
  }
  {
    std::ofstream pred(dir.file("pred.csv"));
    pred << "case_id,k,t,x,y,prob\n";
    pred << "1,1,1,0.5,0,0.6\n1,1,2,1,0,0.6\n";
    pred << "1,2,1,0,0.5,0.4\n1,2,2,0,3,0.4\n";
    pred << "2,1,1,1,1,1\n2,1,2,2,2,1\n";
    std::ofstream truth(dir.file("truth.csv"));
    truth << "case_id,t,x,y\n";
    truth << "1,1,0.5,0\n1,2,1,0.5\n";
    truth << "2,1,1,1\n2,2,5,2\n";
  }

  const auto run = [&binary](const std::string & args) {
    const std::string command = binary + " " + args;
    const int rc = std::system(command.c_str());
    if (rc != 0) {
      throw std::runtime_error("command failed: " + command);
    }
  };
  const auto path = [&dir](const std::string & name) { return dir.file(name).string(); };
  const auto identical = [&dir](const std::string & a, const std::string & b) {
    const std::string left = slurp(dir.file(a));
    return !left.empty() && left == slurp(dir.file(b));
  };

  // grid
  for (const char * suffix : {"1", "2"}) {
    run(
      "grid --mixture " + path("mixture.txt") + " --out " + path(std::string("g") + suffix + ".hgrd") +
      " --pgm " + path(std::string("g") + suffix + ".pgm"));
  }
  if (!identical("g1.hgrd", "g2.hgrd") || !identical("g1.pgm", "g2.pgm")) {
    return {false, "grid outputs differ between runs"};
  }

  // sample, all four modes
  for (const char * mode : {"mr", "fde", "nms", "kmeans"}) {
    for (const char * suffix : {"1", "2"}) {
      run(
        "sample --grid " + path("g1.hgrd") + " --out " +
        path(std::string("s_") + mode + "_" + suffix + ".csv") + " --mode " + mode +
        " --k 3 --iters 2");
    }
    if (!identical(std::string("s_") + mode + "_1.csv", std::string("s_") + mode + "_2.csv")) {
      return {false, std::string("sample --mode ") + mode + " outputs differ between runs"};
    }
  }

  // sweep
  for (const char * suffix : {"1", "2"}) {
    run(
      "sweep --mixture " + path("mixture.txt") + " --out " +
      path(std::string("curve") + suffix + ".csv") + " --l-max 2 --draws 2000 --k 3 --seed 5");
  }
  if (!identical("curve1.csv", "curve2.csv")) {
    return {false, "sweep outputs differ between runs"};
  }

  // eval
  for (const char * suffix : {"1", "2"}) {
    run(
      "eval --pred " + path("pred.csv") + " --truth " + path("truth.csv") + " --out " +
      path(std::string("metrics") + suffix + ".json"));
  }
  if (!identical("metrics1.json", "metrics2.json")) {
    return {false, "eval outputs differ between runs"};
  }

  // raster
  for (const char * suffix : {"1", "2"}) {
    run(
      "raster --scene " + path("scene.txt") + " --out " +
      path(std::string("stack") + suffix + ".hgrd") + " --pgm " +
      path(std::string("sheet") + suffix + ".pgm"));
  }
  if (!identical("stack1.hgrd", "stack2.hgrd") || !identical("sheet1.pgm", "sheet2.pgm")) {
    return {false, "raster outputs differ between runs"};
  }

  // verify (stdout is the output)
  for (const char * suffix : {"1", "2"}) {
    run(
      "verify --size 8 --k 2 --trials 2 --seed 7 > " +
      path(std::string("verify") + suffix + ".txt"));
  }
  if (!identical("verify1.txt", "verify2.txt")) {
    return {false, "verify outputs differ between runs"};
  }

  return {true, "six subcommands, byte-identical outputs across reruns"};
}

}  // namespace
}  // namespace heatcast

int main(int argc, char ** argv)
{
  using heatcast::Outcome;

  struct Criterion
  {
    int id;
    const char * what;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
    {1, "greedy coverage vs exhaustive optimum", heatcast::check_oracle_optimality},
    {2, "sampler scale invariance and translation equivariance", heatcast::check_invariance},
    {3, "refinement trades miss rate for displacement", heatcast::check_tradeoff_direction},
    {4, "expected miss-rate ordering of the samplers", heatcast::check_baseline_ordering},
    {5, "focal-loss gradient vs central differences", heatcast::check_focal_gradient},
    {6, "closed-form miss rate of a unit Gaussian", heatcast::check_closed_form_mr},
    {7, "circle kernel lattice counts", heatcast::check_kernel_counts},
    {8, "metric monotonicity under extra endpoints", heatcast::check_metric_monotonicity},
    {9, "raster channel contract", heatcast::check_raster_contract},
    {10, "CLI determinism", heatcast::check_cli_determinism},
  };

  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
  }

  bool all_pass = true;
  for (const Criterion & criterion : criteria) {
    if (only != 0 && criterion.id != only) {
      continue;
    }
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception & e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf(
      "criterion %d: %s - %s (%s)\n", criterion.id, outcome.pass ? "PASS" : "FAIL",
      criterion.what, outcome.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
