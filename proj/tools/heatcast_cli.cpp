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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "heatcast/grid.hpp"
#include "heatcast/io.hpp"
#include "heatcast/metrics.hpp"
#include "heatcast/oracle.hpp"
#include "heatcast/parallel.hpp"
#include "heatcast/rasterizer.hpp"
#include "heatcast/rng.hpp"
#include "heatcast/sampling.hpp"
#include "heatcast/scenario.hpp"

#include "CLI11.hpp"

namespace
{

using namespace heatcast;

// Every writer in the library emits shortest round-trip decimals and every
// sampler is deterministic, so each subcommand's output is byte-identical
// across runs with the same arguments.

SampleSet run_sampler(const ProbabilityGrid & grid, const std::string & mode,
                      const SamplerConfig & config)
{
  if (mode == "mr") {
    return sample_mr(grid, config);
  }
  if (mode == "fde") {
    return sample_fde(grid, sample_mr(grid, config), config);
  }
  if (mode == "nms") {
    return sample_nms(grid, config);
  }
  return sample_kmeans(grid, config);
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Heatmap endpoint sampling, evaluation and rasterization"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = library default)");

  // --- sample ---------------------------------------------------------------
  auto * sample = app.add_subcommand("sample", "Sample K endpoints from a heatmap");
  std::filesystem::path sample_grid_path;
  std::filesystem::path sample_out;
  std::string sample_mode = "mr";
  SamplerConfig config;
  double prob_radius = 2.0;
  sample->add_option("--grid", sample_grid_path, "Input heatmap (HGRD)")->required();
  sample->add_option("--out", sample_out, "Output endpoint CSV")->required();
  sample->add_option("--mode", sample_mode, "Sampler: mr, fde, nms or kmeans")
    ->check(CLI::IsMember({"mr", "fde", "nms", "kmeans"}));
  sample->add_option("--k", config.k, "Number of endpoints");
  sample->add_option("--radius", config.mr_radius_m, "Coverage radius in meters");
  sample->add_option("--upsample", config.upsample_factor, "Upsampling factor");
  sample->add_option("--iters", config.fde_iters, "Refinement iterations (fde mode)");
  sample->add_option("--neighborhood", config.fde_neighborhood_m,
                     "Refinement neighborhood in meters (fde mode)");
  sample->add_option("--prob-radius", prob_radius,
                     "Radius of the probability integral around each endpoint");

  // --- grid -----------------------------------------------------------------
  auto * grid_cmd = app.add_subcommand("grid", "Rasterize a Gaussian mixture to a heatmap");
  std::filesystem::path grid_mixture_path;
  std::filesystem::path grid_out;
  std::filesystem::path grid_pgm;
  int grid_width = 224;
  int grid_height = 224;
  double grid_resolution = 0.5;
  grid_cmd->add_option("--mixture", grid_mixture_path, "Mixture description file")->required();
  grid_cmd->add_option("--out", grid_out, "Output heatmap (HGRD)")->required();
  grid_cmd->add_option("--pgm", grid_pgm, "Optional preview image (PGM)");
  grid_cmd->add_option("--width", grid_width, "Grid width in pixels");
  grid_cmd->add_option("--height", grid_height, "Grid height in pixels");
  grid_cmd->add_option("--resolution", grid_resolution, "Meters per pixel");

  // --- sweep ----------------------------------------------------------------
  auto * sweep = app.add_subcommand("sweep", "Miss-rate/displacement trade-off curve");
  std::filesystem::path sweep_mixture_path;
  std::filesystem::path sweep_out;
  int sweep_l_max = 7;
  std::int64_t sweep_draws = 20000;
  std::uint64_t sweep_seed = 0;
  SamplerConfig sweep_config;
  sweep->add_option("--mixture", sweep_mixture_path, "Mixture description file")->required();
  sweep->add_option("--out", sweep_out, "Output CSV (L,expected_mr,expected_fde)")->required();
  sweep->add_option("--l-max", sweep_l_max, "Largest refinement iteration count")
    ->check(CLI::NonNegativeNumber);
  sweep->add_option("--draws", sweep_draws, "Ground-truth draws per row");
  auto * sweep_seed_option =
    sweep->add_option("--seed", sweep_seed, "Evaluation seed (default: the mixture's)");
  sweep->add_option("--k", sweep_config.k, "Number of endpoints");
  sweep->add_option("--radius", sweep_config.mr_radius_m, "Coverage radius in meters");
  sweep->add_option("--upsample", sweep_config.upsample_factor, "Upsampling factor");
  sweep->add_option("--neighborhood", sweep_config.fde_neighborhood_m,
                    "Refinement neighborhood in meters");

  // --- eval -----------------------------------------------------------------
  auto * eval = app.add_subcommand("eval", "Evaluate predictions against ground truth");
  std::filesystem::path eval_pred_path;
  std::filesystem::path eval_truth_path;
  std::filesystem::path eval_out;
  double eval_threshold = 2.0;
  eval->add_option("--pred", eval_pred_path, "Prediction CSV (or sampler endpoint CSV)")
    ->required();
  eval->add_option("--truth", eval_truth_path, "Ground-truth CSV")->required();
  eval->add_option("--out", eval_out, "Output JSON (default: stdout)");
  eval->add_option("--threshold", eval_threshold, "Miss threshold in meters");

  // --- raster ---------------------------------------------------------------
  auto * raster = app.add_subcommand("raster", "Rasterize a scene into input channels");
  std::filesystem::path raster_scene_path;
  std::filesystem::path raster_out;
  std::filesystem::path raster_pgm;
  int raster_width = 224;
  int raster_height = 224;
  double raster_resolution = 0.5;
  raster->add_option("--scene", raster_scene_path, "Scene description file")->required();
  raster->add_option("--out", raster_out, "Output channel stack (HGRD records)")->required();
  raster->add_option("--pgm", raster_pgm, "Optional contact sheet (PGM)");
  raster->add_option("--width", raster_width, "Grid width in pixels");
  raster->add_option("--height", raster_height, "Grid height in pixels");
  raster->add_option("--resolution", raster_resolution, "Meters per pixel");

  // --- verify ---------------------------------------------------------------
  auto * verify = app.add_subcommand(
    "verify", "Compare the coverage sampler against the exhaustive optimum on random grids");
  int verify_size = 16;
  int verify_k = 2;
  int verify_trials = 5;
  std::uint64_t verify_seed = 1;
  double verify_radius = 1.8;
  verify->add_option("--size", verify_size, "Grid side length in pixels (max 24)")
    ->check(CLI::Range(4, 24));
  verify->add_option("--k", verify_k, "Picks per grid (max 3)")->check(CLI::Range(1, 3));
  verify->add_option("--trials", verify_trials, "Number of random grids");
  verify->add_option("--seed", verify_seed, "Base seed");
  verify->add_option("--radius", verify_radius, "Coverage radius in meters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) {
      set_threads(threads);
    }

    if (*sample) {
      const ProbabilityGrid grid = read_hgrd(sample_grid_path);
      SampleSet samples = run_sampler(grid, sample_mode, config);
      // Endpoint probabilities come from the heatmap itself: the mass within
      // prob_radius of each endpoint, renormalized over the K endpoints.
      const ProbabilityAssignment assignment =
        assign_probabilities(grid, samples.points, prob_radius);
      samples.probabilities = assignment.probabilities;
      write_sample_csv(sample_out, samples);
    } else if (*grid_cmd) {
      const GaussianMixture mixture = read_mixture_file(grid_mixture_path);
      const ProbabilityGrid grid =
        mixture_to_grid(mixture, GridSpec::centered(grid_width, grid_height, grid_resolution));
      write_hgrd(grid_out, grid);
      if (!grid_pgm.empty()) {
        write_pgm(grid_pgm, grid);
      }
    } else if (*sweep) {
      const GaussianMixture mixture = read_mixture_file(sweep_mixture_path);
      std::vector<int> l_values;
      for (int l = 0; l <= sweep_l_max; ++l) {
        l_values.push_back(l);
      }
      const TradeoffCurve curve = sweep_tradeoff(
        mixture, sweep_config, l_values, sweep_draws,
        sweep_seed_option->count() > 0 ? sweep_seed : mixture.seed);
      write_tradeoff_csv(sweep_out, curve);
    } else if (*eval) {
      const std::vector<PredictionCase> cases =
        read_prediction_cases(eval_pred_path, eval_truth_path);
      const MetricsReport report = evaluate_batch(cases, eval_threshold);
      if (eval_out.empty()) {
        std::cout << metrics_to_json(report) << '\n';
      } else {
        write_metrics_json(eval_out, report);
      }
    } else if (*raster) {
      const Scene scene = read_scene_file(raster_scene_path);
      const RasterStack stack =
        rasterize_scene(scene, GridSpec::centered(raster_width, raster_height, raster_resolution));
      write_hgrd_stack(raster_out, stack.channels);
      if (!raster_pgm.empty()) {
        write_pgm_contact_sheet(raster_pgm, stack.channels, 9);
      }
    } else if (*verify) {
      // Random positive grids; ties between pixel subsets are vanishingly
      // unlikely, so the k=1 comparison is exact.
      SamplerConfig cfg;
      cfg.k = verify_k;
      cfg.mr_radius_m = verify_radius;
      cfg.upsample_factor = 1;  // keep both sides on the same lattice
      const double bound = 1.0 - 1.0 / std::numbers::e;
      bool all_ok = true;
      for (int trial = 0; trial < verify_trials; ++trial) {
        Rng rng(mix_seed(verify_seed, static_cast<std::uint64_t>(trial)));
        const GridSpec spec = GridSpec::centered(verify_size, verify_size, 0.5);
        ProbabilityGrid grid = ProbabilityGrid::zeros(spec);
        for (double & v : grid.values) {
          v = rng.uniform();
        }
        const SampleSet greedy = sample_mr(grid, cfg);
        const SampleSet exact =
          brute_force_coverage(grid, circle_kernel(cfg.mr_radius_m, spec.resolution), cfg.k);
        const double greedy_value = objective_coverage(grid, greedy.points, cfg.mr_radius_m);
        const double exact_value = objective_coverage(grid, exact.points, cfg.mr_radius_m);
        const bool ok =
          verify_k == 1 ? greedy_value == exact_value : greedy_value >= bound * exact_value;
        all_ok = all_ok && ok;
        std::cout << "trial " << trial << ": greedy " << format_double(greedy_value)
                  << ", optimal " << format_double(exact_value) << ", ratio "
                  << format_double(greedy_value / exact_value) << (ok ? " ok" : " FAIL") << '\n';
      }
      if (!all_ok) {
        std::cerr << "verify: greedy coverage fell below the guarantee\n";
        return 1;
      }
    }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
