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

#ifndef HEATCAST_METRICS_HPP_
#define HEATCAST_METRICS_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "heatcast/grid.hpp"
#include "heatcast/vec2.hpp"

namespace heatcast
{

// True when every predicted endpoint is strictly farther than `threshold`
// from the ground truth (a prediction exactly at the threshold is a hit).
bool miss(std::span<const Vec2> endpoints, Vec2 ground_truth, double threshold = 2.0);

// Smallest final displacement over the K endpoints. Endpoints must be
// non-empty (std::invalid_argument).
double min_fde(std::span<const Vec2> endpoints, Vec2 ground_truth);

// Smallest per-trajectory mean displacement. Every trajectory must match the
// ground-truth length (std::invalid_argument).
double min_ade(
  std::span<const std::vector<Vec2>> trajectories, std::span<const Vec2> ground_truth);

// Probability-weighted metric: base - ln(p_best), p_best in (0, 1].
// p_best == 0 would be an infinite penalty and throws std::domain_error;
// p_best outside (0, 1] throws std::invalid_argument.
double p_metric(double base, double p_best);

struct ProbabilityAssignment
{
  std::vector<double> probabilities;  // normalized to sum 1
  bool uniform_fallback = false;      // true when all raw integrals were zero
};

// Endpoint probabilities as circle integrals of the normalized grid within
// `radius` of each endpoint, renormalized to sum 1. Falls back to uniform
// 1/K (flagged) when every integral is zero. Throws std::domain_error if the
// grid has no positive mass.
ProbabilityAssignment assign_probabilities(
  const ProbabilityGrid & grid, std::span<const Vec2> endpoints, double radius = 2.0);

// One evaluation case: K predicted trajectories (each `horizon` points, final
// point = endpoint), per-mode probabilities, and the ground-truth trajectory.
struct PredictionCase
{
  std::int64_t case_id = 0;
  std::vector<std::vector<Vec2>> trajectories;
  std::vector<double> probabilities;
  std::vector<Vec2> ground_truth;
};

void validate(const PredictionCase & c);

// Dataset aggregate. Miss rate is the mean of per-case miss booleans; the
// displacement metrics are means of per-case minima. The probability-weighted
// variants add -ln of the probability of the best mode, "best" judged by the
// respective base metric (lowest k on ties).
struct MetricsReport
{
  double mr = 0.0;
  double min_fde = 0.0;
  double min_ade = 0.0;
  double p_min_fde = 0.0;
  double p_min_ade = 0.0;
  std::int64_t num_cases = 0;
  std::vector<std::uint8_t> misses;  // per-case flags, input order
};

MetricsReport evaluate_batch(std::span<const PredictionCase> cases, double miss_threshold = 2.0);

// CSV/JSON plumbing for the CLI.
//
// Predictions:  header "case_id,k,t,x,y,prob", one row per trajectory point,
//               k in 1..K and t in 1..T contiguous.
// Ground truth: header "case_id,t,x,y", t in 1..T contiguous.
//
// Cases are joined by case_id (every prediction case needs ground truth and
// vice versa); malformed rows are reported with their line number.
// read_prediction_cases also accepts an endpoint CSV written by the sampler
// CLI ("k,x,y,probability,covered_mass" header): it is treated as case 0 with
// single-point trajectories, matched against a one-point ground truth.
std::vector<PredictionCase> read_prediction_cases(
  const std::filesystem::path & prediction_csv, const std::filesystem::path & ground_truth_csv);

void write_metrics_json(const std::filesystem::path & path, const MetricsReport & report);
std::string metrics_to_json(const MetricsReport & report);

}  // namespace heatcast

#endif  // HEATCAST_METRICS_HPP_
