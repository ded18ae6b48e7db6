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

#include "heatcast/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heatcast/io.hpp"

#include "json.hpp"

namespace heatcast
{

namespace
{

std::vector<std::string> read_lines(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void row_error(const std::filesystem::path & path, std::size_t line_no,
                            const std::string & what)
{
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double_field(
  std::string_view token, const std::filesystem::path & path, std::size_t line_no)
{
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    row_error(path, line_no, "bad numeric field '" + std::string(token) + "'");
  }
  return value;
}

std::int64_t parse_int_field(
  std::string_view token, const std::filesystem::path & path, std::size_t line_no)
{
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    row_error(path, line_no, "bad integer field '" + std::string(token) + "'");
  }
  return value;
}

// Ground truth keyed by case, in trajectory order. Rows must come sorted by
// (case_id, t) with t counting 1..T.
std::map<std::int64_t, std::vector<Vec2>> read_ground_truth(const std::filesystem::path & path)
{
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != "case_id,t,x,y") {
    throw std::runtime_error(path.string() + ": expected header 'case_id,t,x,y'");
  }
  std::map<std::int64_t, std::vector<Vec2>> truth;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      continue;
    }
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 4) {
      row_error(path, i + 1, "expected 4 fields");
    }
    const std::int64_t case_id = parse_int_field(fields[0], path, i + 1);
    const std::int64_t t = parse_int_field(fields[1], path, i + 1);
    std::vector<Vec2> & points = truth[case_id];
    if (t != static_cast<std::int64_t>(points.size()) + 1) {
      row_error(path, i + 1, "time steps for a case must count 1..T in order");
    }
    points.push_back(
      {parse_double_field(fields[2], path, i + 1), parse_double_field(fields[3], path, i + 1)});
  }
  if (truth.empty()) {
    throw std::runtime_error(path.string() + ": no ground-truth rows");
  }
  return truth;
}

// Index of the best mode under `scores`, preferring the lowest k on ties.
std::size_t argmin(std::span<const double> scores)
{
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] < scores[best]) {
      best = k;
    }
  }
  return best;
}

}  // namespace

bool miss(std::span<const Vec2> endpoints, Vec2 ground_truth, double threshold)
{
  if (endpoints.empty()) {
    throw std::invalid_argument("miss needs at least one endpoint");
  }
  for (Vec2 endpoint : endpoints) {
    if (!(distance(endpoint, ground_truth) > threshold)) {
      return false;  // a prediction exactly at the threshold still hits
    }
  }
  return true;
}

double min_fde(std::span<const Vec2> endpoints, Vec2 ground_truth)
{
  if (endpoints.empty()) {
    throw std::invalid_argument("min_fde needs at least one endpoint");
  }
  double best = std::numeric_limits<double>::infinity();
  for (Vec2 endpoint : endpoints) {
    best = std::min(best, distance(endpoint, ground_truth));
  }
  return best;
}

double min_ade(std::span<const std::vector<Vec2>> trajectories, std::span<const Vec2> ground_truth)
{
  if (trajectories.empty() || ground_truth.empty()) {
    throw std::invalid_argument("min_ade needs trajectories and a ground truth");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const std::vector<Vec2> & trajectory : trajectories) {
    if (trajectory.size() != ground_truth.size()) {
      throw std::invalid_argument("trajectory length differs from ground truth");
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
      sum += distance(trajectory[t], ground_truth[t]);
    }
    best = std::min(best, sum / static_cast<double>(trajectory.size()));
  }
  return best;
}

double p_metric(double base, double p_best)
{
  if (p_best == 0.0) {
    throw std::domain_error("p_metric diverges for a zero-probability best mode");
  }
  if (!(p_best > 0.0) || p_best > 1.0) {
    throw std::invalid_argument("p_best must lie in (0, 1]");
  }
  return base - std::log(p_best);
}

ProbabilityAssignment assign_probabilities(
  const ProbabilityGrid & grid, std::span<const Vec2> endpoints, double radius)
{
  if (endpoints.empty()) {
    throw std::invalid_argument("assign_probabilities needs endpoints");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("probability radius must be positive");
  }
  const ProbabilityGrid normalized = normalize(grid);  // throws on zero mass

  ProbabilityAssignment out;
  out.probabilities.reserve(endpoints.size());
  double sum = 0.0;
  for (Vec2 endpoint : endpoints) {
    const double integral = coverage_at(normalized, endpoint, radius);
    out.probabilities.push_back(integral);
    sum += integral;
  }
  if (sum > 0.0) {
    for (double & p : out.probabilities) {
      p /= sum;
    }
  } else {
    // Every endpoint sits in a dead zone of the grid; report a uniform
    // distribution rather than dividing by zero.
    out.uniform_fallback = true;
    const double uniform = 1.0 / static_cast<double>(endpoints.size());
    std::fill(out.probabilities.begin(), out.probabilities.end(), uniform);
  }
  return out;
}

void validate(const PredictionCase & c)
{
  if (c.trajectories.empty()) {
    throw std::invalid_argument("prediction case has no trajectories");
  }
  if (c.probabilities.size() != c.trajectories.size()) {
    throw std::invalid_argument("probability count differs from trajectory count");
  }
  if (c.ground_truth.empty()) {
    throw std::invalid_argument("prediction case has no ground truth");
  }
  for (const std::vector<Vec2> & trajectory : c.trajectories) {
    if (trajectory.size() != c.ground_truth.size()) {
      throw std::invalid_argument("trajectory length differs from ground truth");
    }
  }
  for (double p : c.probabilities) {
    if (!(p >= 0.0) || p > 1.0) {
      throw std::invalid_argument("mode probabilities must lie in [0, 1]");
    }
  }
}

MetricsReport evaluate_batch(std::span<const PredictionCase> cases, double miss_threshold)
{
  if (cases.empty()) {
    throw std::invalid_argument("evaluate_batch needs at least one case");
  }
  if (!(miss_threshold > 0.0)) {
    throw std::invalid_argument("miss threshold must be positive");
  }

  MetricsReport report;
  report.num_cases = static_cast<std::int64_t>(cases.size());
  report.misses.reserve(cases.size());

  double mr_sum = 0.0;
  double fde_sum = 0.0;
  double ade_sum = 0.0;
  double p_fde_sum = 0.0;
  double p_ade_sum = 0.0;
  bool p_defined = true;  // a zero-probability best mode poisons the p-metrics

  for (const PredictionCase & c : cases) {
    validate(c);
    const std::size_t k = c.trajectories.size();
    const Vec2 gt_endpoint = c.ground_truth.back();

    std::vector<double> fde(k);
    std::vector<double> ade(k);
    std::vector<Vec2> endpoints(k);
    for (std::size_t m = 0; m < k; ++m) {
      const std::vector<Vec2> & trajectory = c.trajectories[m];
      endpoints[m] = trajectory.back();
      fde[m] = distance(endpoints[m], gt_endpoint);
      double sum = 0.0;
      for (std::size_t t = 0; t < trajectory.size(); ++t) {
        sum += distance(trajectory[t], c.ground_truth[t]);
      }
      ade[m] = sum / static_cast<double>(trajectory.size());
    }

    const bool missed = miss(endpoints, gt_endpoint, miss_threshold);
    report.misses.push_back(missed ? 1 : 0);
    mr_sum += missed ? 1.0 : 0.0;

    const std::size_t best_fde = argmin(fde);
    const std::size_t best_ade = argmin(ade);
    fde_sum += fde[best_fde];
    ade_sum += ade[best_ade];
    if (c.probabilities[best_fde] > 0.0 && c.probabilities[best_ade] > 0.0) {
      p_fde_sum += p_metric(fde[best_fde], c.probabilities[best_fde]);
      p_ade_sum += p_metric(ade[best_ade], c.probabilities[best_ade]);
    } else {
      p_defined = false;
    }
  }

  const double n = static_cast<double>(cases.size());
  report.mr = mr_sum / n;
  report.min_fde = fde_sum / n;
  report.min_ade = ade_sum / n;
  report.p_min_fde = p_defined ? p_fde_sum / n : std::numeric_limits<double>::quiet_NaN();
  report.p_min_ade = p_defined ? p_ade_sum / n : std::numeric_limits<double>::quiet_NaN();
  return report;
}

std::vector<PredictionCase> read_prediction_cases(
  const std::filesystem::path & prediction_csv, const std::filesystem::path & ground_truth_csv)
{
  std::map<std::int64_t, std::vector<Vec2>> truth = read_ground_truth(ground_truth_csv);

  const std::vector<std::string> lines = read_lines(prediction_csv);
  if (lines.empty()) {
    throw std::runtime_error(prediction_csv.string() + ": empty prediction file");
  }

  std::map<std::int64_t, PredictionCase> cases;
  if (lines[0] == "k,x,y,probability,covered_mass") {
    // Endpoint CSV straight from the sampler: one implicit case (id 0) whose
    // modes are single-point trajectories.
    const SampleSet samples = read_sample_csv(prediction_csv);
    PredictionCase & c = cases[0];
    c.case_id = 0;
    for (std::size_t m = 0; m < samples.points.size(); ++m) {
      c.trajectories.push_back({samples.points[m]});
      c.probabilities.push_back(samples.probabilities[m]);
    }
  } else if (lines[0] == "case_id,k,t,x,y,prob") {
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) {
        continue;
      }
      const auto fields = split_fields(lines[i]);
      if (fields.size() != 6) {
        row_error(prediction_csv, i + 1, "expected 6 fields");
      }
      const std::int64_t case_id = parse_int_field(fields[0], prediction_csv, i + 1);
      const std::int64_t mode = parse_int_field(fields[1], prediction_csv, i + 1);
      const std::int64_t t = parse_int_field(fields[2], prediction_csv, i + 1);
      const Vec2 point{
        parse_double_field(fields[3], prediction_csv, i + 1),
        parse_double_field(fields[4], prediction_csv, i + 1)};
      const double prob = parse_double_field(fields[5], prediction_csv, i + 1);

      PredictionCase & c = cases[case_id];
      c.case_id = case_id;
      if (t == 1) {
        if (mode != static_cast<std::int64_t>(c.trajectories.size()) + 1) {
          row_error(prediction_csv, i + 1, "modes for a case must count 1..K in order");
        }
        c.trajectories.emplace_back();
        c.probabilities.push_back(prob);
      } else {
        if (
          c.trajectories.empty() ||
          mode != static_cast<std::int64_t>(c.trajectories.size())) {
          row_error(prediction_csv, i + 1, "time steps for a mode must count 1..T in order");
        }
        if (t != static_cast<std::int64_t>(c.trajectories.back().size()) + 1) {
          row_error(prediction_csv, i + 1, "time steps for a mode must count 1..T in order");
        }
      }
      c.trajectories.back().push_back(point);
    }
  } else {
    throw std::runtime_error(
      prediction_csv.string() +
      ": expected header 'case_id,k,t,x,y,prob' or 'k,x,y,probability,covered_mass'");
  }

  if (cases.empty()) {
    throw std::runtime_error(prediction_csv.string() + ": no prediction rows");
  }

  std::vector<PredictionCase> out;
  out.reserve(cases.size());
  for (auto & [case_id, c] : cases) {
    const auto it = truth.find(case_id);
    if (it == truth.end()) {
      throw std::runtime_error(
        ground_truth_csv.string() + ": missing ground truth for case " + std::to_string(case_id));
    }
    c.ground_truth = it->second;
    validate(c);
    out.push_back(std::move(c));
  }
  for (const auto & [case_id, points] : truth) {
    if (!cases.contains(case_id)) {
      throw std::runtime_error(
        prediction_csv.string() + ": missing predictions for case " + std::to_string(case_id));
    }
  }
  return out;
}

std::string metrics_to_json(const MetricsReport & report)
{
  nlohmann::ordered_json j;
  j["num_cases"] = report.num_cases;
  j["mr"] = report.mr;
  j["min_fde"] = report.min_fde;
  j["min_ade"] = report.min_ade;
  // NaN (undefined p-metrics) serializes as null.
  j["p_min_fde"] = report.p_min_fde;
  j["p_min_ade"] = report.p_min_ade;
  std::vector<int> misses(report.misses.begin(), report.misses.end());
  j["misses"] = misses;
  return j.dump(2);
}

void write_metrics_json(const std::filesystem::path & path, const MetricsReport & report)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << metrics_to_json(report) << '\n';
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

}  // namespace heatcast
