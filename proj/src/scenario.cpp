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

#include "heatcast/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatcast/io.hpp"
#include "heatcast/oracle.hpp"

namespace heatcast
{

namespace
{

[[noreturn]] void line_error(
  const std::filesystem::path & path, std::size_t line_no, const std::string & what)
{
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double_token(
  const std::string & token, const std::filesystem::path & path, std::size_t line_no)
{
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    line_error(path, line_no, "bad numeric value '" + token + "'");
  }
  return value;
}

std::uint64_t parse_seed_token(
  const std::string & token, const std::filesystem::path & path, std::size_t line_no)
{
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    line_error(path, line_no, "bad seed value '" + token + "'");
  }
  return value;
}

// Nonzero pixels of an upsampled grid as an origin-relative point cloud,
// mirroring what the refinement sampler feeds its point iteration (pinned
// against it by tests).
void extract_point_cloud(
  const ProbabilityGrid & grid, std::vector<Vec2> & points, std::vector<double> & weights)
{
  const GridSpec & spec = grid.spec;
  points.clear();
  weights.clear();
  for (int iy = 0; iy < spec.height; ++iy) {
    const double * row = grid.values.data() + static_cast<std::size_t>(iy) * spec.width;
    for (int ix = 0; ix < spec.width; ++ix) {
      if (row[ix] > 0.0) {
        points.push_back({ix * spec.resolution, iy * spec.resolution});
        weights.push_back(row[ix]);
      }
    }
  }
}

}  // namespace

void validate(const GaussianMixture & mixture)
{
  if (mixture.components.empty()) {
    throw std::invalid_argument("mixture has no components");
  }
  double weight_sum = 0.0;
  for (const MixtureComponent & component : mixture.components) {
    if (!(component.sigma > 0.0)) {
      throw std::invalid_argument("mixture sigma must be positive");
    }
    if (!(component.weight > 0.0)) {
      throw std::invalid_argument("mixture weights must be positive");
    }
    weight_sum += component.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-6) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
}

ProbabilityGrid mixture_to_grid(const GaussianMixture & mixture, const GridSpec & spec)
{
  validate(mixture);
  validate(spec);
  for (const MixtureComponent & component : mixture.components) {
    if (!spec.contains(component.mean)) {
      throw std::invalid_argument("mixture mode lies outside the grid");
    }
  }

  ProbabilityGrid grid = ProbabilityGrid::zeros(spec);
  const double pixel_area = spec.resolution * spec.resolution;
#pragma omp parallel for schedule(static)
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

Vec2 draw_ground_truth(const GaussianMixture & mixture, Rng & rng)
{
  validate(mixture);
  const double u = rng.uniform();
  double cumulative = 0.0;
  const MixtureComponent * chosen = &mixture.components.back();
  for (const MixtureComponent & component : mixture.components) {
    cumulative += component.weight;
    if (u < cumulative) {
      chosen = &component;
      break;
    }
  }
  const auto [nx, ny] = rng.standard_normal_2d();
  return {chosen->mean.x + chosen->sigma * nx, chosen->mean.y + chosen->sigma * ny};
}

Vec2 draw_ground_truth(const GaussianMixture & mixture, std::uint64_t seed)
{
  Rng rng(seed);
  return draw_ground_truth(mixture, rng);
}

TradeoffCurve sweep_tradeoff(
  const GaussianMixture & mixture, const SamplerConfig & config, std::span<const int> l_values,
  std::int64_t draws, std::uint64_t seed, const GridSpec & spec)
{
  validate(mixture);
  validate(config);
  if (l_values.empty() || l_values.front() != 0) {
    throw std::invalid_argument("l_values must start at 0");
  }
  for (std::size_t i = 1; i < l_values.size(); ++i) {
    if (l_values[i] <= l_values[i - 1]) {
      throw std::invalid_argument("l_values must be strictly ascending");
    }
  }
  if (draws < 1) {
    throw std::invalid_argument("sweep needs at least one draw");
  }

  const ProbabilityGrid grid = mixture_to_grid(mixture, spec);
  const SampleSet init = sample_mr(grid, config);

  // Refinement is a pure function of the current centroids, so one running
  // set of centroids can be advanced to each requested L in turn; the result
  // at every stop is bit-identical to refining from scratch.
  const ProbabilityGrid working = upsample_bilinear(grid, config.upsample_factor);
  std::vector<Vec2> points;
  std::vector<double> weights;
  extract_point_cloud(working, points, weights);
  const Vec2 origin = working.spec.origin;
  std::vector<Vec2> centroids;
  centroids.reserve(init.points.size());
  for (Vec2 p : init.points) {
    centroids.push_back(p - origin);
  }
  const double min_distance = working.spec.resolution / 2.0;

  TradeoffCurve curve;
  int done = 0;
  for (int l : l_values) {
    centroids = fde_refine(
      points, weights, std::move(centroids), l - done, config.fde_neighborhood_m, min_distance);
    done = l;

    SampleSet set;
    set.probabilities = init.probabilities;
    set.covered_mass.assign(centroids.size(), 0.0);
    set.points.reserve(centroids.size());
    for (Vec2 c : centroids) {
      set.points.push_back(origin + c);
    }

    const MetricsReport report = monte_carlo_metrics(
      mixture, set, draws, mix_seed(seed, static_cast<std::uint64_t>(l)),
      config.miss_threshold_m);
    curve.rows.push_back({l, report.mr, report.min_fde});
  }
  return curve;
}

std::vector<GaussianMixture> synthetic_suite()
{
  // Pair cores sit 2.4 m apart so a 1.8 m coverage disk centered between them
  // reaches both cores while value-ranked picks at the heavy peak leave the
  // light core beyond the 2 m miss threshold. Weights are expressed in 64ths
  // so every mixture sums to exactly one.
  constexpr double kPairSeparation = 2.4;

  const auto pair = [](
                      std::vector<MixtureComponent> & modes, Vec2 center, double angle_deg,
                      double sigma, double heavy_w64, double light_w64) {
    const double angle = angle_deg * std::numbers::pi / 180.0;
    const Vec2 axis{std::cos(angle), std::sin(angle)};
    const Vec2 offset = axis * (0.5 * kPairSeparation);
    modes.push_back({center - offset, sigma, heavy_w64 / 64.0});
    modes.push_back({center + offset, sigma, light_w64 / 64.0});
  };
  const auto lone = [](
                      std::vector<MixtureComponent> & modes, Vec2 center, double sigma,
                      double w64) { modes.push_back({center, sigma, w64 / 64.0}); };

  std::vector<GaussianMixture> suite;
  suite.reserve(10);

  {
    GaussianMixture m{"suite-00", {}, 9001};
    pair(m.components, {-26.0, -14.0}, 0.0, 0.45, 18.0, 6.0);
    pair(m.components, {24.0, -18.0}, 90.0, 0.45, 15.0, 5.0);
    lone(m.components, {2.0, 28.0}, 0.55, 20.0);
    suite.push_back(std::move(m));
  }
  {
    GaussianMixture m{"suite-01", {}, 9002};
    pair(m.components, {-30.0, 22.0}, 30.0, 0.5, 18.0, 6.0);
    pair(m.components, {26.0, 18.0}, 120.0, 0.45, 15.0, 5.0);
    lone(m.components, {0.0, -26.0}, 0.5, 20.0);
    suite.push_back(std::move(m));
  }
  {
    GaussianMixture m{"suite-02", {}, 9003};
    pair(m.components, {0.0, 34.0}, 60.0, 0.45, 21.0, 7.0);
    pair(m.components, {-24.0, -24.0}, 150.0, 0.5, 12.0, 4.0);
    lone(m.components, {26.0, -20.0}, 0.55, 20.0);
    suite.push_back(std::move(m));
  }
  {
    GaussianMixture m{"suite-03", {}, 9004};
    pair(m.components, {-34.0, 0.0}, 45.0, 0.4, 18.0, 6.0);
    pair(m.components, {30.0, 8.0}, 135.0, 0.5, 15.0, 5.0);
    lone(m.components, {4.0, -30.0}, 0.5, 20.0);
    suite.push_back(std::move(m));
  }
  {
    GaussianMixture m{"suite-04", {}, 9005};
    pair(m.components, {20.0, 28.0}, 15.0, 0.45, 24.0, 8.0);
    pair(m.components, {-20.0, 26.0}, 105.0, 0.45, 12.0, 4.0);
    lone(m.components, {-2.0, -32.0}, 0.6, 16.0);
    suite.push_back(std::move(m));
  }
  {
    GaussianMixture m{"suite-05", {}, 9006};
    pair(m.components, {-28.0, -28.0}, 75.0, 0.5, 18.0, 6.0);
    pair(m.components, {28.0, -26.0}, 165.0, 0.45, 15.0, 5.0);
    lone(m.components, {0.0, 30.0}, 0.5, 20.0);
    suite.push_back(std::move(m));
  }
  {
    GaussianMixture m{"suite-06", {}, 9007};
    pair(m.components, {32.0, -4.0}, 90.0, 0.45, 21.0, 7.0);
    pair(m.components, {-28.0, 12.0}, 0.0, 0.55, 15.0, 5.0);
    lone(m.components, {-6.0, -34.0}, 0.5, 16.0);
    suite.push_back(std::move(m));
  }
  {
    GaussianMixture m{"suite-07", {}, 9008};
    pair(m.components, {8.0, 30.0}, 135.0, 0.45, 18.0, 6.0);
    pair(m.components, {-10.0, -30.0}, 45.0, 0.5, 18.0, 6.0);
    lone(m.components, {34.0, 18.0}, 0.55, 16.0);
    suite.push_back(std::move(m));
  }
  {
    GaussianMixture m{"suite-08", {}, 9009};
    pair(m.components, {-24.0, 6.0}, 20.0, 0.45, 27.0, 9.0);
    lone(m.components, {28.0, 24.0}, 0.5, 14.0);
    lone(m.components, {14.0, -30.0}, 0.5, 14.0);
    suite.push_back(std::move(m));
  }
  {
    GaussianMixture m{"suite-09", {}, 9010};
    pair(m.components, {26.0, 10.0}, 70.0, 0.5, 24.0, 8.0);
    lone(m.components, {-30.0, -18.0}, 0.5, 16.0);
    lone(m.components, {-16.0, 30.0}, 0.45, 16.0);
    suite.push_back(std::move(m));
  }

  for (const GaussianMixture & mixture : suite) {
    validate(mixture);
  }
  return suite;
}

GaussianMixture read_mixture_file(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  GaussianMixture mixture;
  std::string line;
  std::size_t line_no = 0;
  bool saw_name = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    std::istringstream tokens(line);
    std::string keyword;
    if (!(tokens >> keyword) || keyword.front() == '#') {
      continue;  // blank or comment
    }
    if (keyword == "name") {
      if (!(tokens >> mixture.name)) {
        line_error(path, line_no, "name needs an identifier");
      }
      saw_name = true;
    } else if (keyword == "seed") {
      std::string token;
      if (!(tokens >> token)) {
        line_error(path, line_no, "seed needs a value");
      }
      mixture.seed = parse_seed_token(token, path, line_no);
    } else if (keyword == "mode") {
      std::string mx;
      std::string my;
      std::string sigma;
      std::string weight;
      if (!(tokens >> mx >> my >> sigma >> weight)) {
        line_error(path, line_no, "mode needs <mean_x> <mean_y> <sigma> <weight>");
      }
      mixture.components.push_back(
        {{parse_double_token(mx, path, line_no), parse_double_token(my, path, line_no)},
         parse_double_token(sigma, path, line_no), parse_double_token(weight, path, line_no)});
    } else {
      line_error(path, line_no, "unknown directive '" + keyword + "'");
    }
    std::string extra;
    if (tokens >> extra) {
      line_error(path, line_no, "unexpected trailing token '" + extra + "'");
    }
  }
  if (!saw_name) {
    mixture.name = path.stem().string();
  }
  validate(mixture);
  // Clean up the rounding slack the 1e-6 tolerance allows.
  double weight_sum = 0.0;
  for (const MixtureComponent & component : mixture.components) {
    weight_sum += component.weight;
  }
  for (MixtureComponent & component : mixture.components) {
    component.weight /= weight_sum;
  }
  return mixture;
}

void write_mixture_file(const std::filesystem::path & path, const GaussianMixture & mixture)
{
  validate(mixture);
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  if (!mixture.name.empty()) {
    out << "name " << mixture.name << '\n';
  }
  out << "seed " << mixture.seed << '\n';
  for (const MixtureComponent & component : mixture.components) {
    out << "mode " << format_double(component.mean.x) << ' ' << format_double(component.mean.y)
        << ' ' << format_double(component.sigma) << ' ' << format_double(component.weight) << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

void write_tradeoff_csv(const std::filesystem::path & path, const TradeoffCurve & curve)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << "L,expected_mr,expected_fde\n";
  for (const TradeoffRow & row : curve.rows) {
    out << row.iterations << ',' << format_double(row.expected_mr) << ','
        << format_double(row.expected_fde) << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

}  // namespace heatcast
