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

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "heatcast/grid.hpp"
#include "heatcast/oracle.hpp"
#include "heatcast/rng.hpp"
#include "heatcast/sampling.hpp"
#include "test_support.hpp"

namespace heatcast
{
namespace
{

GaussianMixture two_modes()
{
  GaussianMixture mixture;
  mixture.name = "two-modes";
  mixture.components = {
    {{-30.0, 0.0}, 0.5, 0.7},
    {{30.0, 0.0}, 0.5, 0.3},
  };
  mixture.seed = 99;
  return mixture;
}

TEST_CASE("mixture validation")
{
  CHECK_NOTHROW(validate(two_modes()));

  GaussianMixture bad;
  bad.name = "empty";
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = two_modes();
  bad.components[0].sigma = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = two_modes();
  bad.components[0].weight = -0.1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = two_modes();
  bad.components[0].weight = 0.8;  // sums to 1.1
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("rasterized mixtures carry density times pixel area")
{
  GaussianMixture single;
  single.name = "single";
  single.components = {{{0.0, 0.0}, 1.0, 1.0}};
  const GridSpec spec = GridSpec::centered(101, 101, 0.5);
  const ProbabilityGrid grid = mixture_to_grid(single, spec);

  // Mode sits exactly on the center pixel at (50, 50).
  const double peak = 0.25 / (2.0 * std::numbers::pi);
  CHECK(grid.at(50, 50) == doctest::Approx(peak).epsilon(1e-12));
  // One pixel east: density falls by exp(-0.5^2 / 2).
  CHECK(grid.at(51, 50) == doctest::Approx(peak * std::exp(-0.125)).epsilon(1e-12));

  // A well-contained mode integrates to its weight within 2%.
  CHECK(total_mass(grid) == doctest::Approx(1.0).epsilon(0.02));

  const ProbabilityGrid both = mixture_to_grid(two_modes(), GridSpec::centered(224, 224, 0.5));
  CHECK(total_mass(both) == doctest::Approx(1.0).epsilon(0.02));

  GaussianMixture outside = two_modes();
  outside.components[0].mean = {-1000.0, 0.0};
  CHECK_THROWS_AS(
    mixture_to_grid(outside, GridSpec::centered(224, 224, 0.5)), std::invalid_argument);
}

TEST_CASE("ground-truth draws consume exactly three uniforms")
{
  const GaussianMixture mixture = two_modes();
  Rng used(1234);
  (void)draw_ground_truth(mixture, used);
  const double next_after_draw = used.uniform();

  Rng skipped(1234);
  (void)skipped.uniform();
  (void)skipped.uniform();
  (void)skipped.uniform();
  CHECK(skipped.uniform() == next_after_draw);

  SUBCASE("the seed convenience overload matches a fresh stream")
  {
    Rng fresh(777);
    const Vec2 a = draw_ground_truth(mixture, fresh);
    const Vec2 b = draw_ground_truth(mixture, 777);
    CHECK(a == b);
  }
}

TEST_CASE("draws follow the mixture weights and component shapes")
{
  const GaussianMixture mixture = two_modes();
  Rng rng(560);
  const int draws = 100000;
  int left = 0;
  double left_x = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Vec2 p = draw_ground_truth(mixture, rng);
    if (p.x < 0.0) {
      ++left;
      left_x += p.x;
    }
  }
  // Modes are 60 m apart with sigma 0.5: the sign of x identifies the
  // component, so the left share estimates the 0.7 weight. Bands are a bit
  // over 4 standard errors.
  CHECK(static_cast<double>(left) / draws == doctest::Approx(0.7).epsilon(0.009));
  CHECK(left_x / left == doctest::Approx(-30.0).epsilon(0.001));
}

TEST_CASE("the trade-off sweep is reproducible and anchored at the pure sampler")
{
  GaussianMixture mixture;
  mixture.name = "sweep";
  mixture.components = {
    {{-8.0, -4.0}, 0.6, 0.5},
    {{9.0, 3.0}, 0.6, 0.25},
    {{-2.0, 10.0}, 0.6, 0.25},
  };
  mixture.seed = 4711;

  const GridSpec spec = GridSpec::centered(64, 64, 0.5);
  SamplerConfig config;
  config.k = 3;
  config.upsample_factor = 2;
  const int ls[] = {0, 1, 4};
  const std::int64_t draws = 2000;

  const TradeoffCurve curve = sweep_tradeoff(mixture, config, ls, draws, mixture.seed, spec);
  REQUIRE(curve.rows.size() == 3);
  CHECK(curve.rows[0].iterations == 0);
  CHECK(curve.rows[1].iterations == 1);
  CHECK(curve.rows[2].iterations == 4);

  SUBCASE("row L = 0 is exactly the coverage sampler under the row stream")
  {
    const ProbabilityGrid grid = mixture_to_grid(mixture, spec);
    const SampleSet init = sample_mr(grid, config);
    SampleSet plain = init;
    plain.covered_mass.assign(plain.points.size(), 0.0);
    const MetricsReport report = monte_carlo_metrics(
      mixture, plain, draws, mix_seed(mixture.seed, 0), config.miss_threshold_m);
    CHECK(curve.rows[0].expected_mr == report.mr);
    CHECK(curve.rows[0].expected_fde == report.min_fde);
  }

  SUBCASE("identical inputs give bitwise-identical curves")
  {
    const TradeoffCurve again = sweep_tradeoff(mixture, config, ls, draws, mixture.seed, spec);
    for (std::size_t i = 0; i < curve.rows.size(); ++i) {
      CHECK(again.rows[i].expected_mr == curve.rows[i].expected_mr);
      CHECK(again.rows[i].expected_fde == curve.rows[i].expected_fde);
    }
  }

  SUBCASE("iteration lists must ascend from zero")
  {
    const int no_zero[] = {1, 2};
    CHECK_THROWS_AS(
      sweep_tradeoff(mixture, config, no_zero, draws, 1, spec), std::invalid_argument);
    const int repeated[] = {0, 2, 2};
    CHECK_THROWS_AS(
      sweep_tradeoff(mixture, config, repeated, draws, 1, spec), std::invalid_argument);
    const int empty[] = {0};
    CHECK_THROWS_AS(
      sweep_tradeoff(mixture, config, std::span<const int>(empty, 0), draws, 1, spec),
      std::invalid_argument);
    CHECK_THROWS_AS(sweep_tradeoff(mixture, config, ls, 0, 1, spec), std::invalid_argument);
  }
}

TEST_CASE("the fixed evaluation suite is well formed")
{
  const std::vector<GaussianMixture> suite = synthetic_suite();
  REQUIRE(suite.size() == 10);

  std::set<std::string> names;
  std::set<std::uint64_t> seeds;
  for (const GaussianMixture & mixture : suite) {
    CHECK_NOTHROW(validate(mixture));
    names.insert(mixture.name);
    seeds.insert(mixture.seed);
    CHECK(mixture.components.size() >= 4);
    CHECK(mixture.components.size() <= 5);

    double weight_sum = 0.0;
    for (const MixtureComponent & component : mixture.components) {
      weight_sum += component.weight;
      // Every mode stays well inside the standard 224 x 224 grid at 0.5 m.
      CHECK(std::abs(component.mean.x) <= 50.0);
      CHECK(std::abs(component.mean.y) <= 50.0);
      CHECK(component.sigma <= 1.0);
    }
    // Weights are dyadic by design, so the sum is exactly 1.
    CHECK(weight_sum == 1.0);
  }
  CHECK(names.size() == 10);
  CHECK(seeds.size() == 10);
}

TEST_CASE("mixture files round-trip exactly")
{
  const testing::TempDir dir("scenario");
  const GaussianMixture mixture = two_modes();
  write_mixture_file(dir.file("mix.txt"), mixture);
  const GaussianMixture back = read_mixture_file(dir.file("mix.txt"));

  CHECK(back.name == mixture.name);
  CHECK(back.seed == mixture.seed);
  REQUIRE(back.components.size() == mixture.components.size());
  for (std::size_t i = 0; i < back.components.size(); ++i) {
    CHECK(back.components[i].mean == mixture.components[i].mean);
    CHECK(back.components[i].sigma == mixture.components[i].sigma);
    CHECK(back.components[i].weight == mixture.components[i].weight);
  }

  SUBCASE("rounding slack in the weights snaps to an exact unit sum")
  {
    // 0.25 + 0.7500001 = 1.0000001, inside the 1e-6 validation tolerance,
    // so the reader accepts the file and then divides the slack out.
    std::ofstream out(dir.file("raw.txt"));
    out << "# hand-written\n";
    out << "name raw\n";
    out << "seed 5\n";
    out << "mode 0 0 1.0 0.25\n";
    out << "mode 4 4 1.0 0.7500001\n";
    out.close();
    const GaussianMixture raw = read_mixture_file(dir.file("raw.txt"));
    const double sum = 0.25 + 0.7500001;
    CHECK(raw.components[0].weight == 0.25 / sum);
    CHECK(raw.components[1].weight == 0.7500001 / sum);
  }

  SUBCASE("weights far from a unit sum are rejected, not rescaled")
  {
    std::ofstream out(dir.file("heavy.txt"));
    out << "name heavy\n";
    out << "seed 5\n";
    out << "mode 0 0 1.0 2\n";
    out << "mode 4 4 1.0 2\n";
    out.close();
    CHECK_THROWS_WITH_AS(
      read_mixture_file(dir.file("heavy.txt")), doctest::Contains("sum to 1"),
      std::invalid_argument);
  }

  SUBCASE("parse errors carry the line number")
  {
    std::ofstream out(dir.file("bad.txt"));
    out << "name broken\n";
    out << "seed 1\n";
    out << "mode 0 0 one 1\n";
    out.close();
    CHECK_THROWS_WITH_AS(
      read_mixture_file(dir.file("bad.txt")), doctest::Contains("bad.txt:3"),
      std::runtime_error);
    CHECK_THROWS_AS(read_mixture_file(dir.file("nonexistent.txt")), std::runtime_error);
  }
}

TEST_CASE("trade-off curves serialize as csv")
{
  const testing::TempDir dir("tradeoff");
  TradeoffCurve curve;
  curve.rows = {{0, 0.125, 1.5}, {2, 0.25, 0.75}};
  write_tradeoff_csv(dir.file("curve.csv"), curve);

  std::ifstream in(dir.file("curve.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "L,expected_mr,expected_fde");
  std::getline(in, line);
  CHECK(line == "0,0.125,1.5");
  std::getline(in, line);
  CHECK(line == "2,0.25,0.75");
}

}  // namespace
}  // namespace heatcast
