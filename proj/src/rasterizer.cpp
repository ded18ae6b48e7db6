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

#include "heatcast/rasterizer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace heatcast
{

namespace
{

// Scanline fill at pixel centers with even-odd parity. Vertices are metric;
// the polygon must be explicitly closed (first == last).
void fill_polygon(ProbabilityGrid & grid, std::span<const Vec2> polygon)
{
  const GridSpec & spec = grid.spec;
  const int height = spec.height;
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < height; ++iy) {
    const double y = spec.origin.y + iy * spec.resolution;
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < polygon.size(); ++i) {
      const Vec2 a = polygon[i];
      const Vec2 b = polygon[i + 1];
      // Half-open span in y so a scanline through a shared vertex crosses
      // exactly one of the two edges meeting there.
      if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y)) {
        crossings.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
      const int ix_lo =
        std::max(0, static_cast<int>(std::ceil((crossings[i] - spec.origin.x) / spec.resolution)));
      const int ix_hi = std::min(
        spec.width - 1,
        static_cast<int>(std::floor((crossings[i + 1] - spec.origin.x) / spec.resolution)));
      for (int ix = ix_lo; ix <= ix_hi; ++ix) {
        grid.at(ix, iy) = 1.0;
      }
    }
  }
}

// One-pixel-wide segment between the nearest pixels of two metric points
// (integer line walk), writing `color` through `plot`.
template <typename Plot>
void draw_segment(const GridSpec & spec, Vec2 from, Vec2 to, Plot && plot)
{
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  spec.to_pixel(from, x0, y0);
  spec.to_pixel(to, x1, y1);

  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (spec.contains(x0, y0)) {
      plot(x0, y0);
    }
    if (x0 == x1 && y0 == y1) {
      break;
    }
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

// Footprint rectangle of an agent at `center`, length axis along `heading`.
std::vector<Vec2> footprint_polygon(Vec2 center, double heading, double length, double width)
{
  const Vec2 forward{std::cos(heading), std::sin(heading)};
  const Vec2 left{-forward.y, forward.x};
  const Vec2 half_l = forward * (0.5 * length);
  const Vec2 half_w = left * (0.5 * width);
  return {
    center + half_l + half_w, center + half_l - half_w, center - half_l - half_w,
    center - half_l + half_w, center + half_l + half_w};
}

// Motion heading at history step `index`: direction of the step from the
// previous real observation, or of the step to the next one for the first
// observation. A stationary or single-point track faces +x.
double step_heading(const AgentHistory & history, std::size_t index)
{
  const auto padded = [&history](std::size_t i) {
    return !history.padded.empty() && history.padded[i] != 0;
  };
  Vec2 delta{0.0, 0.0};
  for (std::size_t i = index; i-- > 0;) {
    if (!padded(i)) {
      delta = history.points[index] - history.points[i];
      break;
    }
  }
  if (delta.x == 0.0 && delta.y == 0.0) {
    for (std::size_t i = index + 1; i < history.points.size(); ++i) {
      if (!padded(i)) {
        delta = history.points[i] - history.points[index];
        break;
      }
    }
  }
  if (delta.x == 0.0 && delta.y == 0.0) {
    return 0.0;
  }
  return std::atan2(delta.y, delta.x);
}

// Footprints of the last kHistorySteps observations, oldest first, into the
// channel block starting at `first_channel`. The most recent step always maps
// to the last channel of the block.
void rasterize_track(RasterStack & stack, const AgentTrack & track, int first_channel)
{
  const std::size_t steps = track.history.points.size();
  for (std::size_t i = steps >= kHistorySteps ? steps - kHistorySteps : 0; i < steps; ++i) {
    if (!track.history.padded.empty() && track.history.padded[i] != 0) {
      continue;
    }
    const int channel =
      first_channel + kHistorySteps - 1 - static_cast<int>(steps - 1 - i);
    const std::vector<Vec2> polygon = footprint_polygon(
      track.history.points[i], step_heading(track.history, i), track.length, track.width);
    fill_polygon(stack.channels[static_cast<std::size_t>(channel)], polygon);
  }
}

[[noreturn]] void token_error(
  const std::filesystem::path & path, std::size_t line_no, const std::string & what)
{
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

struct Token
{
  std::string text;
  std::size_t line = 0;
};

class TokenStream
{
public:
  TokenStream(std::vector<Token> tokens, std::filesystem::path path)
  : tokens_(std::move(tokens)), path_(std::move(path))
  {
  }

  bool done() const { return next_ >= tokens_.size(); }

  const Token & next(const char * expected)
  {
    if (done()) {
      throw std::runtime_error(
        path_.string() + ": unexpected end of file, expected " + expected);
    }
    return tokens_[next_++];
  }

  double next_double(const char * expected)
  {
    const Token & token = next(expected);
    double value = 0.0;
    const auto [ptr, ec] =
      std::from_chars(token.text.data(), token.text.data() + token.text.size(), value);
    if (ec != std::errc{} || ptr != token.text.data() + token.text.size()) {
      token_error(path_, token.line, "bad numeric value '" + token.text + "'");
    }
    return value;
  }

  int next_count(const char * expected, int minimum)
  {
    const Token & token = next(expected);
    int value = 0;
    const auto [ptr, ec] =
      std::from_chars(token.text.data(), token.text.data() + token.text.size(), value);
    if (ec != std::errc{} || ptr != token.text.data() + token.text.size() || value < minimum) {
      token_error(path_, token.line, "bad count '" + token.text + "'");
    }
    return value;
  }

  const std::filesystem::path & path() const { return path_; }

private:
  std::vector<Token> tokens_;
  std::filesystem::path path_;
  std::size_t next_ = 0;
};

TokenStream lex_scene_file(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<Token> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t comment = line.find('#');
    std::istringstream fields(comment == std::string::npos ? line : line.substr(0, comment));
    std::string text;
    while (fields >> text) {
      tokens.push_back({text, line_no});
    }
  }
  return TokenStream(std::move(tokens), path);
}

}  // namespace

void validate(const Scene & scene)
{
  for (const std::vector<Vec2> & polygon : scene.drivable) {
    if (polygon.size() < 4 || !(polygon.front() == polygon.back())) {
      throw std::invalid_argument("drivable polygons must be closed (first == last, >= 4 points)");
    }
  }
  for (const std::vector<Vec2> & polyline : scene.boundaries) {
    if (polyline.size() < 2) {
      throw std::invalid_argument("boundary polylines need at least 2 points");
    }
  }
  for (const std::vector<DirectedVertex> & centerline : scene.centerlines) {
    if (centerline.size() < 2) {
      throw std::invalid_argument("centerlines need at least 2 vertices");
    }
  }
  const auto check_track = [](const AgentTrack & track) {
    validate(track.history);
    if (!(track.length > 0.0) || !(track.width > 0.0)) {
      throw std::invalid_argument("agent footprints must have positive size");
    }
  };
  if (scene.target.has_value()) {
    check_track(*scene.target);
  }
  for (const AgentTrack & neighbor : scene.neighbors) {
    check_track(neighbor);
  }
}

RgbColor hsv_heading_encode(double heading_rad)
{
  double wrapped = std::fmod(heading_rad, 2.0 * std::numbers::pi);
  if (wrapped < 0.0) {
    wrapped += 2.0 * std::numbers::pi;
  }
  const double hue = wrapped / (2.0 * std::numbers::pi) * 6.0;  // sextant position
  const int sextant = std::min(5, static_cast<int>(hue));
  const double x = 1.0 - std::abs(std::fmod(hue, 2.0) - 1.0);
  switch (sextant) {
    case 0:
      return {1.0, x, 0.0};
    case 1:
      return {x, 1.0, 0.0};
    case 2:
      return {0.0, 1.0, x};
    case 3:
      return {0.0, x, 1.0};
    case 4:
      return {x, 0.0, 1.0};
    default:
      return {1.0, 0.0, x};
  }
}

RasterStack rasterize_scene(const Scene & scene, const GridSpec & spec)
{
  validate(scene);
  validate(spec);

  RasterStack stack;
  stack.spec = spec;
  stack.channels.reserve(kRasterChannels);
  for (int c = 0; c < kRasterChannels; ++c) {
    stack.channels.push_back(ProbabilityGrid::zeros(spec));
  }

  for (const std::vector<Vec2> & polygon : scene.drivable) {
    fill_polygon(stack.channels[0], polygon);
  }
  for (const std::vector<Vec2> & polyline : scene.boundaries) {
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
      draw_segment(spec, polyline[i], polyline[i + 1], [&](int ix, int iy) {
        stack.channels[1].at(ix, iy) = 1.0;
      });
    }
  }
  for (const std::vector<DirectedVertex> & centerline : scene.centerlines) {
    for (std::size_t i = 0; i + 1 < centerline.size(); ++i) {
      // Each segment carries its start vertex's heading.
      const RgbColor color = hsv_heading_encode(centerline[i].heading);
      draw_segment(
        spec, centerline[i].position, centerline[i + 1].position, [&](int ix, int iy) {
          stack.channels[2].at(ix, iy) = color.r;
          stack.channels[3].at(ix, iy) = color.g;
          stack.channels[4].at(ix, iy) = color.b;
        });
    }
  }
  if (scene.target.has_value()) {
    rasterize_track(stack, *scene.target, kSemanticChannels);
  }
  for (const AgentTrack & neighbor : scene.neighbors) {
    // Shared channels: overlapping neighbors union together.
    rasterize_track(stack, neighbor, kSemanticChannels + kHistorySteps);
  }
  return stack;
}

Scene read_scene_file(const std::filesystem::path & path)
{
  TokenStream tokens = lex_scene_file(path);
  Scene scene;
  while (!tokens.done()) {
    const Token keyword = tokens.next("a directive");
    if (keyword.text == "drivable" || keyword.text == "boundary") {
      const int n = tokens.next_count("a vertex count", 2);
      std::vector<Vec2> points;
      points.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double x = tokens.next_double("a vertex coordinate");
        const double y = tokens.next_double("a vertex coordinate");
        points.push_back({x, y});
      }
      if (keyword.text == "drivable") {
        scene.drivable.push_back(std::move(points));
      } else {
        scene.boundaries.push_back(std::move(points));
      }
    } else if (keyword.text == "centerline") {
      const int n = tokens.next_count("a vertex count", 2);
      std::vector<DirectedVertex> vertices;
      vertices.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double x = tokens.next_double("a vertex coordinate");
        const double y = tokens.next_double("a vertex coordinate");
        const double heading = tokens.next_double("a vertex heading");
        vertices.push_back({{x, y}, heading});
      }
      scene.centerlines.push_back(std::move(vertices));
    } else if (keyword.text == "agent") {
      const Token role = tokens.next("'target' or 'neighbor'");
      if (role.text != "target" && role.text != "neighbor") {
        token_error(tokens.path(), role.line, "agent role must be 'target' or 'neighbor'");
      }
      AgentTrack track;
      track.length = tokens.next_double("a footprint length");
      track.width = tokens.next_double("a footprint width");
      const int n = tokens.next_count("a history length", 1);
      for (int i = 0; i < n; ++i) {
        track.history.timestamps.push_back(tokens.next_double("a timestamp"));
        const double x = tokens.next_double("a history coordinate");
        const double y = tokens.next_double("a history coordinate");
        track.history.points.push_back({x, y});
      }
      if (role.text == "target") {
        if (scene.target.has_value()) {
          token_error(tokens.path(), role.line, "duplicate target agent");
        }
        scene.target = std::move(track);
      } else {
        scene.neighbors.push_back(std::move(track));
      }
    } else {
      token_error(tokens.path(), keyword.line, "unknown directive '" + keyword.text + "'");
    }
  }
  validate(scene);
  return scene;
}

}  // namespace heatcast
