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

#ifndef HEATCAST_RASTERIZER_HPP_
#define HEATCAST_RASTERIZER_HPP_

#include <filesystem>
#include <optional>
#include <vector>

#include "heatcast/grid.hpp"
#include "heatcast/trajectory.hpp"
#include "heatcast/vec2.hpp"

namespace heatcast
{

// Scene description in the agent-centered, heading-aligned metric frame the
// grids use (the target agent's current pose is the frame, so its history
// ends near the origin pointing along +x).

struct DirectedVertex
{
  Vec2 position;
  double heading = 0.0;  // radians, wrapped to [0, 2*pi) when encoded
};

struct AgentTrack
{
  AgentHistory history;
  double length = 4.0;  // footprint, meters
  double width = 2.0;
};

struct Scene
{
  std::vector<std::vector<Vec2>> drivable;             // closed polygons (first == last)
  std::vector<std::vector<Vec2>> boundaries;           // polylines
  std::vector<std::vector<DirectedVertex>> centerlines;
  std::optional<AgentTrack> target;
  std::vector<AgentTrack> neighbors;
};

void validate(const Scene & scene);

inline constexpr int kSemanticChannels = 5;
inline constexpr int kHistorySteps = 20;
inline constexpr int kRasterChannels = kSemanticChannels + 2 * kHistorySteps;  // 45

// Channel layout:
//   0          drivable area (binary occupancy)
//   1          lane boundaries (1 px polylines, binary)
//   2..4       centerline headings, HSV(heading)->RGB at drawn pixels
//   5..24      target footprints, one channel per history step, oldest first
//   25..44     neighbor footprints (max-union over agents), same ordering
// All values lie in [0, 1]. Footprints are oriented rectangles (length along
// the step's motion direction); a track shorter than 20 steps fills only the
// most recent channels and padded steps stay empty.
struct RasterStack
{
  GridSpec spec;
  std::vector<ProbabilityGrid> channels;  // kRasterChannels entries
};

RasterStack rasterize_scene(
  const Scene & scene, const GridSpec & spec = GridSpec::centered(224, 224, 0.5));

// Heading -> RGB via HSV with hue = heading / 2*pi, full saturation/value:
// heading 0 is pure red, 2*pi/3 pure green, 4*pi/3 pure blue.
struct RgbColor
{
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

RgbColor hsv_heading_encode(double heading_rad);

// Plain-text scene description (whitespace-tokenized, # starts a comment):
//
//   drivable <n> x1 y1 ... xn yn          closed polygon, first == last
//   boundary <n> x1 y1 ... xn yn          polyline
//   centerline <n> x1 y1 h1 ... xn yn hn  directed polyline
//   agent target|neighbor <length> <width> <n>
//     t1 x1 y1
//     ...                                 n history rows, timestamps ascending
//
// Errors carry the offending line number.
Scene read_scene_file(const std::filesystem::path & path);

}  // namespace heatcast

#endif  // HEATCAST_RASTERIZER_HPP_
