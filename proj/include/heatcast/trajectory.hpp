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

#ifndef HEATCAST_TRAJECTORY_HPP_
#define HEATCAST_TRAJECTORY_HPP_

#include <cstdint>
#include <vector>

#include "heatcast/vec2.hpp"

namespace heatcast
{

// Observed agent track up to the present. Entry i is (points[i],
// timestamps[i]); padded[i] marks timesteps with no observation (their point
// is a placeholder). Timestamps must be strictly increasing and at least one
// entry must be unpadded.
struct AgentHistory
{
  std::vector<Vec2> points;
  std::vector<double> timestamps;
  std::vector<std::uint8_t> padded;
};

void validate(const AgentHistory & history);

struct Trajectory
{
  std::vector<Vec2> points;  // future steps 1..T; back() is the endpoint
};

// Constant-acceleration interpolation toward a sampled endpoint: starting at
// the last unpadded history point with the last per-step finite difference of
// the unpadded history as initial velocity, the acceleration is chosen so the
// position at step `steps` equals `endpoint` exactly. A single-point history
// degenerates to zero initial velocity. steps >= 1.
Trajectory build_trajectory(const AgentHistory & history, Vec2 endpoint, int steps);

}  // namespace heatcast

#endif  // HEATCAST_TRAJECTORY_HPP_
