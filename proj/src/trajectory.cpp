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

#include "heatcast/trajectory.hpp"

#include <stdexcept>

namespace heatcast
{

namespace
{

bool is_padded(const AgentHistory & history, std::size_t index)
{
  return !history.padded.empty() && history.padded[index] != 0;
}

}  // namespace

void validate(const AgentHistory & history)
{
  if (history.points.empty()) {
    throw std::invalid_argument("agent history is empty");
  }
  if (history.points.size() != history.timestamps.size()) {
    throw std::invalid_argument("history points/timestamps size mismatch");
  }
  if (!history.padded.empty() && history.padded.size() != history.points.size()) {
    throw std::invalid_argument("history padding mask size mismatch");
  }
  for (std::size_t i = 1; i < history.timestamps.size(); ++i) {
    if (!(history.timestamps[i] > history.timestamps[i - 1])) {
      throw std::invalid_argument("history timestamps must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < history.points.size(); ++i) {
    if (!is_padded(history, i)) {
      return;  // at least one real observation
    }
  }
  throw std::invalid_argument("agent history is fully padded");
}

Trajectory build_trajectory(const AgentHistory & history, Vec2 endpoint, int steps)
{
  validate(history);
  if (steps < 1) {
    throw std::invalid_argument("trajectory needs at least one step");
  }

  // Start state: last real observation, with the last per-step finite
  // difference of the real observations as velocity. Padded steps count
  // toward the index gap (the agent kept moving while unobserved).
  std::size_t last = history.points.size();
  std::size_t previous = history.points.size();
  for (std::size_t i = history.points.size(); i-- > 0;) {
    if (is_padded(history, i)) {
      continue;
    }
    if (last == history.points.size()) {
      last = i;
    } else {
      previous = i;
      break;
    }
  }
  const Vec2 start = history.points[last];
  Vec2 velocity{0.0, 0.0};
  if (previous != history.points.size()) {
    velocity =
      (history.points[last] - history.points[previous]) * (1.0 / static_cast<double>(last - previous));
  }

  // Constant acceleration chosen so the position at step `steps` lands on the
  // endpoint; intermediate steps interpolate the bend smoothly.
  const double horizon = static_cast<double>(steps);
  const Vec2 acceleration =
    (endpoint - start - velocity * horizon) * (2.0 / (horizon * horizon));

  Trajectory trajectory;
  trajectory.points.reserve(static_cast<std::size_t>(steps));
  for (int n = 1; n < steps; ++n) {
    const double s = static_cast<double>(n);
    trajectory.points.push_back(start + velocity * s + acceleration * (0.5 * s * s));
  }
  trajectory.points.push_back(endpoint);  // exact by construction
  return trajectory;
}

}  // namespace heatcast
