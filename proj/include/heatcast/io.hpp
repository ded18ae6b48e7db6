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

#ifndef HEATCAST_IO_HPP_
#define HEATCAST_IO_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "heatcast/grid.hpp"
#include "heatcast/sampling.hpp"

namespace heatcast
{

// HGRD v1 grid container: one ASCII header line
//
//   HGRD <width> <height> <resolution> <origin_x> <origin_y>\n
//
// followed by width*height row-major IEEE-754 binary32 values, little-endian.
// Doubles in the header are written in shortest round-trip form, so writing
// is byte-deterministic. Reading back returns the float32-quantized values.
// A "stack" file is simply several records back to back.
void write_hgrd(const std::filesystem::path & path, const ProbabilityGrid & grid);
ProbabilityGrid read_hgrd(const std::filesystem::path & path);
void write_hgrd_stack(const std::filesystem::path & path, std::span<const ProbabilityGrid> grids);
std::vector<ProbabilityGrid> read_hgrd_stack(const std::filesystem::path & path);

// Binary 8-bit PGM (P5), values scaled so the grid maximum maps to 255
// (all-zero grids stay zero).
void write_pgm(const std::filesystem::path & path, const ProbabilityGrid & grid);

// All grids tiled onto one PGM page, `columns` per row, each tile max-scaled
// independently. Grids must share dimensions.
void write_pgm_contact_sheet(
  const std::filesystem::path & path, std::span<const ProbabilityGrid> grids, int columns);

// Endpoint CSV: header "k,x,y,probability,covered_mass", k starting at 1,
// doubles in shortest round-trip form (parsing them back restores identical
// values).
void write_sample_csv(const std::filesystem::path & path, const SampleSet & samples);
SampleSet read_sample_csv(const std::filesystem::path & path);

// Shortest round-trip decimal form of a double (the form every writer in
// this library uses).
std::string format_double(double value);

}  // namespace heatcast

#endif  // HEATCAST_IO_HPP_
