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

#include "heatcast/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace heatcast
{

namespace
{

void append_f32_le(std::string & buffer, float value)
{
  std::uint32_t bits = 0;
  std::memcpy(&bits, &value, sizeof(bits));
  buffer.push_back(static_cast<char>(bits & 0xff));
  buffer.push_back(static_cast<char>((bits >> 8) & 0xff));
  buffer.push_back(static_cast<char>((bits >> 16) & 0xff));
  buffer.push_back(static_cast<char>((bits >> 24) & 0xff));
}

float read_f32_le(const unsigned char * bytes)
{
  const std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                             (static_cast<std::uint32_t>(bytes[1]) << 8) |
                             (static_cast<std::uint32_t>(bytes[2]) << 16) |
                             (static_cast<std::uint32_t>(bytes[3]) << 24);
  float value = 0.0f;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

void write_file(const std::filesystem::path & path, const std::string & data)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double parse_double_token(const std::string & token, const std::string & context)
{
  double value = 0.0;
  const char * begin = token.data();
  const char * end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error(context + ": bad number '" + token + "'");
  }
  return value;
}

long long parse_int_token(const std::string & token, const std::string & context)
{
  long long value = 0;
  const char * begin = token.data();
  const char * end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error(context + ": bad integer '" + token + "'");
  }
  return value;
}

std::vector<std::string> split_csv_row(const std::string & line)
{
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

void append_hgrd_record(std::string & buffer, const ProbabilityGrid & grid)
{
  validate(grid);
  buffer += "HGRD ";
  buffer += std::to_string(grid.spec.width);
  buffer += ' ';
  buffer += std::to_string(grid.spec.height);
  buffer += ' ';
  buffer += format_double(grid.spec.resolution);
  buffer += ' ';
  buffer += format_double(grid.spec.origin.x);
  buffer += ' ';
  buffer += format_double(grid.spec.origin.y);
  buffer += '\n';
  for (double v : grid.values) {
    append_f32_le(buffer, static_cast<float>(v));
  }
}

// Parses one record starting at `pos`; advances `pos` past it.
ProbabilityGrid parse_hgrd_record(
  const std::string & data, std::size_t & pos, const std::filesystem::path & path)
{
  const std::size_t line_end = data.find('\n', pos);
  if (line_end == std::string::npos) {
    throw std::runtime_error(path.string() + ": missing header line terminator");
  }
  std::istringstream header(data.substr(pos, line_end - pos));
  std::string magic;
  std::string w_tok;
  std::string h_tok;
  std::string res_tok;
  std::string ox_tok;
  std::string oy_tok;
  if (!(header >> magic >> w_tok >> h_tok >> res_tok >> ox_tok >> oy_tok) || magic != "HGRD") {
    throw std::runtime_error(path.string() + ": malformed HGRD header");
  }
  std::string trailing;
  if (header >> trailing) {
    throw std::runtime_error(path.string() + ": trailing tokens in HGRD header");
  }

  const std::string context = path.string() + " header";
  ProbabilityGrid grid;
  grid.spec.width = static_cast<int>(parse_int_token(w_tok, context));
  grid.spec.height = static_cast<int>(parse_int_token(h_tok, context));
  grid.spec.resolution = parse_double_token(res_tok, context);
  grid.spec.origin.x = parse_double_token(ox_tok, context);
  grid.spec.origin.y = parse_double_token(oy_tok, context);
  validate(grid.spec);

  const std::size_t count = static_cast<std::size_t>(grid.spec.num_pixels());
  const std::size_t payload_begin = line_end + 1;
  if (data.size() - payload_begin < count * 4) {
    throw std::runtime_error(path.string() + ": truncated HGRD payload");
  }
  grid.values.resize(count);
  const unsigned char * bytes =
    reinterpret_cast<const unsigned char *>(data.data()) + payload_begin;
  for (std::size_t i = 0; i < count; ++i) {
    grid.values[i] = static_cast<double>(read_f32_le(bytes + i * 4));
  }
  pos = payload_begin + count * 4;
  validate(grid);
  return grid;
}

}  // namespace

std::string format_double(double value)
{
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw std::runtime_error("double formatting failed");
  }
  return std::string(buffer, ptr);
}

void write_hgrd(const std::filesystem::path & path, const ProbabilityGrid & grid)
{
  std::string buffer;
  append_hgrd_record(buffer, grid);
  write_file(path, buffer);
}

ProbabilityGrid read_hgrd(const std::filesystem::path & path)
{
  const std::string data = read_file(path);
  std::size_t pos = 0;
  ProbabilityGrid grid = parse_hgrd_record(data, pos, path);
  if (pos != data.size()) {
    throw std::runtime_error(path.string() + ": trailing bytes after HGRD record");
  }
  return grid;
}

void write_hgrd_stack(const std::filesystem::path & path, std::span<const ProbabilityGrid> grids)
{
  std::string buffer;
  for (const ProbabilityGrid & grid : grids) {
    append_hgrd_record(buffer, grid);
  }
  write_file(path, buffer);
}

std::vector<ProbabilityGrid> read_hgrd_stack(const std::filesystem::path & path)
{
  const std::string data = read_file(path);
  std::vector<ProbabilityGrid> grids;
  std::size_t pos = 0;
  while (pos < data.size()) {
    grids.push_back(parse_hgrd_record(data, pos, path));
  }
  return grids;
}

void write_pgm(const std::filesystem::path & path, const ProbabilityGrid & grid)
{
  validate(grid);
  const double max_value = *std::max_element(grid.values.begin(), grid.values.end());
  const double scale = max_value > 0.0 ? 255.0 / max_value : 0.0;

  std::string buffer;
  buffer += "P5\n";
  buffer += std::to_string(grid.spec.width);
  buffer += ' ';
  buffer += std::to_string(grid.spec.height);
  buffer += "\n255\n";
  for (double v : grid.values) {
    const long byte = std::lround(v * scale);
    buffer.push_back(static_cast<char>(std::clamp(byte, 0L, 255L)));
  }
  write_file(path, buffer);
}

void write_pgm_contact_sheet(
  const std::filesystem::path & path, std::span<const ProbabilityGrid> grids, int columns)
{
  if (grids.empty() || columns <= 0) {
    throw std::invalid_argument("contact sheet needs grids and a positive column count");
  }
  const int tile_w = grids[0].spec.width;
  const int tile_h = grids[0].spec.height;
  for (const ProbabilityGrid & grid : grids) {
    validate(grid);
    if (grid.spec.width != tile_w || grid.spec.height != tile_h) {
      throw std::invalid_argument("contact sheet tiles must share dimensions");
    }
  }

  const int rows = (static_cast<int>(grids.size()) + columns - 1) / columns;
  const int sheet_w = tile_w * columns;
  const int sheet_h = tile_h * rows;
  std::vector<unsigned char> pixels(
    static_cast<std::size_t>(sheet_w) * static_cast<std::size_t>(sheet_h), 0);

  for (std::size_t g = 0; g < grids.size(); ++g) {
    const double max_value = *std::max_element(grids[g].values.begin(), grids[g].values.end());
    const double scale = max_value > 0.0 ? 255.0 / max_value : 0.0;
    const int tile_col = static_cast<int>(g) % columns;
    const int tile_row = static_cast<int>(g) / columns;
    for (int iy = 0; iy < tile_h; ++iy) {
      for (int ix = 0; ix < tile_w; ++ix) {
        const long byte = std::lround(grids[g].at(ix, iy) * scale);
        const std::size_t px =
          static_cast<std::size_t>(tile_row * tile_h + iy) * sheet_w + tile_col * tile_w + ix;
        pixels[px] = static_cast<unsigned char>(std::clamp(byte, 0L, 255L));
      }
    }
  }

  std::string buffer;
  buffer += "P5\n";
  buffer += std::to_string(sheet_w);
  buffer += ' ';
  buffer += std::to_string(sheet_h);
  buffer += "\n255\n";
  buffer.append(reinterpret_cast<const char *>(pixels.data()), pixels.size());
  write_file(path, buffer);
}

void write_sample_csv(const std::filesystem::path & path, const SampleSet & samples)
{
  if (
    samples.points.size() != samples.probabilities.size() ||
    samples.points.size() != samples.covered_mass.size()) {
    throw std::invalid_argument("sample set field lengths disagree");
  }
  std::string buffer = "k,x,y,probability,covered_mass\n";
  for (std::size_t i = 0; i < samples.points.size(); ++i) {
    buffer += std::to_string(i + 1);
    buffer += ',';
    buffer += format_double(samples.points[i].x);
    buffer += ',';
    buffer += format_double(samples.points[i].y);
    buffer += ',';
    buffer += format_double(samples.probabilities[i]);
    buffer += ',';
    buffer += format_double(samples.covered_mass[i]);
    buffer += '\n';
  }
  write_file(path, buffer);
}

SampleSet read_sample_csv(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || split_csv_row(line) !=
      std::vector<std::string>{"k", "x", "y", "probability", "covered_mass"}) {
    throw std::runtime_error(path.string() + ": expected sample CSV header");
  }

  SampleSet samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_csv_row(line);
    const std::string context = path.string() + " line " + std::to_string(line_no);
    if (fields.size() != 5) {
      throw std::runtime_error(context + ": expected 5 fields");
    }
    const long long k = parse_int_token(fields[0], context);
    if (k != static_cast<long long>(samples.points.size()) + 1) {
      throw std::runtime_error(context + ": k values must be 1..K in order");
    }
    samples.points.push_back(
      {parse_double_token(fields[1], context), parse_double_token(fields[2], context)});
    samples.probabilities.push_back(parse_double_token(fields[3], context));
    samples.covered_mass.push_back(parse_double_token(fields[4], context));
  }
  return samples;
}

}  // namespace heatcast
