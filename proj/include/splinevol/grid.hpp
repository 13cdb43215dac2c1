// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Discrete inputs: structured scalar grids and scattered point clouds, plus
// their on-disk formats.
//
// Raw volume: header-less little-endian float32 samples, x fastest, then y,
// then z. A sidecar text file `<raw>.meta` holds
//
//   dims=X,Y,Z
//   bounds=x0,y0,z0,x1,y1,z1
//   order=row-major
//
// Point cloud: one "x y z value" line per sample; '#' starts a comment.

#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "splinevol/core.hpp"

namespace splinevol {

struct ScalarGrid {
  Dims dims{};
  Box bounds;
  std::vector<double> values;

  std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (k * dims[1] + j) * dims[0] + i;
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values[index(i, j, k)]; }
  double spacing(int d) const {
    return (bounds.hi[d] - bounds.lo[d]) / static_cast<double>(dims[static_cast<std::size_t>(d)] - 1);
  }
  // Node position; the last node along each axis sits exactly on bounds.hi.
  double coord(int d, std::size_t i) const {
    const std::size_t n = dims[static_cast<std::size_t>(d)];
    if (i + 1 == n) return bounds.hi[d];
    return bounds.lo[d] + static_cast<double>(i) * spacing(d);
  }
  Vec3 position(std::size_t i, std::size_t j, std::size_t k) const {
    return {coord(0, i), coord(1, j), coord(2, k)};
  }
  double min_value() const { return *std::min_element(values.begin(), values.end()); }
  double max_value() const { return *std::max_element(values.begin(), values.end()); }

  void validate() const {
    for (std::size_t d = 0; d < 3; ++d)
      if (dims[d] < 2) throw ConfigError("grid dimension " + std::to_string(d) + " below 2");
    if (!bounds.valid()) throw ConfigError("grid bounds are empty");
    if (values.size() != size()) throw ConfigError("grid value count does not match dims");
  }
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<double> values;

  std::size_t size() const { return points.size(); }

  void validate() const {
    if (points.empty()) throw ConfigError("point cloud is empty");
    if (points.size() != values.size())
      throw ConfigError("point cloud positions and values differ in length");
  }
  Box bounding_box() const {
    Box b{points.front(), points.front()};
    for (const auto& p : points)
      for (int d = 0; d < 3; ++d) {
        b.lo[d] = std::min(b.lo[d], p[d]);
        b.hi[d] = std::max(b.hi[d], p[d]);
      }
    return b;
  }
};

// ---------------------------------------------------------------------------
// text helpers

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Strict full-string double parse; throws ConfigError with `what` on failure.
inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + s + "' for " + what);
  }
}

inline std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(part, what));
  return out;
}

}  // namespace detail

inline std::string sidecar_path(const std::string& raw_path) { return raw_path + ".meta"; }

inline void write_raw_volume(const ScalarGrid& g, const std::string& raw_path) {
  g.validate();
  {
    std::ofstream out(raw_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + raw_path + " for writing");
    std::vector<char> buf(g.size() * 4);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(g.values[i]));
      for (int b = 0; b < 4; ++b) buf[4 * i + static_cast<std::size_t>(b)] = static_cast<char>(bits >> (8 * b));
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed: " + raw_path);
  }
  const std::string meta = sidecar_path(raw_path);
  std::ofstream out(meta);
  if (!out) throw IoError("cannot open " + meta + " for writing");
  out << "dims=" << g.dims[0] << ',' << g.dims[1] << ',' << g.dims[2] << '\n';
  out << "bounds=";
  for (int d = 0; d < 3; ++d) out << detail::format_double(g.bounds.lo[d]) << ',';
  for (int d = 0; d < 3; ++d) out << detail::format_double(g.bounds.hi[d]) << (d < 2 ? "," : "\n");
  out << "order=row-major\n";
  if (!out) throw IoError("write failed: " + meta);
}

inline ScalarGrid read_raw_volume(const std::string& raw_path) {
  const std::string meta = sidecar_path(raw_path);
  std::ifstream min(meta);
  if (!min) throw IoError("cannot open sidecar " + meta);
  ScalarGrid g;
  bool have_dims = false, have_bounds = false;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(min, line)) {
    const std::uint64_t line_at = offset;
    offset += line.size() + 1;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw FormatError("sidecar line without '='", line_at);
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    try {
      if (key == "dims") {
        const auto v = detail::parse_double_list(val, "dims");
        if (v.size() != 3) throw ConfigError("dims needs 3 values");
        for (std::size_t d = 0; d < 3; ++d) {
          if (v[d] < 2 || v[d] != static_cast<double>(static_cast<std::size_t>(v[d])))
            throw ConfigError("dims must be integers >= 2");
          g.dims[d] = static_cast<std::size_t>(v[d]);
        }
        have_dims = true;
      } else if (key == "bounds") {
        const auto v = detail::parse_double_list(val, "bounds");
        if (v.size() != 6) throw ConfigError("bounds needs 6 values");
        g.bounds = {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
        have_bounds = true;
      } else if (key == "order") {
        if (val != "row-major") throw ConfigError("unsupported order '" + val + "'");
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw FormatError(meta + ": " + e.what(), line_at);
    }
  }
  if (!have_dims || !have_bounds) throw FormatError(meta + ": dims and bounds are required", offset);
  if (!g.bounds.valid()) throw FormatError(meta + ": empty bounds", offset);

  std::ifstream in(raw_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + raw_path);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t want = g.size() * 4;
  if (buf.size() != want)
    throw FormatError(raw_path + ": expected " + std::to_string(want) + " bytes, found " +
                          std::to_string(buf.size()),
                      std::min(buf.size(), want));
  g.values.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b)
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[4 * i + static_cast<std::size_t>(b)])) << (8 * b);
    g.values[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return g;
}

inline void write_point_cloud(const PointCloud& pc, const std::string& path) {
  pc.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < pc.size(); ++i)
    out << detail::format_double(pc.points[i].x) << ' ' << detail::format_double(pc.points[i].y)
        << ' ' << detail::format_double(pc.points[i].z) << ' '
        << detail::format_double(pc.values[i]) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline PointCloud read_point_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  PointCloud pc;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t line_at = offset;
    offset += line.size() + 1;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    double x, y, z, v;
    std::string extra;
    if (!(ls >> x >> y >> z >> v) || (ls >> extra))
      throw FormatError(path + ": expected 'x y z value'", line_at);
    pc.points.push_back({x, y, z});
    pc.values.push_back(v);
  }
  if (pc.points.empty()) throw FormatError(path + ": no samples", offset);
  return pc;
}

}  // namespace splinevol
