// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Analytic test fields with closed-form gradients, and samplers that turn
// them into grids and point clouds.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "splinevol/grid.hpp"

namespace splinevol {

/// Radial Gaussian profile
///   F = v_min + (v_max - v_min) * exp(-(l - mu)^2 / (2 sigma^2)),  l = |p - center| / radius
struct GaussianBeam {
  Vec3 center{};
  double v_min = 0.0;
  double v_max = 255.0;
  double mu = 0.0;
  double sigma = 1.0 / 3.0;
  double radius = std::numbers::sqrt3;

  void validate() const {
    if (!(sigma > 0.0) || !(radius > 0.0) || !(v_min <= v_max))
      throw ConfigError("gaussian beam needs sigma > 0, radius > 0, v_min <= v_max");
  }

  double value(const Vec3& p) const {
    const double l = length(p - center) / radius;
    const double d = l - mu;
    return v_min + (v_max - v_min) * std::exp(-d * d / (2.0 * sigma * sigma));
  }

  Vec3 gradient(const Vec3& p) const {
    const Vec3 rel = p - center;
    const double r = length(rel);
    const double l = r / radius;
    const double g = std::exp(-(l - mu) * (l - mu) / (2.0 * sigma * sigma));
    // dF/dp = (v_max - v_min) G * (-(l - mu) / sigma^2) * (1 / radius) * rel / r
    double factor;
    if (mu == 0.0) {
      factor = -1.0 / (sigma * sigma * radius * radius);
    } else {
      if (r == 0.0) return {};
      factor = -(l - mu) / (sigma * sigma * radius * r);
    }
    return rel * ((v_max - v_min) * g * factor);
  }
};

/// Marschner-Lobb test signal, values in [0, 1].
struct MarschnerLobb {
  double f_m = 6.0;
  double alpha = 0.25;

  void validate() const {
    if (!(alpha > -1.0) || !(f_m > 0.0)) throw ConfigError("marschner-lobb needs alpha > -1, f_m > 0");
  }

  double rho(double r) const {
    return std::cos(2.0 * std::numbers::pi * f_m * std::cos(std::numbers::pi * r / 2.0));
  }

  double value(const Vec3& p) const {
    const double r = std::sqrt(p.x * p.x + p.y * p.y);
    return (1.0 - std::sin(std::numbers::pi * p.z / 2.0) + alpha * (1.0 + rho(r))) /
           (2.0 * (1.0 + alpha));
  }

  Vec3 gradient(const Vec3& p) const {
    constexpr double pi = std::numbers::pi;
    const double r = std::sqrt(p.x * p.x + p.y * p.y);
    const double denom = 2.0 * (1.0 + alpha);
    // d rho / dr = pi^2 f_m sin(2 pi f_m cos(pi r / 2)) sin(pi r / 2); the
    // radial factor sin(pi r / 2) / r has limit pi / 2 at the axis
    const double sinc = r > 1e-12 ? std::sin(pi * r / 2.0) / r : pi / 2.0;
    const double radial =
        alpha * pi * pi * f_m * std::sin(2.0 * pi * f_m * std::cos(pi * r / 2.0)) * sinc / denom;
    return {radial * p.x, radial * p.y, -(pi / 2.0) * std::cos(pi * p.z / 2.0) / denom};
  }
};

/// Several Gaussian beams combined by per-point maximum.
struct MultiBeam {
  std::vector<GaussianBeam> beams;

  void validate() const {
    if (beams.empty()) throw ConfigError("multi-beam needs at least one beam");
    for (const auto& b : beams) b.validate();
  }

  double value(const Vec3& p) const {
    double best = beams.front().value(p);
    for (std::size_t i = 1; i < beams.size(); ++i) best = std::max(best, beams[i].value(p));
    return best;
  }

  // gradient of the beam that attains the maximum (first one on ties)
  Vec3 gradient(const Vec3& p) const {
    std::size_t arg = 0;
    double best = beams.front().value(p);
    for (std::size_t i = 1; i < beams.size(); ++i)
      if (const double v = beams[i].value(p); v > best) {
        best = v;
        arg = i;
      }
    return beams[arg].gradient(p);
  }
};

// Free-function forms.
inline double gaussian_beam(double x, double y, double z, const GaussianBeam& spec = {}) {
  return spec.value({x, y, z});
}
inline Vec3 gaussian_beam_grad(double x, double y, double z, const GaussianBeam& spec = {}) {
  return spec.gradient({x, y, z});
}
inline double marschner_lobb(double x, double y, double z, const MarschnerLobb& spec = {}) {
  return spec.value({x, y, z});
}
inline Vec3 marschner_lobb_grad(double x, double y, double z, const MarschnerLobb& spec = {}) {
  return spec.gradient({x, y, z});
}
inline double multi_beam(double x, double y, double z, const MultiBeam& spec) {
  return spec.value({x, y, z});
}

// ---------------------------------------------------------------------------
// Zoom-study layout: a 128^3 lattice over [-1,1]^3 holding four beams whose
// supports span 64, 32, 16 and 8 cells, centred on the x = y diagonal in the
// z = 0 plane with one-cell gaps between supports.

inline constexpr int kZoomLattice = 128;
inline constexpr int kZoomCells[4] = {64, 32, 16, 8};

/// Bounding cube of the support of zoom beam `level` (0..3).
inline Box zoom_beam_box(int level) {
  const double cell = 2.0 / (kZoomLattice - 1);
  double start = 0.0;
  for (int i = 0; i < level; ++i) start += kZoomCells[i] + 1;
  const double half = 0.5 * kZoomCells[level] * cell;
  const double c = -1.0 + (start + 0.5 * kZoomCells[level]) * cell;
  return {{c - half, c - half, -half}, {c + half, c + half, half}};
}

inline MultiBeam zoom_study_beams() {
  MultiBeam mb;
  for (int level = 0; level < 4; ++level) {
    const Box b = zoom_beam_box(level);
    GaussianBeam beam;
    beam.center = (b.lo + b.hi) * 0.5;
    // same shape as the default beam on [-1,1]^3, scaled to the support half-width
    beam.radius = std::numbers::sqrt3 * 0.5 * b.extent().x;
    mb.beams.push_back(beam);
  }
  return mb;
}

/// Constant field; exactly representable by every model and filter.
struct ConstantField {
  double c = 1.0;

  void validate() const {
    if (!std::isfinite(c)) throw ConfigError("constant field value must be finite");
  }
  double value(const Vec3&) const { return c; }
  Vec3 gradient(const Vec3&) const { return {}; }
};

using FieldSpec = std::variant<GaussianBeam, MarschnerLobb, MultiBeam, ConstantField>;

inline FieldSpec field_by_name(const std::string& name) {
  if (name == "gaussian-beam") return GaussianBeam{};
  if (name == "marschner-lobb") return MarschnerLobb{};
  if (name == "multi-beam") return zoom_study_beams();
  if (name == "constant") return ConstantField{};
  throw ConfigError("unknown field '" + name + "' (gaussian-beam | marschner-lobb | multi-beam | constant)");
}

/// Nominal value range of a field, used as the default transfer-function range.
inline std::pair<double, double> nominal_range(const FieldSpec& spec) {
  struct Visitor {
    std::pair<double, double> operator()(const GaussianBeam& b) const { return {b.v_min, b.v_max}; }
    std::pair<double, double> operator()(const MarschnerLobb&) const { return {0.0, 1.0}; }
    std::pair<double, double> operator()(const MultiBeam& m) const {
      std::pair<double, double> r{m.beams.front().v_min, m.beams.front().v_max};
      for (const auto& b : m.beams) r = {std::min(r.first, b.v_min), std::max(r.second, b.v_max)};
      return r;
    }
    std::pair<double, double> operator()(const ConstantField& c) const { return {std::min(0.0, c.c), std::max(1.0, c.c)}; }
  };
  return std::visit(Visitor{}, spec);
}

/// Runtime-selected analytic field with value and gradient.
struct AnalyticField {
  FieldSpec spec;

  double value(const Vec3& p) const {
    return std::visit([&](const auto& f) { return f.value(p); }, spec);
  }
  Vec3 gradient(const Vec3& p) const {
    return std::visit([&](const auto& f) { return f.gradient(p); }, spec);
  }
};

// ---------------------------------------------------------------------------
// samplers

/// Samples `field` on the dims lattice including both boundary planes.
template <class Field>
ScalarGrid sample_grid(const Field& field, Dims dims, Box bounds = {}) {
  ScalarGrid g{dims, bounds, {}};
  for (std::size_t d = 0; d < 3; ++d)
    if (dims[d] < 2) throw ConfigError("sample_grid needs at least 2 samples per axis");
  if (!bounds.valid()) throw ConfigError("sample_grid bounds are empty");
  g.values.resize(g.size());
  for (std::size_t k = 0; k < dims[2]; ++k)
    for (std::size_t j = 0; j < dims[1]; ++j)
      for (std::size_t i = 0; i < dims[0]; ++i) g.values[g.index(i, j, k)] = field.value(g.position(i, j, k));
  return g;
}

namespace detail {
// 53-bit uniform double in [0, 1) from a 64-bit engine, independent of the
// standard library's distribution implementation.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace detail

/// n seeded uniform samples inside `bounds`.
template <class Field>
PointCloud sample_scattered(const Field& field, std::size_t n, Box bounds = {}, std::uint64_t seed = 1) {
  if (n < 1) throw ConfigError("sample_scattered needs n >= 1");
  if (!bounds.valid()) throw ConfigError("sample_scattered bounds are empty");
  std::mt19937_64 rng(seed);
  PointCloud pc;
  pc.points.reserve(n);
  pc.values.reserve(n);
  const Vec3 e = bounds.extent();
  for (std::size_t s = 0; s < n; ++s) {
    Vec3 p;
    for (int d = 0; d < 3; ++d) p[d] = bounds.lo[d] + e[d] * detail::unit_uniform(rng);
    pc.points.push_back(p);
    pc.values.push_back(field.value(p));
  }
  return pc;
}

}  // namespace splinevol
