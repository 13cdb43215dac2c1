// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "splinevol/core.hpp"

namespace splinevol {

/// Piecewise-linear map over breakpoints sorted by position. Repeated
/// positions form a jump; the right-hand value wins at the jump itself.
/// Outside the breakpoints the end values are held.
template <class T>
struct PiecewiseLinear {
  std::vector<std::pair<double, T>> points;

  void validate() const {
    if (points.empty()) throw ConfigError("transfer function needs at least one breakpoint");
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i].first < points[i - 1].first) throw ConfigError("transfer function breakpoints not sorted");
  }

  T operator()(double s) const {
    if (s <= points.front().first) {
      // hold the value right of any jump sitting at the first position
      std::size_t i = 0;
      while (i + 1 < points.size() && points[i + 1].first == points.front().first && s == points.front().first) ++i;
      return points[i].second;
    }
    const auto it = std::upper_bound(points.begin(), points.end(), s,
                                     [](double v, const std::pair<double, T>& p) { return v < p.first; });
    if (it == points.end()) return points.back().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double a = (s - lo.first) / (hi.first - lo.first);
    return lo.second * (1.0 - a) + hi.second * a;
  }
};

using OpacityMap = PiecewiseLinear<double>;
using ColorMap = PiecewiseLinear<Vec3>;

/// Opacity and color transfer functions over the normalized value
/// s = (v - range_lo) / (range_hi - range_lo). Outputs are clamped to [0,1].
struct TransferFunctions {
  double range_lo = 0.0;
  double range_hi = 1.0;
  OpacityMap opacity{{{0.0, 0.0}, {1.0, 1.0}}};
  ColorMap color{{{0.0, Vec3{1, 1, 1}}}};

  void validate() const {
    if (!(range_lo < range_hi)) throw ConfigError("transfer function range must satisfy lo < hi");
    opacity.validate();
    color.validate();
  }

  double normalized(double v) const { return (v - range_lo) / (range_hi - range_lo); }

  double alpha(double v) const { return std::clamp(opacity(normalized(v)), 0.0, 1.0); }
  Vec3 rgb(double v) const {
    const Vec3 c = color(normalized(v));
    return {std::clamp(c.x, 0.0, 1.0), std::clamp(c.y, 0.0, 1.0), std::clamp(c.z, 0.0, 1.0)};
  }
};

/// Linear ramp from 0 at the bottom of the range to `max_opacity` at the top.
inline OpacityMap opacity_ramp(double max_opacity = 1.0) { return {{{0.0, 0.0}, {1.0, max_opacity}}}; }

/// Zero below `threshold`, `opacity` from it upwards.
inline OpacityMap opacity_step(double threshold, double opacity = 1.0) {
  return {{{0.0, 0.0}, {threshold, 0.0}, {threshold, opacity}, {1.0, opacity}}};
}

inline ColorMap constant_color(const Vec3& rgb) { return {{{0.0, rgb}}}; }

}  // namespace splinevol
