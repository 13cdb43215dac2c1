// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Local reconstruction filters over a ScalarGrid: trilinear, tricubic
// (Lekien-Marsden) and Catmull-Rom. Queries take physical positions inside
// the grid bounds; high-order stencils replicate edge samples.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "splinevol/grid.hpp"

namespace splinevol {

enum class FilterKind { trilinear, tricubic, catmull_rom };

inline FilterKind filter_by_name(const std::string& name) {
  if (name == "trilinear") return FilterKind::trilinear;
  if (name == "tricubic") return FilterKind::tricubic;
  if (name == "catmull-rom") return FilterKind::catmull_rom;
  throw ConfigError("unknown filter '" + name + "' (trilinear | tricubic | catmull-rom)");
}

inline const char* filter_name(FilterKind k) {
  switch (k) {
    case FilterKind::trilinear: return "trilinear";
    case FilterKind::tricubic: return "tricubic";
    case FilterKind::catmull_rom: return "catmull-rom";
  }
  return "?";
}

namespace detail {

struct CellLocation {
  int cell[3];     // lower node index, 0 .. dims-2
  double t[3];     // local coordinate in [0, 1]
  double inv_h[3]; // 1 / spacing
};

inline CellLocation locate(const ScalarGrid& g, const Vec3& p) {
  if (!g.bounds.contains(p))
    throw DomainError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                      std::to_string(p.z) + ") outside grid bounds");
  CellLocation loc;
  for (int d = 0; d < 3; ++d) {
    const int n = static_cast<int>(g.dims[static_cast<std::size_t>(d)]);
    loc.inv_h[d] = 1.0 / g.spacing(d);
    const double x = (p[d] - g.bounds.lo[d]) * loc.inv_h[d];
    const int i = std::min(static_cast<int>(x), n - 2);
    loc.cell[d] = i;
    loc.t[d] = std::min(x - i, 1.0);
  }
  return loc;
}

inline int clamp_index(int i, std::size_t n) { return std::clamp(i, 0, static_cast<int>(n) - 1); }

inline double fetch(const ScalarGrid& g, int i, int j, int k) {
  return g.values[g.index(static_cast<std::size_t>(clamp_index(i, g.dims[0])),
                          static_cast<std::size_t>(clamp_index(j, g.dims[1])),
                          static_cast<std::size_t>(clamp_index(k, g.dims[2])))];
}

// Central-difference node gradient in physical units, one-sided on edges.
inline Vec3 node_gradient(const ScalarGrid& g, int i, int j, int k, const double inv_h[3]) {
  Vec3 out;
  const int idx[3] = {i, j, k};
  for (int d = 0; d < 3; ++d) {
    const int n = static_cast<int>(g.dims[static_cast<std::size_t>(d)]);
    int lo[3] = {i, j, k}, hi[3] = {i, j, k};
    double scale = 0.5;
    if (idx[d] == 0) {
      hi[d] = 1;
      scale = 1.0;
    } else if (idx[d] == n - 1) {
      lo[d] = n - 2;
      scale = 1.0;
    } else {
      lo[d] = idx[d] - 1;
      hi[d] = idx[d] + 1;
    }
    out[d] = (fetch(g, hi[0], hi[1], hi[2]) - fetch(g, lo[0], lo[1], lo[2])) * scale * inv_h[d];
  }
  return out;
}

// Catmull-Rom 4-tap weights (taps at i-1, i, i+1, i+2) and their t-derivatives.
inline void catmull_rom_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

inline void catmull_rom_dweights(double t, double w[4]) {
  const double t2 = t * t;
  w[0] = 0.5 * (-3.0 * t2 + 4.0 * t - 1.0);
  w[1] = 0.5 * (9.0 * t2 - 10.0 * t);
  w[2] = 0.5 * (-9.0 * t2 + 8.0 * t + 1.0);
  w[3] = 0.5 * (3.0 * t2 - 2.0 * t);
}

// ---------------------------------------------------------------------------
// tricubic
//
// Lekien-Marsden: the 64 coefficients a_abc of p(t,u,v) = sum a_abc t^a u^b v^c
// follow from f, f_x, f_y, f_z, f_xy, f_xz, f_yz, f_xyz at the 8 cell corners
// through the fixed 64x64 matrix, which is the threefold Kronecker power of the
// 1D Hermite-to-monomial matrix below. It is applied one axis at a time.
inline constexpr double kHermite[4][4] = {
    // rows: monomial power; columns: f(0), f(1), f'(0), f'(1)
    {1, 0, 0, 0},
    {0, 0, 1, 0},
    {-3, 3, -2, -1},
    {2, -2, 1, 1},
};

// Node derivative (index units) as weights over the 6-sample window starting at
// node `cell - 2`. Fourth-order central differences where the 5-point stencil
// fits, second-order central next to the edges, second-order one-sided on them.
inline void derivative_weights(int node, int cell, int n, double w[6]) {
  std::fill(w, w + 6, 0.0);
  auto at = [&](int global) -> double& { return w[global - (cell - 2)]; };
  if (node >= 2 && node + 2 <= n - 1) {
    at(node - 2) += 1.0 / 12.0;
    at(node - 1) += -8.0 / 12.0;
    at(node + 1) += 8.0 / 12.0;
    at(node + 2) += -1.0 / 12.0;
  } else if (node >= 1 && node + 1 <= n - 1) {
    at(node - 1) += -0.5;
    at(node + 1) += 0.5;
  } else if (node == 0) {
    if (n >= 3) {
      at(0) += -1.5;
      at(1) += 2.0;
      at(2) += -0.5;
    } else {
      at(0) += -1.0;
      at(1) += 1.0;
    }
  } else {  // node == n - 1
    if (n >= 3) {
      at(n - 1) += 1.5;
      at(n - 2) += -2.0;
      at(n - 3) += 0.5;
    } else {
      at(n - 1) += 1.0;
      at(n - 2) += -1.0;
    }
  }
}

// Coefficients a[c][b][a] (c: z power, b: y power, a: x power) for `cell`.
inline void tricubic_coefficients(const ScalarGrid& g, const int cell[3], double a[4][4][4]) {
  // Hermite data operators per axis over the 6-wide window
  double op[3][4][6];
  for (int d = 0; d < 3; ++d) {
    const int n = static_cast<int>(g.dims[static_cast<std::size_t>(d)]);
    std::fill(&op[d][0][0], &op[d][0][0] + 24, 0.0);
    op[d][0][2] = 1.0;  // f at node cell
    op[d][1][3] = 1.0;  // f at node cell+1
    derivative_weights(cell[d], cell[d], n, op[d][2]);
    derivative_weights(cell[d] + 1, cell[d], n, op[d][3]);
  }
  double block[6][6][6];
  for (int z = 0; z < 6; ++z)
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x)
        block[z][y][x] = fetch(g, cell[0] - 2 + x, cell[1] - 2 + y, cell[2] - 2 + z);

  // Hermite tensor H[hz][hy][hx], separably
  double sx[6][6][4];
  for (int z = 0; z < 6; ++z)
    for (int y = 0; y < 6; ++y)
      for (int h = 0; h < 4; ++h) {
        double s = 0.0;
        for (int x = 0; x < 6; ++x) s += op[0][h][x] * block[z][y][x];
        sx[z][y][h] = s;
      }
  double sy[6][4][4];
  for (int z = 0; z < 6; ++z)
    for (int hy = 0; hy < 4; ++hy)
      for (int hx = 0; hx < 4; ++hx) {
        double s = 0.0;
        for (int y = 0; y < 6; ++y) s += op[1][hy][y] * sx[z][y][hx];
        sy[z][hy][hx] = s;
      }
  double H[4][4][4];
  for (int hz = 0; hz < 4; ++hz)
    for (int hy = 0; hy < 4; ++hy)
      for (int hx = 0; hx < 4; ++hx) {
        double s = 0.0;
        for (int z = 0; z < 6; ++z) s += op[2][hz][z] * sy[z][hy][hx];
        H[hz][hy][hx] = s;
      }

  // monomial coefficients: apply kHermite along x, y, z
  double t1[4][4][4], t2[4][4][4];
  for (int hz = 0; hz < 4; ++hz)
    for (int hy = 0; hy < 4; ++hy)
      for (int ax = 0; ax < 4; ++ax) {
        double s = 0.0;
        for (int hx = 0; hx < 4; ++hx) s += kHermite[ax][hx] * H[hz][hy][hx];
        t1[hz][hy][ax] = s;
      }
  for (int hz = 0; hz < 4; ++hz)
    for (int ay = 0; ay < 4; ++ay)
      for (int ax = 0; ax < 4; ++ax) {
        double s = 0.0;
        for (int hy = 0; hy < 4; ++hy) s += kHermite[ay][hy] * t1[hz][hy][ax];
        t2[hz][ay][ax] = s;
      }
  for (int az = 0; az < 4; ++az)
    for (int ay = 0; ay < 4; ++ay)
      for (int ax = 0; ax < 4; ++ax) {
        double s = 0.0;
        for (int hz = 0; hz < 4; ++hz) s += kHermite[az][hz] * t2[hz][ay][ax];
        a[az][ay][ax] = s;
      }
}

// Polynomial value and local (t-space) partials from the coefficient tensor.
inline double tricubic_eval(const double a[4][4][4], const double t[3], Vec3* dlocal) {
  double px[4] = {1, t[0], t[0] * t[0], t[0] * t[0] * t[0]};
  double py[4] = {1, t[1], t[1] * t[1], t[1] * t[1] * t[1]};
  double pz[4] = {1, t[2], t[2] * t[2], t[2] * t[2] * t[2]};
  double dx[4] = {0, 1, 2 * t[0], 3 * t[0] * t[0]};
  double dy[4] = {0, 1, 2 * t[1], 3 * t[1] * t[1]};
  double dz[4] = {0, 1, 2 * t[2], 3 * t[2] * t[2]};
  double v = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
  for (int c = 0; c < 4; ++c)
    for (int b = 0; b < 4; ++b)
      for (int a0 = 0; a0 < 4; ++a0) {
        const double coef = a[c][b][a0];
        v += coef * px[a0] * py[b] * pz[c];
        if (dlocal) {
          gx += coef * dx[a0] * py[b] * pz[c];
          gy += coef * px[a0] * dy[b] * pz[c];
          gz += coef * px[a0] * py[b] * dz[c];
        }
      }
  if (dlocal) *dlocal = {gx, gy, gz};
  return v;
}

// Value within an explicit cell at local coordinates t (each in [0, 1]).
inline double tricubic_in_cell(const ScalarGrid& g, const int cell[3], const double t[3]) {
  double a[4][4][4];
  tricubic_coefficients(g, cell, a);
  return tricubic_eval(a, t, nullptr);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline double trilinear_value(const ScalarGrid& g, const Vec3& p) {
  const auto loc = detail::locate(g, p);
  const auto i = static_cast<std::size_t>(loc.cell[0]);
  const auto j = static_cast<std::size_t>(loc.cell[1]);
  const auto k = static_cast<std::size_t>(loc.cell[2]);
  const double tx = loc.t[0], ty = loc.t[1], tz = loc.t[2];
  const std::size_t sx = 1, sy = g.dims[0], sz = g.dims[0] * g.dims[1];
  const double* f = g.values.data() + g.index(i, j, k);
  const double c00 = f[0] * (1 - tx) + f[sx] * tx;
  const double c10 = f[sy] * (1 - tx) + f[sy + sx] * tx;
  const double c01 = f[sz] * (1 - tx) + f[sz + sx] * tx;
  const double c11 = f[sz + sy] * (1 - tx) + f[sz + sy + sx] * tx;
  const double c0 = c00 * (1 - ty) + c10 * ty;
  const double c1 = c01 * (1 - ty) + c11 * ty;
  return c0 * (1 - tz) + c1 * tz;
}

/// Node gradients by central differences, trilinearly interpolated.
inline Vec3 trilinear_gradient(const ScalarGrid& g, const Vec3& p) {
  const auto loc = detail::locate(g, p);
  Vec3 out;
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        const double w = (a ? loc.t[0] : 1 - loc.t[0]) * (b ? loc.t[1] : 1 - loc.t[1]) *
                         (c ? loc.t[2] : 1 - loc.t[2]);
        out += w * detail::node_gradient(g, loc.cell[0] + a, loc.cell[1] + b, loc.cell[2] + c, loc.inv_h);
      }
  return out;
}

inline double catmull_rom_value(const ScalarGrid& g, const Vec3& p) {
  const auto loc = detail::locate(g, p);
  double wx[4], wy[4], wz[4];
  detail::catmull_rom_weights(loc.t[0], wx);
  detail::catmull_rom_weights(loc.t[1], wy);
  detail::catmull_rom_weights(loc.t[2], wz);
  double sum = 0.0;
  for (int c = 0; c < 4; ++c) {
    double plane = 0.0;
    for (int b = 0; b < 4; ++b) {
      double line = 0.0;
      for (int a = 0; a < 4; ++a)
        line += wx[a] * detail::fetch(g, loc.cell[0] - 1 + a, loc.cell[1] - 1 + b, loc.cell[2] - 1 + c);
      plane += wy[b] * line;
    }
    sum += wz[c] * plane;
  }
  return sum;
}

/// Value and physical gradient from one pass over the 64 taps.
inline double catmull_rom_value_gradient(const ScalarGrid& g, const Vec3& p, Vec3& grad) {
  const auto loc = detail::locate(g, p);
  double wx[4], wy[4], wz[4], dx[4], dy[4], dz[4];
  detail::catmull_rom_weights(loc.t[0], wx);
  detail::catmull_rom_weights(loc.t[1], wy);
  detail::catmull_rom_weights(loc.t[2], wz);
  detail::catmull_rom_dweights(loc.t[0], dx);
  detail::catmull_rom_dweights(loc.t[1], dy);
  detail::catmull_rom_dweights(loc.t[2], dz);
  double v = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
  for (int c = 0; c < 4; ++c) {
    double pl_x = 0.0, pl_y = 0.0, pl_v = 0.0;
    for (int b = 0; b < 4; ++b) {
      double line = 0.0, line_dx = 0.0;
      for (int a = 0; a < 4; ++a) {
        const double f = detail::fetch(g, loc.cell[0] - 1 + a, loc.cell[1] - 1 + b, loc.cell[2] - 1 + c);
        line += wx[a] * f;
        line_dx += dx[a] * f;
      }
      pl_x += wy[b] * line_dx;
      pl_y += dy[b] * line;
      pl_v += wy[b] * line;
    }
    gx += wz[c] * pl_x;
    gy += wz[c] * pl_y;
    gz += dz[c] * pl_v;
    v += wz[c] * pl_v;
  }
  grad = {gx * loc.inv_h[0], gy * loc.inv_h[1], gz * loc.inv_h[2]};
  return v;
}

inline Vec3 catmull_rom_gradient(const ScalarGrid& g, const Vec3& p) {
  Vec3 grad;
  catmull_rom_value_gradient(g, p, grad);
  return grad;
}

inline double tricubic_value(const ScalarGrid& g, const Vec3& p) {
  const auto loc = detail::locate(g, p);
  return detail::tricubic_in_cell(g, loc.cell, loc.t);
}

inline double tricubic_value_gradient(const ScalarGrid& g, const Vec3& p, Vec3& grad) {
  const auto loc = detail::locate(g, p);
  double a[4][4][4];
  detail::tricubic_coefficients(g, loc.cell, a);
  Vec3 dl;
  const double v = detail::tricubic_eval(a, loc.t, &dl);
  grad = {dl.x * loc.inv_h[0], dl.y * loc.inv_h[1], dl.z * loc.inv_h[2]};
  return v;
}

inline Vec3 tricubic_gradient(const ScalarGrid& g, const Vec3& p) {
  Vec3 grad;
  tricubic_value_gradient(g, p, grad);
  return grad;
}

inline double filter_value(FilterKind kind, const ScalarGrid& g, const Vec3& p) {
  switch (kind) {
    case FilterKind::trilinear: return trilinear_value(g, p);
    case FilterKind::tricubic: return tricubic_value(g, p);
    case FilterKind::catmull_rom: return catmull_rom_value(g, p);
  }
  throw InternalError("unknown filter kind");
}

inline Vec3 filter_gradient(FilterKind kind, const ScalarGrid& g, const Vec3& p) {
  switch (kind) {
    case FilterKind::trilinear: return trilinear_gradient(g, p);
    case FilterKind::tricubic: return tricubic_gradient(g, p);
    case FilterKind::catmull_rom: return catmull_rom_gradient(g, p);
  }
  throw InternalError("unknown filter kind");
}

}  // namespace splinevol
