// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used as test oracles, plus random
// generators for property tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "splinevol/splinevol.hpp"

namespace splinevol::testing {

// Naive Cox-de Boor recursion; half-open spans except that the last
// non-degenerate span is closed at u = 1.
inline double cox_de_boor(const std::vector<double>& U, int i, int p, double u) {
  if (p == 0) {
    const bool last = U[static_cast<std::size_t>(i) + 1] == U.back() && U[static_cast<std::size_t>(i)] < U.back();
    if (U[static_cast<std::size_t>(i)] <= u && (u < U[static_cast<std::size_t>(i) + 1] || (last && u == U.back())))
      return 1.0;
    return 0.0;
  }
  double left = 0.0, right = 0.0;
  const double a = U[static_cast<std::size_t>(i + p)] - U[static_cast<std::size_t>(i)];
  const double b = U[static_cast<std::size_t>(i + p + 1)] - U[static_cast<std::size_t>(i + 1)];
  if (a > 0.0) left = (u - U[static_cast<std::size_t>(i)]) / a * cox_de_boor(U, i, p - 1, u);
  if (b > 0.0) right = (U[static_cast<std::size_t>(i + p + 1)] - u) / b * cox_de_boor(U, i + 1, p - 1, u);
  return left + right;
}

// Linear scan for the span index.
inline int scan_span(const KnotVector& kv, double u) {
  const int n = kv.n_ctrl();
  if (u >= 1.0) {
    int s = n - 1;
    while (kv.knots[static_cast<std::size_t>(s)] == kv.knots[static_cast<std::size_t>(s) + 1]) --s;
    return s;
  }
  for (int i = kv.degree; i < n; ++i)
    if (kv.knots[static_cast<std::size_t>(i)] <= u && u < kv.knots[static_cast<std::size_t>(i) + 1]) return i;
  return -1;
}

// Random valid clamped knot vector: interior knots drawn uniformly, with
// occasional repeats up to multiplicity p.
inline KnotVector random_knots(std::mt19937_64& rng, int p, int n_ctrl) {
  std::uniform_real_distribution<double> U(0.02, 0.98);
  std::bernoulli_distribution repeat(0.2);
  std::vector<double> interior;
  while (static_cast<int>(interior.size()) < n_ctrl - p - 1) {
    const double k = U(rng);
    interior.push_back(k);
    int mult = 1;
    while (mult < p && static_cast<int>(interior.size()) < n_ctrl - p - 1 && repeat(rng)) {
      interior.push_back(k);
      ++mult;
    }
  }
  std::sort(interior.begin(), interior.end());
  KnotVector kv{p, {}};
  kv.knots.assign(static_cast<std::size_t>(p) + 1, 0.0);
  kv.knots.insert(kv.knots.end(), interior.begin(), interior.end());
  kv.knots.insert(kv.knots.end(), static_cast<std::size_t>(p) + 1, 1.0);
  return kv;
}

inline MfaModel random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(1, 4);
  std::normal_distribution<double> val(0.0, 10.0);
  MfaModel m;
  for (std::size_t d = 0; d < 3; ++d) {
    const int p = deg(rng);
    const int n = p + 1 + std::uniform_int_distribution<int>(0, 6)(rng);
    m.knots[d] = random_knots(rng, p, n);
    m.nctrl[d] = n;
  }
  m.ctrl.resize(static_cast<std::size_t>(m.nctrl[0]) * static_cast<std::size_t>(m.nctrl[1]) *
                static_cast<std::size_t>(m.nctrl[2]));
  for (auto& c : m.ctrl) c = val(rng);
  m.value_min = *std::min_element(m.ctrl.begin(), m.ctrl.end());
  m.value_max = *std::max_element(m.ctrl.begin(), m.ctrl.end());
  m.domain = {{-1, -1, -1}, {1, 1, 1}};
  return m;
}

// Brute-force SSIM: explicit 2D Gaussian window at every valid position.
inline double ssim_reference(const ImageRGBA& a, const ImageRGBA& b) {
  const int W = a.width, H = a.height, R = 5;
  double win[11][11];
  double sum = 0.0;
  for (int y = -R; y <= R; ++y)
    for (int x = -R; x <= R; ++x) sum += win[y + R][x + R] = std::exp(-(x * x + y * y) / (2.0 * 1.5 * 1.5));
  for (auto& row : win)
    for (double& w : row) w /= sum;
  auto lum = [](const ImageRGBA& img, int x, int y) {
    const auto* p = img.at(x, y);
    return 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  };
  const double C1 = 6.5025, C2 = 58.5225;
  double total = 0.0;
  long count = 0;
  for (int cy = R; cy < H - R; ++cy)
    for (int cx = R; cx < W - R; ++cx) {
      double ma = 0, mb = 0;
      for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x) {
          ma += win[y + R][x + R] * lum(a, cx + x, cy + y);
          mb += win[y + R][x + R] * lum(b, cx + x, cy + y);
        }
      double va = 0, vb = 0, cov = 0;
      for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x) {
          const double da = lum(a, cx + x, cy + y) - ma, db = lum(b, cx + x, cy + y) - mb;
          va += win[y + R][x + R] * da * da;
          vb += win[y + R][x + R] * db * db;
          cov += win[y + R][x + R] * da * db;
        }
      total += (2 * ma * mb + C1) * (2 * cov + C2) / ((ma * ma + mb * mb + C1) * (va + vb + C2));
      ++count;
    }
  return total / static_cast<double>(count);
}

inline ImageRGBA random_image(std::mt19937_64& rng, int w, int h) {
  ImageRGBA img(w, h);
  std::uniform_int_distribution<int> px(0, 255);
  for (auto& c : img.pixels) c = static_cast<std::uint8_t>(px(rng));
  return img;
}

}  // namespace splinevol::testing
