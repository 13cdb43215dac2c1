// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Image quality metrics over the RGB channels of ImageRGBA (alpha ignored).

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "splinevol/image.hpp"

namespace splinevol {

struct QualityReport {
  double mse = 0.0;
  double psnr = std::numeric_limits<double>::infinity();  // +inf for identical images
  double ssim = 1.0;
};

namespace detail {
inline void check_same_size(const ImageRGBA& a, const ImageRGBA& b) {
  if (a.width != b.width || a.height != b.height)
    throw ConfigError("image size mismatch: " + std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                      std::to_string(b.width) + "x" + std::to_string(b.height));
}
}  // namespace detail

inline double mse(const ImageRGBA& a, const ImageRGBA& b) {
  detail::check_same_size(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i)
    for (std::size_t c = 0; c < 3; ++c) {
      const double d = static_cast<double>(a.pixels[4 * i + c]) - static_cast<double>(b.pixels[4 * i + c]);
      sum += d * d;
    }
  return sum / (3.0 * static_cast<double>(a.pixel_count()));
}

inline double psnr_from_mse(double m) {
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

inline double psnr(const ImageRGBA& a, const ImageRGBA& b) { return psnr_from_mse(mse(a, b)); }

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

/// 0.299 R + 0.587 G + 0.114 B per pixel.
inline std::vector<double> luminance(const ImageRGBA& img) {
  std::vector<double> y(img.pixel_count());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = 0.299 * img.pixels[4 * i] + 0.587 * img.pixels[4 * i + 1] + 0.114 * img.pixels[4 * i + 2];
  return y;
}

/// Normalized 1D Gaussian taps of the SSIM window.
inline std::array<double, kSsimWindow> ssim_kernel() {
  std::array<double, kSsimWindow> k{};
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double x = i - kSsimWindow / 2;
    k[static_cast<std::size_t>(i)] = std::exp(-x * x / (2.0 * kSsimSigma * kSsimSigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

/// Mean SSIM over every full 11x11 window position of the luminance images.
inline double ssim(const ImageRGBA& a, const ImageRGBA& b) {
  detail::check_same_size(a, b);
  if (a.width < kSsimWindow || a.height < kSsimWindow)
    throw ConfigError("SSIM needs images of at least 11x11 pixels");
  constexpr double C1 = (0.01 * 255) * (0.01 * 255);
  constexpr double C2 = (0.03 * 255) * (0.03 * 255);
  const auto k = ssim_kernel();
  const auto ya = luminance(a), yb = luminance(b);
  const int W = a.width, H = a.height;
  const int ow = W - kSsimWindow + 1, oh = H - kSsimWindow + 1;

  // five moment images, filtered horizontally then vertically ("valid" region)
  std::array<std::vector<double>, 5> horiz;
  for (auto& h : horiz) h.assign(static_cast<std::size_t>(ow) * static_cast<std::size_t>(H), 0.0);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < ow; ++x) {
      double s[5] = {0, 0, 0, 0, 0};
      for (int t = 0; t < kSsimWindow; ++t) {
        const auto idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(W) + static_cast<std::size_t>(x + t);
        const double w = k[static_cast<std::size_t>(t)], p = ya[idx], q = yb[idx];
        s[0] += w * p;
        s[1] += w * q;
        s[2] += w * p * p;
        s[3] += w * q * q;
        s[4] += w * p * q;
      }
      for (int m = 0; m < 5; ++m) horiz[static_cast<std::size_t>(m)][static_cast<std::size_t>(y) * static_cast<std::size_t>(ow) + static_cast<std::size_t>(x)] = s[m];
    }

  double total = 0.0;
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s[5] = {0, 0, 0, 0, 0};
      for (int t = 0; t < kSsimWindow; ++t) {
        const auto idx = static_cast<std::size_t>(y + t) * static_cast<std::size_t>(ow) + static_cast<std::size_t>(x);
        const double w = k[static_cast<std::size_t>(t)];
        for (int m = 0; m < 5; ++m) s[m] += w * horiz[static_cast<std::size_t>(m)][idx];
      }
      const double mu_a = s[0], mu_b = s[1];
      const double var_a = s[2] - mu_a * mu_a;
      const double var_b = s[3] - mu_b * mu_b;
      const double cov = s[4] - mu_a * mu_b;
      total += ((2 * mu_a * mu_b + C1) * (2 * cov + C2)) / ((mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2));
    }
  return total / (static_cast<double>(ow) * static_cast<double>(oh));
}

inline QualityReport compare_images(const ImageRGBA& a, const ImageRGBA& b) {
  QualityReport r;
  r.mse = mse(a, b);
  r.psnr = psnr_from_mse(r.mse);
  r.ssim = ssim(a, b);
  return r;
}

/// Heatmap colormap: black, purple, red, yellow, white over e in [0, 1].
inline Vec3 heat_color(double e) {
  static constexpr std::array<Vec3, 5> stops{Vec3{0, 0, 0}, Vec3{0.5, 0, 0.6}, Vec3{1, 0, 0}, Vec3{1, 1, 0},
                                             Vec3{1, 1, 1}};
  e = std::clamp(e, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(e), stops.size() - 2);
  const double a = e - static_cast<double>(i);
  return stops[i] * (1.0 - a) + stops[i + 1] * a;
}

/// Per-pixel RGB Euclidean error, scaled by its maximum 255 * sqrt(3), mapped
/// through heat_color. Output alpha is opaque.
inline ImageRGBA error_heatmap(const ImageRGBA& a, const ImageRGBA& b) {
  detail::check_same_size(a, b);
  ImageRGBA out(a.width, a.height);
  const double max_err = 255.0 * std::sqrt(3.0);
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    double sq = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const double d = static_cast<double>(a.pixels[4 * i + c]) - static_cast<double>(b.pixels[4 * i + c]);
      sq += d * d;
    }
    const Vec3 col = heat_color(std::sqrt(sq) / max_err);
    out.pixels[4 * i] = quantize(col.x);
    out.pixels[4 * i + 1] = quantize(col.y);
    out.pixels[4 * i + 2] = quantize(col.z);
    out.pixels[4 * i + 3] = 255;
  }
  return out;
}

}  // namespace splinevol
