// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Ray-casting direct volume renderer.
//
// For every pixel a ray is clipped against the source bounds and sampled at a
// fixed step. Each sample is classified through the transfer functions,
// optionally shaded from the source gradient, and composited front to back
// until the accumulated opacity exceeds o_max. Image rows are split into
// contiguous blocks, one per worker.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "splinevol/core.hpp"
#include "splinevol/image.hpp"
#include "splinevol/transfer.hpp"

namespace splinevol {

/// Anything that can be sampled by the renderer: physical-space value and
/// gradient over its bounds. Implementations must be safe for concurrent reads.
template <class S>
concept SampleSource = requires(const S& s, const Vec3& p) {
  { s.bounds() } -> std::convertible_to<Box>;
  { s.value(p) } -> std::convertible_to<double>;
  { s.gradient(p) } -> std::convertible_to<Vec3>;
};

/// A source that can also return value and gradient from one query. The
/// renderer uses it when shading is on.
template <class S>
concept FusedSampleSource = SampleSource<S> && requires(const S& s, const Vec3& p, Vec3& g) {
  { s.value_gradient(p, g) } -> std::convertible_to<double>;
};

struct RenderError : Error {
  using Error::Error;
};

enum class Projection { orthographic, perspective };

struct Camera {
  Vec3 eye{0.0, 0.0, 4.0};
  Vec3 look_at{};
  Vec3 up{0.0, 1.0, 0.0};
  Projection projection = Projection::perspective;
  double fov_y = 45.0;       // degrees, perspective only
  double ortho_height = 2.0; // world units spanned vertically, orthographic only
  int width = 256;
  int height = 256;

  void validate() const {
    if (width < 1 || height < 1) throw ConfigError("image width and height must be >= 1");
    const Vec3 fwd = look_at - eye;
    if (length(fwd) == 0.0) throw ConfigError("camera eye and look-at coincide");
    if (length(cross(normalize(fwd), normalize(up))) < 1e-9)
      throw ConfigError("camera up vector parallel to the view direction");
    if (projection == Projection::perspective && !(fov_y > 0.0 && fov_y < 180.0))
      throw ConfigError("fov must lie in (0, 180) degrees");
    if (projection == Projection::orthographic && !(ortho_height > 0.0))
      throw ConfigError("orthographic height must be positive");
  }
};

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
};

/// Ray through the centre of pixel (px, py); py = 0 is the top row.
inline Ray generate_ray(const Camera& cam, int px, int py) {
  const Vec3 fwd = normalize(cam.look_at - cam.eye);
  const Vec3 right = normalize(cross(fwd, cam.up));
  const Vec3 up = cross(right, fwd);
  const double aspect = static_cast<double>(cam.width) / static_cast<double>(cam.height);
  const double sx = (px + 0.5) / cam.width * 2.0 - 1.0;
  const double sy = 1.0 - (py + 0.5) / cam.height * 2.0;
  if (cam.projection == Projection::perspective) {
    const double tan_half = std::tan(cam.fov_y * std::numbers::pi / 360.0);
    return {cam.eye, normalize(fwd + right * (sx * tan_half * aspect) + up * (sy * tan_half))};
  }
  const double half = 0.5 * cam.ortho_height;
  return {cam.eye + right * (sx * half * aspect) + up * (sy * half), fwd};
}

struct ClipResult {
  double t_in;
  double t_out;
};

/// Slab clip of a ray against a box; nullopt on a miss (t_out < max(t_in, 0)).
inline std::optional<ClipResult> ray_box_clip(const Ray& ray, const Box& box) {
  double t_in = -std::numeric_limits<double>::infinity();
  double t_out = std::numeric_limits<double>::infinity();
  for (int d = 0; d < 3; ++d) {
    const double o = ray.origin[d], dir = ray.dir[d];
    if (dir == 0.0) {
      if (o < box.lo[d] || o > box.hi[d]) return std::nullopt;
      continue;
    }
    double t0 = (box.lo[d] - o) / dir;
    double t1 = (box.hi[d] - o) / dir;
    if (t0 > t1) std::swap(t0, t1);
    t_in = std::max(t_in, t0);
    t_out = std::min(t_out, t1);
  }
  if (t_out < std::max(t_in, 0.0)) return std::nullopt;
  return ClipResult{t_in, t_out};
}

struct Rgba {
  Vec3 rgb{};
  double a = 0.0;
};

/// Front-to-back "over": C += (1 - A) a C_s, A += (1 - A) a.
inline Rgba composite_step(const Rgba& acc, const Vec3& sample_rgb, double sample_a) {
  const double w = (1.0 - acc.a) * sample_a;
  return {acc.rgb + sample_rgb * w, acc.a + w};
}

struct Lighting {
  Vec3 light_dir = normalize(Vec3{1.0, 1.0, 1.0});  // towards the light
  Vec3 ambient{0.2, 0.2, 0.2};
  Vec3 diffuse{0.7, 0.7, 0.7};
  Vec3 specular{0.3, 0.3, 0.3};
  double shininess = 20.0;
};

/// Phong shading with normal = -gradient. A zero gradient yields the
/// ambient term only. `view_dir` points from the sample towards the eye.
inline Vec3 shade(const Vec3& color, const Vec3& gradient, const Vec3& view_dir, const Lighting& light) {
  const double glen = length(gradient);
  Vec3 out;
  if (glen == 0.0 || !std::isfinite(glen)) {
    out = hadamard(light.ambient, color);
  } else {
    const Vec3 n = gradient * (-1.0 / glen);
    const Vec3 l = normalize(light.light_dir);
    const double ndotl = dot(n, l);
    const Vec3 r = n * (2.0 * ndotl) - l;
    const double spec = std::pow(std::max(0.0, dot(r, normalize(view_dir))), light.shininess);
    out = hadamard(light.ambient, color) + hadamard(light.diffuse, color) * std::max(0.0, ndotl) +
          light.specular * spec;
  }
  return {std::clamp(out.x, 0.0, 1.0), std::clamp(out.y, 0.0, 1.0), std::clamp(out.z, 0.0, 1.0)};
}

struct RenderConfig {
  Camera camera;
  TransferFunctions tf;
  double step_fraction = 1.0 / 1000.0;  // sample distance as a fraction of the bounds diagonal
  bool shading = false;
  Lighting lighting;
  double o_max = 0.99;  // early termination once accumulated opacity exceeds this
  std::array<double, 4> background{0.0, 0.0, 0.0, 1.0};
  bool opacity_correction = false;  // rescale opacity relative to the default step
  int workers = 1;

  void validate() const {
    camera.validate();
    tf.validate();
    if (!(step_fraction > 0.0)) throw ConfigError("step must be positive");
    if (!(o_max > 0.0 && o_max <= 1.0)) throw ConfigError("o_max must lie in (0, 1]");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (double c : background)
      if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("background channels must lie in [0, 1]");
  }
};

/// Marches one ray and returns the composited (premultiplied) color and
/// opacity, before the background is applied. `observer(t, acc)` runs after
/// every compositing step.
template <SampleSource Source, class Observer>
Rgba march_ray(const Source& src, const RenderConfig& cfg, const Ray& ray, const Box& box, Observer&& observer) {
  const auto clip = ray_box_clip(ray, box);
  if (!clip) return {};
  const double step = cfg.step_fraction * box.diagonal();
  const double ref_step = box.diagonal() / 1000.0;
  const double t0 = std::max(clip->t_in, 0.0);
  const Vec3 view = -ray.dir;
  Rgba acc;
  for (long k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    if (t > clip->t_out) break;
    const Vec3 p = box.clamp(ray.origin + ray.dir * t);
    Vec3 grad;
    double v;
    if constexpr (FusedSampleSource<Source>) v = cfg.shading ? src.value_gradient(p, grad) : src.value(p);
    else v = src.value(p);
    double a = cfg.tf.alpha(v);
    if (cfg.opacity_correction && a > 0.0 && a < 1.0) a = 1.0 - std::pow(1.0 - a, step / ref_step);
    Vec3 rgb = cfg.tf.rgb(v);
    if (cfg.shading && a > 0.0) {
      if constexpr (!FusedSampleSource<Source>) grad = src.gradient(p);
      rgb = shade(rgb, grad, view, cfg.lighting);
    }
    acc = composite_step(acc, rgb, a);
    observer(t, acc);
    if (acc.a > cfg.o_max) break;
  }
  return acc;
}

template <SampleSource Source>
Rgba march_ray(const Source& src, const RenderConfig& cfg, const Ray& ray, const Box& box) {
  return march_ray(src, cfg, ray, box, [](double, const Rgba&) {});
}

/// Renders `src` into an image of the configured size. Deterministic and
/// independent of the worker count.
template <SampleSource Source>
ImageRGBA render(const Source& src, const RenderConfig& cfg) {
  cfg.validate();
  const Box box = src.bounds();
  if (!box.valid()) throw ConfigError("source bounds are empty");
  const Camera& cam = cfg.camera;
  ImageRGBA img(cam.width, cam.height);
  const auto& bg = cfg.background;

  auto render_rows = [&](int row_begin, int row_end) {
    for (int y = row_begin; y < row_end; ++y)
      for (int x = 0; x < cam.width; ++x) {
        const Ray ray = generate_ray(cam, x, y);
        double last_t = 0.0;
        Rgba acc;
        try {
          acc = march_ray(src, cfg, ray, box, [&](double t, const Rgba&) { last_t = t; });
        } catch (const std::exception& e) {
          throw RenderError(std::string("sample query failed at pixel (") + std::to_string(x) + ", " +
                            std::to_string(y) + "), t = " + std::to_string(last_t) + ": " + e.what());
        }
        const double rest = (1.0 - acc.a) * bg[3];
        std::uint8_t* px = img.at(x, y);
        px[0] = quantize(acc.rgb.x + rest * bg[0]);
        px[1] = quantize(acc.rgb.y + rest * bg[1]);
        px[2] = quantize(acc.rgb.z + rest * bg[2]);
        px[3] = quantize(acc.a + rest);
      }
  };

  const int workers = std::min(cfg.workers, cam.height);
  if (workers <= 1) {
    render_rows(0, cam.height);
    return img;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const int begin = cam.height * w / workers;
    const int end = cam.height * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        render_rows(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return img;
}

}  // namespace splinevol
