// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Render options shared by render, sweep and bench. Options can come from a
// key = value config file and from long flags of the same name; flags win.

#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "splinevol/splinevol.hpp"

namespace splinevol::cli {

using detail::parse_double;
using detail::parse_double_list;
using detail::split;
using detail::trim;

inline const std::vector<std::pair<std::string, std::string>>& render_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"width", "image width in pixels"},
      {"height", "image height in pixels"},
      {"projection", "perspective | orthographic"},
      {"fov", "vertical field of view in degrees"},
      {"ortho-height", "world-space height of the orthographic view"},
      {"eye", "camera position x,y,z"},
      {"look-at", "camera target x,y,z"},
      {"up", "camera up vector x,y,z"},
      {"step", "sample distance as a fraction of the bounds diagonal"},
      {"shading", "on | off"},
      {"light", "direction towards the light x,y,z"},
      {"ambient", "ambient coefficient (scalar or r,g,b)"},
      {"diffuse", "diffuse coefficient (scalar or r,g,b)"},
      {"specular", "specular coefficient (scalar or r,g,b)"},
      {"shininess", "Phong exponent"},
      {"o-max", "early ray termination threshold in (0,1]"},
      {"background", "background r,g,b[,a] in [0,1]"},
      {"opacity", "ramp[:max] | step:threshold[:opacity] | s:a,s:a,..."},
      {"color", "r,g,b | s:r:g:b,s:r:g:b,..."},
      {"tf-range", "value range lo,hi mapped onto the transfer functions"},
      {"opacity-correction", "on | off"},
      {"workers", "render threads"},
      {"bounds", "expected source bounds x0,y0,z0,x1,y1,z1 (or lo,hi)"},
  };
  return keys;
}

using OptionMap = std::map<std::string, std::string>;

/// Reads a key = value file; '#' starts a comment. Unknown keys are rejected.
inline OptionMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  OptionMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    bool known = false;
    for (const auto& k : render_keys()) known = known || k.first == key;
    if (!known) throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

/// Registers one string flag per render key on `app`.
struct RenderFlags {
  OptionMap values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_path, "render config file (key = value)");
    for (const auto& [key, help] : render_keys()) options[key] = app.add_option("--" + key, values[key], help);
  }

  /// Defaults, then the config file, then explicit flags.
  OptionMap merged(const OptionMap& defaults = {}) const {
    OptionMap out = defaults;
    if (!config_path.empty())
      for (const auto& [k, v] : read_config_file(config_path)) out[k] = v;
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) out[key] = values.at(key);
    return out;
  }
};

inline bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean '" + s + "' for " + what);
}

inline int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size() || v < INT32_MIN || v > INT32_MAX) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("bad integer '" + s + "' for " + what);
  }
}

inline std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  if (trim(s).empty()) throw ConfigError("empty list for " + what);
  for (const auto& part : split(s, ',')) out.push_back(parse_int(part, what));
  return out;
}

/// One value broadcast to all three dimensions, or exactly three values.
inline std::array<int, 3> parse_int3(const std::string& s, const std::string& what) {
  const auto v = parse_int_list(s, what);
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw ConfigError(what + " needs 1 or 3 comma-separated values");
}

inline Vec3 parse_vec3(const std::string& s, const std::string& what) {
  const auto v = parse_double_list(s, what);
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw ConfigError(what + " needs 1 or 3 comma-separated values");
}

/// x0,y0,z0,x1,y1,z1 or lo,hi (same interval on every axis).
inline Box parse_box(const std::string& s, const std::string& what) {
  const auto v = parse_double_list(s, what);
  Box b;
  if (v.size() == 2) {
    b = {{v[0], v[0], v[0]}, {v[1], v[1], v[1]}};
  } else if (v.size() == 6) {
    b = {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  } else {
    throw ConfigError(what + " needs 2 or 6 comma-separated values");
  }
  if (!b.valid()) throw ConfigError(what + " is empty (lo must be below hi)");
  return b;
}

inline OpacityMap parse_opacity(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts[0] == "ramp") {
    if (parts.size() > 2) throw ConfigError("opacity ramp takes at most one parameter");
    return opacity_ramp(parts.size() == 2 ? parse_double(parts[1], "opacity ramp max") : 1.0);
  }
  if (parts[0] == "step") {
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("opacity step needs step:threshold[:opacity]");
    return opacity_step(parse_double(parts[1], "opacity step threshold"),
                        parts.size() == 3 ? parse_double(parts[2], "opacity step value") : 1.0);
  }
  OpacityMap m;
  for (const auto& pt : split(s, ',')) {
    const auto sa = split(pt, ':');
    if (sa.size() != 2) throw ConfigError("opacity breakpoint '" + pt + "' must be s:a");
    m.points.emplace_back(parse_double(sa[0], "opacity position"), parse_double(sa[1], "opacity value"));
  }
  m.validate();
  return m;
}

inline ColorMap parse_color(const std::string& s) {
  if (s.find(':') == std::string::npos) return constant_color(parse_vec3(s, "color"));
  ColorMap m;
  for (const auto& pt : split(s, ',')) {
    const auto c = split(pt, ':');
    if (c.size() != 4) throw ConfigError("color breakpoint '" + pt + "' must be s:r:g:b");
    m.points.emplace_back(parse_double(c[0], "color position"),
                          Vec3{parse_double(c[1], "color"), parse_double(c[2], "color"), parse_double(c[3], "color")});
  }
  m.validate();
  return m;
}

struct RenderSettings {
  RenderConfig config;
  std::optional<Box> bounds;  // expected source bounds, when given
  bool tf_range_given = false;
};

/// Builds a render configuration from merged options. The transfer-function
/// range defaults to `default_range` unless tf-range is present.
inline RenderSettings build_render_settings(const OptionMap& opts, std::pair<double, double> default_range) {
  RenderSettings out;
  RenderConfig& cfg = out.config;
  cfg.tf.opacity = opacity_ramp(0.02);
  cfg.camera.eye = {2.4, 1.8, 3.0};
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = opts.find(key);
    return it == opts.end() ? nullptr : &it->second;
  };
  if (auto v = get("width")) cfg.camera.width = parse_int(*v, "width");
  if (auto v = get("height")) cfg.camera.height = parse_int(*v, "height");
  if (auto v = get("projection")) {
    if (*v == "perspective") cfg.camera.projection = Projection::perspective;
    else if (*v == "orthographic") cfg.camera.projection = Projection::orthographic;
    else throw ConfigError("projection must be perspective or orthographic");
  }
  if (auto v = get("fov")) cfg.camera.fov_y = parse_double(*v, "fov");
  if (auto v = get("ortho-height")) cfg.camera.ortho_height = parse_double(*v, "ortho-height");
  if (auto v = get("eye")) cfg.camera.eye = parse_vec3(*v, "eye");
  if (auto v = get("look-at")) cfg.camera.look_at = parse_vec3(*v, "look-at");
  if (auto v = get("up")) cfg.camera.up = parse_vec3(*v, "up");
  if (auto v = get("step")) cfg.step_fraction = parse_double(*v, "step");
  if (auto v = get("shading")) cfg.shading = parse_bool(*v, "shading");
  if (auto v = get("light")) cfg.lighting.light_dir = parse_vec3(*v, "light");
  if (auto v = get("ambient")) cfg.lighting.ambient = parse_vec3(*v, "ambient");
  if (auto v = get("diffuse")) cfg.lighting.diffuse = parse_vec3(*v, "diffuse");
  if (auto v = get("specular")) cfg.lighting.specular = parse_vec3(*v, "specular");
  if (auto v = get("shininess")) cfg.lighting.shininess = parse_double(*v, "shininess");
  if (auto v = get("o-max")) cfg.o_max = parse_double(*v, "o-max");
  if (auto v = get("background")) {
    const auto c = parse_double_list(*v, "background");
    if (c.size() != 3 && c.size() != 4) throw ConfigError("background needs r,g,b or r,g,b,a");
    cfg.background = {c[0], c[1], c[2], c.size() == 4 ? c[3] : 1.0};
  }
  if (auto v = get("opacity")) cfg.tf.opacity = parse_opacity(*v);
  if (auto v = get("color")) cfg.tf.color = parse_color(*v);
  if (auto v = get("tf-range")) {
    const auto r = parse_double_list(*v, "tf-range");
    if (r.size() != 2) throw ConfigError("tf-range needs lo,hi");
    cfg.tf.range_lo = r[0];
    cfg.tf.range_hi = r[1];
    out.tf_range_given = true;
  } else {
    cfg.tf.range_lo = default_range.first;
    cfg.tf.range_hi = default_range.second > default_range.first ? default_range.second : default_range.first + 1.0;
  }
  if (auto v = get("opacity-correction")) cfg.opacity_correction = parse_bool(*v, "opacity-correction");
  if (auto v = get("workers")) cfg.workers = parse_int(*v, "workers");
  if (auto v = get("bounds")) out.bounds = parse_box(*v, "bounds");
  cfg.validate();
  return out;
}

}  // namespace splinevol::cli
