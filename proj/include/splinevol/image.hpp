// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "splinevol/core.hpp"

namespace splinevol {

/// Row-major 8-bit RGBA image; row 0 is the top row.
struct ImageRGBA {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 4 bytes per pixel

  ImageRGBA() = default;
  ImageRGBA(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 4, 0) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  std::uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 4;
  }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 4;
  }
  void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t a = 255) {
    for (std::size_t i = 0; i < pixel_count(); ++i) {
      pixels[4 * i] = r;
      pixels[4 * i + 1] = g;
      pixels[4 * i + 2] = b;
      pixels[4 * i + 3] = a;
    }
  }
  friend bool operator==(const ImageRGBA&, const ImageRGBA&) = default;
};

/// Round-half-up quantization of a [0,1] channel.
inline std::uint8_t quantize(double c) {
  const double v = c * 255.0 + 0.5;
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v);
}

// Binary PPM (P6, maxval 255); alpha dropped.
inline void write_ppm(const ImageRGBA& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  std::vector<char> rgb(img.pixel_count() * 3);
  for (std::size_t i = 0; i < img.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c) rgb[3 * i + static_cast<std::size_t>(c)] = static_cast<char>(img.pixels[4 * i + static_cast<std::size_t>(c)]);
  out.write(rgb.data(), static_cast<std::streamsize>(rgb.size()));
  if (!out) throw IoError("write failed: " + path);
}

// PAM (P7) with TUPLTYPE RGB_ALPHA.
inline void write_pam(const ImageRGBA& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "P7\nWIDTH " << img.width << "\nHEIGHT " << img.height
      << "\nDEPTH 4\nMAXVAL 255\nTUPLTYPE RGB_ALPHA\nENDHDR\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError("write failed: " + path);
}

/// Reads P6 (alpha set to 255) or P7 RGB / RGB_ALPHA images.
inline ImageRGBA read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  // whitespace/comment-separated header tokens
  auto token = [&]() {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
  };
  auto number = [&](const char* what) {
    const std::size_t at = pos;
    const std::string t = token();
    try {
      std::size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used != t.size() || v <= 0) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw FormatError(path + ": bad " + what + " '" + t + "'", at);
    }
  };

  const std::string magic = token();
  int w = 0, h = 0, depth = 3, maxval = 0;
  if (magic == "P6") {
    w = number("width");
    h = number("height");
    maxval = number("maxval");
  } else if (magic == "P7") {
    while (true) {
      const std::size_t at = pos;
      const std::string key = token();
      if (key.empty()) throw FormatError(path + ": missing ENDHDR", at);
      if (key == "ENDHDR") break;
      if (key == "WIDTH") w = number("width");
      else if (key == "HEIGHT") h = number("height");
      else if (key == "DEPTH") depth = number("depth");
      else if (key == "MAXVAL") maxval = number("maxval");
      else if (key == "TUPLTYPE") token();
      else throw FormatError(path + ": unknown PAM header key " + key, at);
    }
  } else {
    throw FormatError(path + ": not a P6/P7 image", 0);
  }
  if (maxval != 255) throw FormatError(path + ": only maxval 255 supported", pos);
  if (depth != 3 && depth != 4) throw FormatError(path + ": unsupported depth", pos);
  ++pos;  // single whitespace after the header
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(depth);
  if (data.size() < pos + need)
    throw FormatError(path + ": truncated pixel data, missing " + std::to_string(pos + need - data.size()) + " bytes",
                      data.size());
  ImageRGBA img(w, h);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) img.pixels[4 * i + c] = static_cast<std::uint8_t>(data[pos + static_cast<std::size_t>(depth) * i + c]);
    img.pixels[4 * i + 3] = depth == 4 ? static_cast<std::uint8_t>(data[pos + 4 * i + 3]) : 255;
  }
  return img;
}

}  // namespace splinevol
