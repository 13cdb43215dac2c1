// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace splinevol {

// ---------------------------------------------------------------------------
// Errors. Each family maps onto one CLI exit code (see tools/commands.hpp).

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad configuration or arguments (exit 1)
struct ConfigError : Error {
  using Error::Error;
};

// file could not be opened / written (exit 2)
struct IoError : Error {
  using Error::Error;
};

// malformed file contents; carries the byte offset where parsing stopped (exit 2)
struct FormatError : Error {
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
  std::uint64_t offset;
};

// query outside the domain of a model, grid or parameter space (exit 3)
struct DomainError : Error {
  using Error::Error;
};

// least-squares fit could not be formed or solved (exit 3)
struct FitError : Error {
  using Error::Error;
};

// broken internal precondition, e.g. a span that does not match its parameter
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 hadamard(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalize(const Vec3& a) {
  const double len = length(a);
  return len > 0.0 ? a * (1.0 / len) : Vec3{};
}

/// Axis-aligned box, used for physical domain bounds.
struct Box {
  Vec3 lo{-1.0, -1.0, -1.0};
  Vec3 hi{1.0, 1.0, 1.0};

  Vec3 extent() const { return hi - lo; }
  double diagonal() const { return length(extent()); }
  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
           p.z <= hi.z;
  }
  Vec3 clamp(const Vec3& p) const {
    return {std::fmin(std::fmax(p.x, lo.x), hi.x), std::fmin(std::fmax(p.y, lo.y), hi.y),
            std::fmin(std::fmax(p.z, lo.z), hi.z)};
  }
  bool valid() const { return lo.x < hi.x && lo.y < hi.y && lo.z < hi.z; }
  friend bool operator==(const Box&, const Box&) = default;
};

using Dims = std::array<std::size_t, 3>;

}  // namespace splinevol
