// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// MFAMOD1 model files.
//
//   "MFAMOD1" (7 bytes ASCII) + version byte (1)
//   u32 degree[3], u32 nctrl[3], u32 knot_count[3]
//   f64 value_min, value_max
//   f64 bounds: lo.x lo.y lo.z hi.x hi.y hi.z
//   f64 knots, one run per dimension (u, v, w)
//   f64 ctrl, w-major / v / u-minor
//
// All integers and floats are little-endian.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "splinevol/model.hpp"

namespace splinevol {

inline constexpr char kModelMagic[7] = {'M', 'F', 'A', 'M', 'O', 'D', '1'};
inline constexpr std::uint8_t kModelVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint64_t offset() const { return pos_; }

  void need(std::uint64_t n, const char* what) const {
    const std::uint64_t left = in_.size() - pos_;
    if (n > left)
      throw FormatError(std::string("truncated ") + what + ": missing " +
                            std::to_string(n - left) + " bytes",
                        pos_);
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return in_[pos_++];
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return std::bit_cast<double>(v);
  }

 private:
  std::span<const std::uint8_t> in_;
  std::uint64_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> serialize_model(const MfaModel& m) {
  m.validate();
  detail::ByteWriter w;
  w.bytes(kModelMagic, sizeof kModelMagic);
  w.u8(kModelVersion);
  for (const auto& kv : m.knots) w.u32(static_cast<std::uint32_t>(kv.degree));
  for (int n : m.nctrl) w.u32(static_cast<std::uint32_t>(n));
  for (const auto& kv : m.knots) w.u32(static_cast<std::uint32_t>(kv.knots.size()));
  w.f64(m.value_min);
  w.f64(m.value_max);
  for (int d = 0; d < 3; ++d) w.f64(m.domain.lo[d]);
  for (int d = 0; d < 3; ++d) w.f64(m.domain.hi[d]);
  for (const auto& kv : m.knots)
    for (double k : kv.knots) w.f64(k);
  for (double c : m.ctrl) w.f64(c);
  return w.take();
}

inline MfaModel deserialize_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.need(sizeof kModelMagic, "magic");
  if (std::memcmp(bytes.data(), kModelMagic, sizeof kModelMagic) != 0)
    throw FormatError("bad magic, expected MFAMOD1", 0);
  for (std::size_t i = 0; i < sizeof kModelMagic; ++i) r.u8("magic");
  const std::uint64_t version_at = r.offset();
  if (const auto version = r.u8("version"); version != kModelVersion)
    throw FormatError("unsupported version " + std::to_string(version), version_at);

  std::uint32_t degree[3], nctrl[3], nknots[3];
  for (auto& v : degree) v = r.u32("header");
  for (auto& v : nctrl) v = r.u32("header");
  for (auto& v : nknots) v = r.u32("header");
  for (int d = 0; d < 3; ++d) {
    if (degree[d] > static_cast<std::uint32_t>(kMaxDegree))
      throw FormatError("degree " + std::to_string(degree[d]) + " unsupported", 8 + 4 * d);
    if (nctrl[d] < degree[d] + 1)
      throw FormatError("nctrl below degree + 1 in dimension " + std::to_string(d), 20 + 4 * d);
    if (static_cast<std::uint64_t>(nknots[d]) != static_cast<std::uint64_t>(nctrl[d]) + degree[d] + 1)
      throw FormatError("knot count inconsistent with nctrl + degree + 1 in dimension " +
                            std::to_string(d),
                        32 + 4 * d);
  }

  MfaModel m;
  m.value_min = r.f64("value range");
  m.value_max = r.f64("value range");
  if (!(m.value_min <= m.value_max)) throw FormatError("value range min exceeds max", 44);
  for (int d = 0; d < 3; ++d) m.domain.lo[d] = r.f64("bounds");
  for (int d = 0; d < 3; ++d) m.domain.hi[d] = r.f64("bounds");
  if (!m.domain.valid()) throw FormatError("empty domain bounds", 60);

  for (std::size_t d = 0; d < 3; ++d) {
    r.need(8ull * nknots[d], "knot block");
    auto& kv = m.knots[d];
    kv.degree = static_cast<int>(degree[d]);
    kv.knots.resize(nknots[d]);
    for (std::uint32_t i = 0; i < nknots[d]; ++i) {
      const std::uint64_t at = r.offset();
      kv.knots[i] = r.f64("knot block");
      if (i > 0 && !(kv.knots[i - 1] <= kv.knots[i]))
        throw FormatError("knots not nondecreasing in dimension " + std::to_string(d), at);
    }
    m.nctrl[d] = static_cast<int>(nctrl[d]);
  }

  const std::uint64_t count = static_cast<std::uint64_t>(nctrl[0]) * nctrl[1] * nctrl[2];
  r.need(8 * count, "ctrl block");
  m.ctrl.resize(count);
  for (auto& c : m.ctrl) c = r.f64("ctrl block");
  if (r.offset() != bytes.size()) throw FormatError("trailing bytes after ctrl block", r.offset());

  try {
    m.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid model: ") + e.what(), r.offset());
  }
  return m;
}

inline void save_model(const MfaModel& m, const std::string& path) {
  const auto bytes = serialize_model(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

inline MfaModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace splinevol
