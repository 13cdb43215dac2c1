// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "oracles.hpp"

using namespace splinevol;

namespace {

void put_f64(std::vector<std::uint8_t>& b, std::size_t at, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) b[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bits >> (8 * i));
}

}  // namespace

TEST(ModelIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const auto m = splinevol::testing::random_model(rng);
    const auto bytes = serialize_model(m);
    const auto back = deserialize_model(bytes);
    EXPECT_EQ(back, m);
    EXPECT_EQ(serialize_model(back), bytes);
  }
}

TEST(ModelIo, FileRoundTrip) {
  std::mt19937_64 rng(22);
  const auto m = splinevol::testing::random_model(rng);
  const auto path = (std::filesystem::temp_directory_path() / "splinevol_model_io.mfa").string();
  save_model(m, path);
  EXPECT_EQ(load_model(path), m);
  std::filesystem::remove(path);
}

TEST(ModelIo, LayoutHeader) {
  const auto m = constant_model(2.0, {2, 1, 3}, {4, 5, 6});
  const auto b = serialize_model(m);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 7), "MFAMOD1");
  EXPECT_EQ(b[7], 1);
  EXPECT_EQ(b[8], 2);    // degree u, little-endian u32
  EXPECT_EQ(b[24], 5);   // nctrl v
  EXPECT_EQ(b[40], 10);  // knot count w = 6 + 3 + 1
  const std::size_t knots = (4 + 3) + (5 + 2) + (6 + 4);
  EXPECT_EQ(b.size(), 8u + 36u + 16u + 48u + 8u * knots + 8u * 4 * 5 * 6);
}

TEST(ModelIo, NonMonotoneKnotsRejected) {
  const auto m = constant_model(1.0, {2, 2, 2}, {5, 3, 3});
  auto b = serialize_model(m);
  // first knot block starts after the 108-byte header; knots are 0,0,0,1/3,2/3,1,1,1
  const std::size_t at = 108 + 8 * 3;
  put_f64(b, at, 0.9);
  try {
    deserialize_model(b);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset, at + 8);  // the following knot (2/3) breaks monotonicity
  }
}

TEST(ModelIo, TruncatedCtrlNamesMissingBytes) {
  const auto m = constant_model(1.0, {1, 1, 1}, {2, 2, 2});
  auto b = serialize_model(m);
  b.resize(b.size() - 20);
  try {
    deserialize_model(b);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("missing 20 bytes"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, BadMagicAndTrailingBytes) {
  const auto m = constant_model(1.0, {1, 1, 1}, {2, 2, 2});
  auto b = serialize_model(m);
  auto bad = b;
  bad[0] = 'X';
  EXPECT_THROW(deserialize_model(bad), FormatError);
  b.push_back(0);
  EXPECT_THROW(deserialize_model(b), FormatError);
  EXPECT_THROW(load_model("/nonexistent/model.mfa"), IoError);
}
