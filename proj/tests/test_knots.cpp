// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"

using namespace splinevol;
using splinevol::testing::cox_de_boor;

namespace {

KnotVector kv(int p, std::vector<double> k) { return {p, std::move(k)}; }

}  // namespace

TEST(FindSpan, SingleSpan) {
  const auto k = kv(2, {0, 0, 0, 1, 1, 1});
  EXPECT_EQ(find_span(k, 0.0), 2);
  EXPECT_EQ(find_span(k, 1.0), 2);
}

TEST(FindSpan, MatchesLinearScan) {
  const auto k = kv(2, {0, 0, 0, 0.5, 1, 1, 1});
  EXPECT_EQ(find_span(k, 0.7), splinevol::testing::scan_span(k, 0.7));
  EXPECT_EQ(find_span(k, 0.7), 3);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto r = splinevol::testing::random_knots(rng, 1 + t % 4, 6 + t % 5);
    for (double u : {0.0, 0.13, 0.5, 0.77, 1.0}) EXPECT_EQ(find_span(r, u), splinevol::testing::scan_span(r, u));
  }
}

TEST(FindSpan, RejectsOutsideUnitInterval) {
  const auto k = kv(1, {0, 0, 1, 1});
  EXPECT_THROW(find_span(k, -1e-9), DomainError);
  EXPECT_THROW(find_span(k, 1.0 + 1e-9), DomainError);
}

TEST(BasisFuns, LinearHats) {
  const auto b = basis_funs(kv(1, {0, 0, 1, 1}), 1, 0.5);
  EXPECT_DOUBLE_EQ(b[0], 0.5);
  EXPECT_DOUBLE_EQ(b[1], 0.5);
}

TEST(BasisFuns, ClampedEndpoint) {
  const auto b = basis_funs(kv(2, {0, 0, 0, 1, 1, 1}), 2, 0.0);
  EXPECT_EQ(b, (std::vector<double>{1, 0, 0}));
}

TEST(BasisFuns, MatchesCoxDeBoor) {
  const auto k = kv(2, {0, 0, 0, 0.5, 1, 1, 1});
  const int span = find_span(k, 0.25);
  const auto b = basis_funs(k, span, 0.25);
  for (int r = 0; r <= 2; ++r) EXPECT_NEAR(b[static_cast<std::size_t>(r)], cox_de_boor(k.knots, span - 2 + r, 2, 0.25), 1e-12);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const int p = 1 + t % 5;
    const auto r = splinevol::testing::random_knots(rng, p, p + 1 + t % 7);
    const double u = t % 20 == 0 ? 1.0 : U(rng);
    const int s = find_span(r, u);
    const auto v = basis_funs(r, s, u);
    for (int i = 0; i <= p; ++i) EXPECT_NEAR(v[static_cast<std::size_t>(i)], cox_de_boor(r.knots, s - p + i, p, u), 1e-12);
  }
}

TEST(BasisFuns, InconsistentSpanIsInternalError) {
  const auto k = kv(2, {0, 0, 0, 0.5, 1, 1, 1});
  EXPECT_THROW(basis_funs(k, 3, 0.25), InternalError);
}

TEST(BasisDerivs, LinearSlopes) {
  const auto k = kv(1, {0, 0, 1, 1});
  for (double u : {0.1, 0.5, 0.9}) {
    const auto d = basis_derivs(k, 1, u);
    EXPECT_DOUBLE_EQ(d[0], -1.0);
    EXPECT_DOUBLE_EQ(d[1], 1.0);
  }
}

TEST(BasisDerivs, FiniteDifference) {
  const auto k = kv(2, {0, 0, 0, 0.5, 1, 1, 1});
  const double u = 0.25, h = 1e-6;
  const int s = find_span(k, u);
  const auto d = basis_derivs(k, s, u);
  const auto up = basis_funs(k, s, u + h), dn = basis_funs(k, s, u - h);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(d[i], (up[i] - dn[i]) / (2 * h), 1e-5);
}

TEST(BasisDerivs, SumToZero) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const int p = 1 + t % 6;
    const auto r = splinevol::testing::random_knots(rng, p, p + 1 + t % 9);
    const double u = U(rng);
    const auto d = basis_derivs(r, find_span(r, u), u);
    EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 0.0, 1e-12 * (1 + std::abs(d[0])));
  }
}

TEST(BasisDerivs, UnsupportedOrder) {
  const auto k = kv(2, {0, 0, 0, 1, 1, 1});
  EXPECT_THROW(basis_derivs(k, 2, 0.5, 2), ConfigError);
  EXPECT_THROW(basis_derivs(kv(0, {0, 1}), 0, 0.5, 1), ConfigError);
}

TEST(KnotVector, Validation) {
  EXPECT_NO_THROW(kv(2, {0, 0, 0, 0.5, 0.5, 1, 1, 1}).validate());
  EXPECT_THROW(kv(2, {0, 0, 0, 0.5, 0.5, 0.5, 1, 1, 1}).validate(), ConfigError);  // multiplicity > p
  EXPECT_THROW(kv(2, {0, 0, 0, 0.6, 0.5, 1, 1, 1}).validate(), ConfigError);       // decreasing
  EXPECT_THROW(kv(2, {0, 0, 0.1, 0.5, 1, 1, 1}).validate(), ConfigError);           // not clamped
  EXPECT_THROW(kv(2, {0, 0, 0}).validate(), ConfigError);
}

TEST(KnotVector, Uniform) {
  const auto k = uniform_knots(2, 5);
  EXPECT_EQ(k.knots, (std::vector<double>{0, 0, 0, 1.0 / 3, 2.0 / 3, 1, 1, 1}));
  EXPECT_EQ(k.n_ctrl(), 5);
  EXPECT_THROW(uniform_knots(3, 3), ConfigError);
}

TEST(SpanIndex, MatchesFindSpan) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 1 + trial % 5;
    const KnotVector k = splinevol::testing::random_knots(rng, p, p + 1 + trial % 17);
    const SpanIndex index(k);
    for (double u : k.knots) ASSERT_EQ(index(u), find_span(k, u)) << "knot " << u;
    for (int s = 0; s < 200; ++s) {
      const double u = U(rng);
      ASSERT_EQ(index(u), find_span(k, u)) << "u " << u;
    }
    EXPECT_EQ(index(1.0), find_span(k, 1.0));
    EXPECT_THROW(index(1.5), DomainError);
  }
}
