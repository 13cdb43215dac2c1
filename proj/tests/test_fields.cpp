// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "splinevol/fields.hpp"

using namespace splinevol;

namespace {

template <class F>
Vec3 fd_gradient(const F& f, const Vec3& p, double h = 1e-6) {
  Vec3 g;
  for (int d = 0; d < 3; ++d) {
    Vec3 a = p, b = p;
    a[d] += h;
    b[d] -= h;
    g[d] = (f.value(a) - f.value(b)) / (2 * h);
  }
  return g;
}

template <class F>
void expect_gradient_matches_fd(const F& f, const Vec3& p, double rel) {
  const Vec3 g = f.gradient(p), fd = fd_gradient(f, p);
  const double scale = std::max(length(fd), 1e-3);
  for (int d = 0; d < 3; ++d) EXPECT_NEAR(g[d], fd[d], rel * scale) << "component " << d;
}

}  // namespace

TEST(GaussianBeam, Values) {
  EXPECT_DOUBLE_EQ(gaussian_beam(0, 0, 0), 255.0);
  EXPECT_NEAR(gaussian_beam(1, 1, 1), 255.0 * std::exp(-4.5), 1e-12);
  EXPECT_NEAR(gaussian_beam(1, 1, 1), 2.8328, 1e-4);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const double x = U(rng), y = U(rng), z = U(rng);
    EXPECT_EQ(gaussian_beam(x, y, z), gaussian_beam(-x, -y, -z));
    const double v = gaussian_beam(x, y, z);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 255.0);
  }
}

TEST(GaussianBeam, Gradient) {
  const Vec3 g0 = gaussian_beam_grad(0, 0, 0);
  EXPECT_EQ(g0.x, 0.0);
  EXPECT_EQ(g0.y, 0.0);
  EXPECT_EQ(g0.z, 0.0);
  expect_gradient_matches_fd(GaussianBeam{}, {0.5, 0, 0}, 1e-6);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p{U(rng), U(rng), U(rng)};
    expect_gradient_matches_fd(GaussianBeam{}, p, 1e-5);
    const Vec3 g = gaussian_beam_grad(p.x, p.y, p.z);
    EXPECT_NEAR(dot(normalize(g), normalize(p)), -1.0, 1e-12);
  }
  GaussianBeam shell;
  shell.mu = 0.4;
  for (int i = 0; i < 200; ++i) expect_gradient_matches_fd(shell, {U(rng), U(rng), U(rng)}, 1e-5);
  const Vec3 gs = shell.gradient({0, 0, 0});
  EXPECT_TRUE(std::isfinite(gs.x) && std::isfinite(gs.y) && std::isfinite(gs.z));
}

TEST(MarschnerLobb, Values) {
  EXPECT_NEAR(marschner_lobb(0, 0, -1), 1.0, 1e-12);
  EXPECT_NEAR(marschner_lobb(0, 0, 1), 0.2, 1e-12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int i = 0; i < 100000; ++i) {
    const double v = marschner_lobb(U(rng), U(rng), U(rng));
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

TEST(MarschnerLobb, Gradient) {
  const Vec3 axis = marschner_lobb_grad(0, 0, 0.3);
  EXPECT_EQ(axis.x, 0.0);
  EXPECT_EQ(axis.y, 0.0);
  EXPECT_NEAR(marschner_lobb_grad(0, 0, 0).z, -std::numbers::pi / 5, 1e-12);
  expect_gradient_matches_fd(MarschnerLobb{}, {0.3, 0.4, 0.2}, 1e-5);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int i = 0; i < 1000; ++i) expect_gradient_matches_fd(MarschnerLobb{}, {U(rng), U(rng), U(rng)}, 1e-5);
}

TEST(MultiBeam, ZoomLayout) {
  const MultiBeam mb = zoom_study_beams();
  ASSERT_EQ(mb.beams.size(), 4u);
  for (const auto& b : mb.beams) {
    EXPECT_DOUBLE_EQ(mb.value(b.center), 255.0);
    EXPECT_EQ(b.center.x, b.center.y);
    EXPECT_EQ(b.center.z, 0.0);
  }
  const double cell = 2.0 / (kZoomLattice - 1);
  for (int l = 0; l < 4; ++l) {
    const Box b = zoom_beam_box(l);
    EXPECT_NEAR(b.extent().x / cell, kZoomCells[l], 1e-9);
    const Box unit;
    EXPECT_TRUE(unit.contains(b.lo));
    EXPECT_TRUE(unit.contains(b.hi));
    if (l > 0) {
      EXPECT_LT(zoom_beam_box(l - 1).hi.x, b.lo.x);  // disjoint supports
    }
  }
  // far from every beam
  const Vec3 far{-1, 1, 1};
  for (const auto& b : mb.beams) ASSERT_GE(length(far - b.center), b.radius);
  EXPECT_LE(mb.value(far), 255.0 * std::exp(-4.5));
}

TEST(MultiBeam, SingleBeamDegenerates) {
  GaussianBeam b;
  b.center = {0.1, -0.2, 0.3};
  const MultiBeam one{{b}};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p{U(rng), U(rng), U(rng)};
    EXPECT_EQ(one.value(p), b.value(p));
    EXPECT_EQ(one.gradient(p).x, b.gradient(p).x);
  }
}

TEST(Samplers, GridCorners) {
  const auto g = sample_grid(GaussianBeam{}, {2, 2, 2});
  ASSERT_EQ(g.values.size(), 8u);
  for (const double v : g.values) EXPECT_NEAR(v, 255.0 * std::exp(-4.5), 1e-12);
  EXPECT_EQ(g.position(0, 0, 0).x, -1.0);
  EXPECT_EQ(g.position(1, 1, 1).z, 1.0);
  const auto ml = sample_grid(MarschnerLobb{}, {2, 2, 2});
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i) {
        const Vec3 p = ml.position(i, j, k);
        EXPECT_EQ(ml.at(i, j, k), marschner_lobb(p.x, p.y, p.z));
      }
}

TEST(Samplers, BoundaryPlanes) {
  const Box b{{-2, 0, 1}, {3, 0.5, 4}};
  const auto g = sample_grid(ConstantField{4.0}, {13, 7, 5}, b);
  for (int d = 0; d < 3; ++d) {
    EXPECT_EQ(g.coord(d, 0), b.lo[d]);
    EXPECT_EQ(g.coord(d, g.dims[static_cast<std::size_t>(d)] - 1), b.hi[d]);
  }
  for (double v : g.values) EXPECT_EQ(v, 4.0);
}

TEST(Samplers, ScatteredDeterminism) {
  const auto a = sample_scattered(MarschnerLobb{}, 500, Box{}, 17);
  const auto b = sample_scattered(MarschnerLobb{}, 500, Box{}, 17);
  const auto c = sample_scattered(MarschnerLobb{}, 500, Box{}, 18);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  for (const auto& p : a.points) EXPECT_TRUE(Box{}.contains(p));
}

TEST(Fields, ByName) {
  EXPECT_TRUE(std::holds_alternative<GaussianBeam>(field_by_name("gaussian-beam")));
  EXPECT_TRUE(std::holds_alternative<MarschnerLobb>(field_by_name("marschner-lobb")));
  EXPECT_TRUE(std::holds_alternative<MultiBeam>(field_by_name("multi-beam")));
  EXPECT_THROW(field_by_name("nope"), ConfigError);
  GaussianBeam bad;
  bad.sigma = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_THROW((MarschnerLobb{6, -1}.validate()), ConfigError);
}

TEST(GridIo, RawRoundTripAndSidecar) {
  const auto g = sample_grid(MarschnerLobb{}, {5, 4, 3}, Box{{-1, -2, -3}, {1, 2, 3}});
  const std::string path = ::testing::TempDir() + "splinevol_fields.raw";
  write_raw_volume(g, path);
  const auto back = read_raw_volume(path);
  EXPECT_EQ(back.dims, g.dims);
  EXPECT_EQ(back.bounds, g.bounds);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back.values[i], static_cast<double>(static_cast<float>(g.values[i])));
  EXPECT_THROW(read_raw_volume(path + ".missing"), IoError);
}
