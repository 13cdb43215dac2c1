// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "oracles.hpp"

using namespace splinevol;

namespace {

template <class F>
ScalarGrid grid_of(F f, Dims dims, Box b = {}) {
  struct Adapter {
    F f;
    double value(const Vec3& p) const { return f(p.x, p.y, p.z); }
  };
  return sample_grid(Adapter{f}, dims, b);
}

EncodeConfig config(int p, int n) {
  EncodeConfig c;
  c.degree = {p, p, p};
  c.nctrl = {n, n, n};
  return c;
}

}  // namespace

TEST(Parameterize, UniformParameters) {
  ScalarGrid g{{2, 5, 3}, Box{}, std::vector<double>(30, 0.0)};
  const auto t = parameterize_grid(g);
  EXPECT_EQ(t[0], (std::vector<double>{0, 1}));
  EXPECT_EQ(t[1], (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(t[2].front(), 0.0);
  EXPECT_EQ(t[2].back(), 1.0);
}

TEST(InitialKnots, Examples) {
  const auto t5 = uniform_params(5);
  EXPECT_EQ(initial_knots(t5, 2, 3).knots, (std::vector<double>{0, 0, 0, 1, 1, 1}));
  EXPECT_EQ(initial_knots(t5, 1, 3).knots, (std::vector<double>{0, 0, 0.5, 1, 1}));
  EXPECT_THROW(initial_knots(t5, 2, 2), ConfigError);
  for (int p = 1; p <= 5; ++p)
    for (int n = p + 1; n <= 40; ++n) EXPECT_NO_THROW(initial_knots(uniform_params(41), p, n).validate());
}

TEST(FitCurve, ConstantAndLinear) {
  std::vector<CurveSample> s;
  for (double t : uniform_params(11)) s.push_back({t, 4.0});
  for (double c : fit_curve_ls(s, uniform_knots(3, 6))) EXPECT_NEAR(c, 4.0, 1e-10);

  std::mt19937_64 rng(3);
  std::vector<CurveSample> lin;
  for (double t : uniform_params(30)) lin.push_back({t, t});
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + trial % 4;
    const auto kv = splinevol::testing::random_knots(rng, p, p + 3);
    std::vector<CurveSample> dense;
    for (double t : uniform_params(200)) dense.push_back({t, t});
    const auto c = fit_curve_ls(dense, kv);
    for (double t : uniform_params(37)) {
      const int sp = find_span(kv, t);
      const auto b = basis_funs(kv, sp, t);
      double v = 0.0;
      for (int r = 0; r <= p; ++r) v += b[static_cast<std::size_t>(r)] * c[static_cast<std::size_t>(sp - p + r)];
      EXPECT_NEAR(v, t, 1e-9);
    }
  }
}

TEST(FitCurve, SquareSystemInterpolates) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0, 1);
  std::vector<CurveSample> s;
  const auto t = uniform_params(5);
  for (double x : t) s.push_back({x, std::sin(3 * x) + noise(rng)});
  const auto kv = initial_knots(t, 2, 5);
  const auto c = fit_curve_ls(s, kv);
  // oracle: dense collocation solve B c = v
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(5, 5);
  Eigen::VectorXd v(5);
  for (int j = 0; j < 5; ++j) {
    const int sp = find_span(kv, t[static_cast<std::size_t>(j)]);
    const auto b = basis_funs(kv, sp, t[static_cast<std::size_t>(j)]);
    for (int r = 0; r <= 2; ++r) B(j, sp - 2 + r) = b[static_cast<std::size_t>(r)];
    v(j) = s[static_cast<std::size_t>(j)].value;
  }
  const Eigen::VectorXd ref = B.fullPivLu().solve(v);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(c[static_cast<std::size_t>(i)], ref(i), 1e-9);
  EXPECT_NEAR((B * Eigen::Map<const Eigen::VectorXd>(c.data(), 5) - v).cwiseAbs().maxCoeff(), 0.0, 1e-9);
}

TEST(FitCurve, EmptySpanIsFitError) {
  KnotVector kv{1, {0, 0, 0.41, 0.42, 0.43, 1, 1}};  // control 2 lives on [0.41, 0.43]
  std::vector<CurveSample> s;
  for (double t : uniform_params(6)) s.push_back({t, t});
  try {
    fit_curve_ls(s, kv);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("support"), std::string::npos) << e.what();
  }
}

TEST(FitGrid, ConstantGrid) {
  const auto g = grid_of([](double, double, double) { return 7.0; }, {8, 8, 8});
  const auto m = fit_grid_separable(g, config(2, 3));
  for (double c : m.ctrl) EXPECT_NEAR(c, 7.0, 1e-10);
  EXPECT_LE(max_relative_error(m, g), 1e-10);
}

TEST(FitGrid, TrilinearFieldExact) {
  const auto g = grid_of([](double x, double y, double z) { return x + 2 * y + 3 * z; }, {9, 7, 6});
  EncodeConfig c;
  c.degree = {2, 2, 2};
  c.nctrl = {9, 7, 6};
  const auto m = fit_grid_separable(g, c);
  EXPECT_LE(max_relative_error(m, g), 1e-9);
  EXPECT_EQ(m.value_min, g.min_value());
  EXPECT_EQ(m.value_max, g.max_value());
}

TEST(FitGrid, SeparableEqualsGlobalForPolynomials) {
  const Dims dims{7, 6, 5};
  const auto g = grid_of([](double x, double y, double z) { return 1 + x * y - z + x * y * z + y * y; }, dims);
  EncodeConfig cfg;
  cfg.degree = {2, 2, 2};
  cfg.nctrl = {4, 5, 3};
  const auto m = fit_grid_separable(g, cfg);

  // oracle: one global least-squares solve with the full tensor-product basis
  const auto t = parameterize_grid(g);
  const Eigen::Index rows = static_cast<Eigen::Index>(g.size());
  const Eigen::Index cols = 4 * 5 * 3;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd v(rows);
  for (std::size_t k = 0; k < dims[2]; ++k)
    for (std::size_t j = 0; j < dims[1]; ++j)
      for (std::size_t i = 0; i < dims[0]; ++i) {
        const auto row = static_cast<Eigen::Index>(g.index(i, j, k));
        v(row) = g.at(i, j, k);
        for (int c = 0; c < m.nctrl[2]; ++c)
          for (int b = 0; b < m.nctrl[1]; ++b)
            for (int a = 0; a < m.nctrl[0]; ++a)
              A(row, static_cast<Eigen::Index>(m.ctrl_index(a, b, c))) =
                  splinevol::testing::cox_de_boor(m.knots[0].knots, a, 2, t[0][i]) *
                  splinevol::testing::cox_de_boor(m.knots[1].knots, b, 2, t[1][j]) *
                  splinevol::testing::cox_de_boor(m.knots[2].knots, c, 2, t[2][k]);
      }
  const Eigen::VectorXd ref = A.colPivHouseholderQr().solve(v);
  for (Eigen::Index i = 0; i < cols; ++i) EXPECT_NEAR(m.ctrl[static_cast<std::size_t>(i)], ref(i), 1e-8);
}

TEST(FitGrid, GaussianBeamRegression) {
  const auto g = sample_grid(GaussianBeam{}, {64, 64, 64});
  const auto m = fit_grid_separable(g, config(2, 32));
  EXPECT_LT(max_relative_error(m, g), 0.05);
}

TEST(FitGrid, GaussianBeamCentre) {
  const auto g = sample_grid(GaussianBeam{}, {64, 64, 64});
  const auto m = fit_grid_separable(g, config(2, 64));
  EXPECT_NEAR(eval_value(m, {0.5, 0.5, 0.5}), 255.0, 0.01 * 255.0);
}

TEST(FitGrid, Deterministic) {
  const auto g = sample_grid(MarschnerLobb{}, {12, 12, 12});
  EXPECT_EQ(fit_grid_separable(g, config(3, 8)), fit_grid_separable(g, config(3, 8)));
}

TEST(FitScattered, CubeCornersConstant) {
  PointCloud pc;
  for (int c = 0; c < 8; ++c) {
    pc.points.push_back({c & 1 ? 1.0 : -1.0, c & 2 ? 1.0 : -1.0, c & 4 ? 1.0 : -1.0});
    pc.values.push_back(2.5);
  }
  const auto m = fit_scattered_global(pc, config(1, 2));
  for (double c : m.ctrl) EXPECT_NEAR(c, 2.5, 1e-9);
}

TEST(FitScattered, LinearField) {
  struct X {
    double value(const Vec3& p) const { return p.x; }
  };
  const auto pc = sample_scattered(X{}, 5000, Box{}, 42);
  const auto m = fit_scattered_global(pc, config(1, 4), Box{});
  const MfaSource src(m);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p{U(rng), U(rng), U(rng)};
    EXPECT_NEAR(src.value(p), p.x, 1e-6);
  }
}

TEST(FitScattered, DeadControls) {
  struct One {
    double value(const Vec3&) const { return 1.0; }
  };
  const auto pc = sample_scattered(One{}, 2000, Box{{0, 0, 0}, {1, 1, 1}}, 5);
  try {
    fit_scattered_global(pc, config(1, 8), Box{});
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("(0,0,0)"), std::string::npos) << e.what();
  }
}

TEST(Adaptive, ConstantConvergesImmediately) {
  const auto g = grid_of([](double, double, double) { return 3.0; }, {8, 8, 8});
  auto cfg = config(2, 3);
  cfg.adaptive = true;
  const auto r = adaptive_encode(g, cfg);
  ASSERT_EQ(r.report.rounds.size(), 1u);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.rounds[0].splits, 0);
  EXPECT_LE(r.report.final_error(), 1e-14);
}

TEST(Adaptive, StepLikeGridMonotone) {
  const auto g = grid_of([](double x, double, double) { return std::tanh(8 * x); }, {48, 4, 4});
  auto cfg = config(2, 3);
  cfg.adaptive = true;
  cfg.e_max = 0.05;
  const auto r = adaptive_encode(g, cfg);
  ASSERT_FALSE(r.report.rounds.empty());
  for (std::size_t i = 1; i < r.report.rounds.size(); ++i)
    EXPECT_LE(r.report.rounds[i].max_error, r.report.rounds[i - 1].max_error + 1e-10);
  EXPECT_TRUE(r.report.converged ? r.report.final_error() <= 0.05 : !r.report.stop_reason.empty());
  EXPECT_LE(max_relative_error(r.model, g), r.report.final_error() + 1e-15);
}

TEST(Adaptive, VacuousTolerance) {
  const auto g = sample_grid(MarschnerLobb{}, {16, 16, 16});
  auto cfg = config(2, 3);
  cfg.adaptive = true;
  cfg.e_max = 1.0;
  const auto r = adaptive_encode(g, cfg);
  EXPECT_EQ(r.report.rounds.size(), 1u);
  EXPECT_EQ(r.model.nctrl, (std::array<int, 3>{3, 3, 3}));
}

TEST(Adaptive, CapsAreReported) {
  const auto g = sample_grid(MarschnerLobb{}, {16, 16, 16});
  auto cfg = config(2, 3);
  cfg.adaptive = true;
  cfg.e_max = 1e-6;
  cfg.max_ctrl = {6, 6, 6};
  const auto r = adaptive_encode(g, cfg);
  EXPECT_FALSE(r.report.converged);
  EXPECT_FALSE(r.report.stop_reason.empty());
  for (int n : r.model.nctrl) EXPECT_LE(n, 6);
}

TEST(EncodeConfig, Validation) {
  auto c = config(2, 2);
  EXPECT_THROW(c.validate(), ConfigError);
  c = config(0, 3);
  EXPECT_THROW(c.validate(), ConfigError);
}
