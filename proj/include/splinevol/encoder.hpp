// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Least-squares encoding of grids and point clouds into MfaModel, with the
// adaptive span-splitting loop for structured grids.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "splinevol/grid.hpp"
#include "splinevol/model.hpp"

namespace splinevol {

// Diagonal regularization added to every normal system.
inline constexpr double kRidge = 1e-12;

struct EncodeConfig {
  std::array<int, 3> degree{2, 2, 2};
  std::array<int, 3> nctrl{3, 3, 3};  // initial counts when adaptive
  bool adaptive = false;
  double e_max = 0.01;
  int max_rounds = 10;
  std::array<int, 3> max_ctrl{0, 0, 0};  // 0: use the grid dimension

  void validate() const {
    for (std::size_t d = 0; d < 3; ++d) {
      if (degree[d] < 1 || degree[d] > kMaxDegree)
        throw ConfigError("degree " + std::to_string(degree[d]) + " outside [1, " +
                          std::to_string(kMaxDegree) + "]");
      if (nctrl[d] < degree[d] + 1)
        throw ConfigError("nctrl " + std::to_string(nctrl[d]) + " below degree + 1 in dimension " +
                          std::to_string(d));
      if (max_ctrl[d] < 0) throw ConfigError("max_ctrl must be nonnegative");
    }
    if (adaptive && !(e_max > 0.0 && e_max <= 1.0)) throw ConfigError("e_max must lie in (0, 1]");
    if (max_rounds < 0) throw ConfigError("max_rounds must be nonnegative");
  }
};

struct CurveSample {
  double t;
  double value;
};

/// n uniformly spaced parameters 0, 1/(n-1), ..., 1.
inline std::vector<double> uniform_params(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = i + 1 == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

inline std::array<std::vector<double>, 3> parameterize_grid(const ScalarGrid& g) {
  g.validate();
  return {uniform_params(g.dims[0]), uniform_params(g.dims[1]), uniform_params(g.dims[2])};
}

/// Clamped knots for `nctrl` controls over sorted parameters `params`.
///
/// Interior knot j (of k = nctrl - p - 1) is the mean of p consecutive
/// parameters centred at fractional sample index j (m-1) / (k+1); the parameter
/// sequence is linearly interpolated at fractional indices. Uniform parameters
/// therefore give uniform knots.
inline KnotVector initial_knots(std::span<const double> params, int p, int nctrl) {
  if (p < 0 || p > kMaxDegree) throw ConfigError("degree " + std::to_string(p) + " unsupported");
  if (nctrl < p + 1)
    throw ConfigError("nctrl " + std::to_string(nctrl) + " below degree + 1 (" +
                      std::to_string(p + 1) + ")");
  if (params.empty()) throw ConfigError("no parameters to place knots over");
  const double last = static_cast<double>(params.size() - 1);
  auto param_at = [&](double x) {
    x = std::clamp(x, 0.0, last);
    const auto i = static_cast<std::size_t>(std::floor(x));
    if (i + 1 >= params.size()) return params.back();
    const double a = x - static_cast<double>(i);
    return (1.0 - a) * params[i] + a * params[i + 1];
  };

  KnotVector kv{p, std::vector<double>(static_cast<std::size_t>(p + 1), 0.0)};
  const int interior = nctrl - p - 1;
  for (int j = 1; j <= interior; ++j) {
    const double centre = static_cast<double>(j) * last / static_cast<double>(interior + 1);
    double sum = 0.0;
    for (int q = 0; q < p; ++q) sum += param_at(centre + q - 0.5 * (p - 1));
    kv.knots.push_back(p > 0 ? sum / p : param_at(centre));
  }
  kv.knots.insert(kv.knots.end(), static_cast<std::size_t>(p + 1), 1.0);
  kv.validate();
  return kv;
}

namespace detail {

inline Eigen::MatrixXd basis_matrix(std::span<const double> params, const KnotVector& kv) {
  const int n = kv.n_ctrl();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(params.size()), n);
  double vals[kMaxDegree + 1];
  for (std::size_t j = 0; j < params.size(); ++j) {
    const int span = find_span(kv, params[j]);
    basis_funs_into(kv, span, params[j], vals);
    for (int r = 0; r <= kv.degree; ++r)
      B(static_cast<Eigen::Index>(j), span - kv.degree + r) = vals[r];
  }
  return B;
}

inline std::string support_string(const KnotVector& kv, int i) {
  return "[" + std::to_string(kv.knots[static_cast<std::size_t>(i)]) + ", " +
         std::to_string(kv.knots[static_cast<std::size_t>(i + kv.degree + 1)]) + "]";
}

// Linear operator P (nctrl x m) with ctrl = P * values for the endpoint-
// constrained least-squares curve fit. When a sample sits at t = 0 (t = 1) the
// first (last) control is pinned to it; the remaining controls minimize the
// squared residual through ridge-regularized normal equations.
inline Eigen::MatrixXd curve_fit_operator(std::span<const double> params, const KnotVector& kv) {
  kv.validate();
  const int n = kv.n_ctrl();
  const auto m = static_cast<Eigen::Index>(params.size());
  if (m < n)
    throw FitError(std::to_string(m) + " samples cannot determine " + std::to_string(n) +
                   " control values");
  const Eigen::MatrixXd B = basis_matrix(params, kv);

  Eigen::Index fix0 = -1, fix1 = -1;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (params[static_cast<std::size_t>(j)] == 0.0 && fix0 < 0) fix0 = j;
    if (params[static_cast<std::size_t>(j)] == 1.0 && fix1 < 0) fix1 = j;
  }
  const int lo = fix0 >= 0 ? 1 : 0;
  const int hi = fix1 >= 0 ? n - 2 : n - 1;

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, m);
  if (fix0 >= 0) P(0, fix0) = 1.0;
  if (fix1 >= 0) P(n - 1, fix1) = 1.0;
  const int nfree = hi - lo + 1;
  if (nfree <= 0) return P;

  const Eigen::MatrixXd BF = B.middleCols(lo, nfree);
  for (int c = 0; c < nfree; ++c)
    if (BF.col(c).squaredNorm() == 0.0)
      throw FitError("control " + std::to_string(lo + c) + " has no samples in its support " +
                     support_string(kv, lo + c) + " (empty knot span)");

  // G = BF^T (I - B0 e_fix0^T - Bn e_fix1^T)
  Eigen::MatrixXd G = BF.transpose();
  if (fix0 >= 0) G.col(fix0) -= BF.transpose() * B.col(0);
  if (fix1 >= 0) G.col(fix1) -= BF.transpose() * B.col(n - 1);

  Eigen::MatrixXd S = BF.transpose() * BF;
  S.diagonal().array() += kRidge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw FitError("normal system for the curve fit is singular");
  // refinement against the unregularized system removes the ridge bias
  Eigen::MatrixXd X = ldlt.solve(G);
  S.diagonal().array() -= kRidge;
  for (int it = 0; it < 2; ++it) X += ldlt.solve(G - S * X);
  P.middleRows(lo, nfree) = X;
  if (!P.allFinite()) throw FitError("curve fit produced non-finite control values");
  return P;
}

}  // namespace detail

/// One-dimensional least-squares fit of control values to (t, value) samples.
inline std::vector<double> fit_curve_ls(std::span<const CurveSample> samples, const KnotVector& kv) {
  std::vector<double> t(samples.size());
  Eigen::VectorXd v(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t j = 0; j < samples.size(); ++j) {
    t[j] = samples[j].t;
    v(static_cast<Eigen::Index>(j)) = samples[j].value;
  }
  const Eigen::VectorXd c = detail::curve_fit_operator(t, kv) * v;
  return {c.data(), c.data() + c.size()};
}

/// Tensor-product fit over explicit knot vectors: the curve fit is applied
/// along u for every (v, w) line, then along v, then along w.
inline MfaModel fit_grid_with_knots(const ScalarGrid& g, const std::array<KnotVector, 3>& knots) {
  g.validate();
  const auto params = parameterize_grid(g);
  std::array<Eigen::MatrixXd, 3> P;
  for (std::size_t d = 0; d < 3; ++d) {
    try {
      P[d] = detail::curve_fit_operator(params[d], knots[d]);
    } catch (const FitError& e) {
      throw FitError("dimension " + std::to_string(d) + ": " + e.what());
    }
  }
  const auto mu = static_cast<Eigen::Index>(g.dims[0]);
  const auto mv = static_cast<Eigen::Index>(g.dims[1]);
  const auto mw = static_cast<Eigen::Index>(g.dims[2]);
  const Eigen::Index nu = P[0].rows(), nv = P[1].rows(), nw = P[2].rows();

  // along u: columns of V are u-lines
  const Eigen::Map<const Eigen::MatrixXd> V(g.values.data(), mu, mv * mw);
  const Eigen::MatrixXd T1 = P[0] * V;  // nu x (mv*mw)

  // along v, one w-slice at a time
  Eigen::MatrixXd T2(nu * nv, mw);
  for (Eigen::Index k = 0; k < mw; ++k) {
    const Eigen::Map<const Eigen::MatrixXd> slice(T1.data() + k * nu * mv, nu, mv);
    Eigen::Map<Eigen::MatrixXd>(T2.data() + k * nu * nv, nu, nv) = slice * P[1].transpose();
  }

  // along w
  const Eigen::MatrixXd C = T2 * P[2].transpose();  // (nu*nv) x nw

  MfaModel m;
  m.knots = knots;
  m.nctrl = {static_cast<int>(nu), static_cast<int>(nv), static_cast<int>(nw)};
  m.ctrl.assign(C.data(), C.data() + C.size());
  m.value_min = g.min_value();
  m.value_max = g.max_value();
  m.domain = g.bounds;
  m.validate();
  return m;
}

inline MfaModel fit_grid_separable(const ScalarGrid& g, const EncodeConfig& cfg) {
  cfg.validate();
  const auto params = parameterize_grid(g);
  std::array<KnotVector, 3> knots;
  for (std::size_t d = 0; d < 3; ++d) knots[d] = initial_knots(params[d], cfg.degree[d], cfg.nctrl[d]);
  return fit_grid_with_knots(g, knots);
}

/// Single global least-squares fit over scattered samples. Positions are
/// normalized to [0,1]^3 by `bounds` (the cloud's bounding box when absent);
/// knots are uniform.
inline MfaModel fit_scattered_global(const PointCloud& pc, const EncodeConfig& cfg,
                                     std::optional<Box> bounds = std::nullopt) {
  cfg.validate();
  pc.validate();
  const Box box = bounds ? *bounds : pc.bounding_box();
  if (!box.valid()) throw ConfigError("scattered bounds are degenerate");
  for (const auto& p : pc.points)
    if (!box.contains(p)) throw ConfigError("point outside the stated bounds");

  MfaModel m;
  for (std::size_t d = 0; d < 3; ++d) {
    m.knots[d] = uniform_knots(cfg.degree[d], cfg.nctrl[d]);
    m.nctrl[d] = cfg.nctrl[d];
  }
  const auto total = static_cast<Eigen::Index>(m.nctrl[0]) * m.nctrl[1] * m.nctrl[2];
  if (total > 8000)
    throw ConfigError("scattered fit limited to 8000 control values (dense normal system)");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
  const Vec3 ext = box.extent();
  const int pu = cfg.degree[0], pv = cfg.degree[1], pw = cfg.degree[2];
  std::vector<Eigen::Index> idx;
  std::vector<double> wt;
  for (std::size_t s = 0; s < pc.size(); ++s) {
    const Vec3& p = pc.points[s];
    const double q[3] = {std::clamp((p.x - box.lo.x) / ext.x, 0.0, 1.0),
                         std::clamp((p.y - box.lo.y) / ext.y, 0.0, 1.0),
                         std::clamp((p.z - box.lo.z) / ext.z, 0.0, 1.0)};
    int span[3];
    double basis[3][kMaxDegree + 1];
    for (std::size_t d = 0; d < 3; ++d) {
      span[d] = find_span(m.knots[d], q[d]);
      detail::basis_funs_into(m.knots[d], span[d], q[d], basis[d]);
    }
    idx.clear();
    wt.clear();
    for (int c = 0; c <= pw; ++c)
      for (int b = 0; b <= pv; ++b)
        for (int a = 0; a <= pu; ++a) {
          const double w = basis[0][a] * basis[1][b] * basis[2][c];
          if (w == 0.0) continue;
          idx.push_back(static_cast<Eigen::Index>(
              m.ctrl_index(span[0] - pu + a, span[1] - pv + b, span[2] - pw + c)));
          wt.push_back(w);
        }
    for (std::size_t r = 0; r < idx.size(); ++r) {
      rhs(idx[r]) += wt[r] * pc.values[s];
      for (std::size_t c = 0; c < idx.size(); ++c) A(idx[r], idx[c]) += wt[r] * wt[c];
    }
  }

  std::vector<std::string> dead;
  for (Eigen::Index i = 0; i < total; ++i)
    if (A(i, i) == 0.0) {
      const auto u = i % m.nctrl[0];
      const auto v = (i / m.nctrl[0]) % m.nctrl[1];
      const auto w = i / (static_cast<Eigen::Index>(m.nctrl[0]) * m.nctrl[1]);
      dead.push_back("(" + std::to_string(u) + "," + std::to_string(v) + "," + std::to_string(w) + ")");
    }
  if (!dead.empty()) {
    std::string list;
    for (std::size_t i = 0; i < dead.size() && i < 16; ++i) list += (i ? " " : "") + dead[i];
    if (dead.size() > 16) list += " ...";
    throw FitError(std::to_string(dead.size()) + " control values have no sample support: " + list);
  }

  A.diagonal().array() += kRidge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw FitError("scattered normal system is singular");
  const Eigen::VectorXd c = ldlt.solve(rhs);
  if (!c.allFinite()) throw FitError("scattered fit produced non-finite control values");

  m.ctrl.assign(c.data(), c.data() + c.size());
  const auto [mn, mx] = std::minmax_element(pc.values.begin(), pc.values.end());
  m.value_min = *mn;
  m.value_max = *mx;
  m.domain = box;
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// adaptive refinement

struct RefinementRound {
  int round = 0;
  std::array<int, 3> nctrl{};
  std::array<int, 3> spans{};  // non-degenerate knot spans per dimension
  double max_error = 0.0;      // max relative error over all input samples
  int splits = 0;              // spans split after this round
};

struct RefinementReport {
  std::vector<RefinementRound> rounds;
  bool converged = false;
  std::string stop_reason;  // "tolerance met", "max_rounds", "max_ctrl", ...
  double final_error() const { return rounds.empty() ? 0.0 : rounds.back().max_error; }
};

struct EncodeResult {
  MfaModel model;
  RefinementReport report;
};

/// |model - input| / (input max - input min) at every grid sample, x fastest.
/// A constant input uses the absolute error.
inline std::vector<double> relative_errors(const MfaModel& m, const ScalarGrid& g) {
  const auto params = parameterize_grid(g);
  const double range = g.max_value() - g.min_value();
  const double denom = range > 0.0 ? range : 1.0;
  std::vector<double> err(g.size());
  for (std::size_t k = 0; k < g.dims[2]; ++k)
    for (std::size_t j = 0; j < g.dims[1]; ++j)
      for (std::size_t i = 0; i < g.dims[0]; ++i) {
        const double f = eval_value(m, {params[0][i], params[1][j], params[2][k]});
        err[g.index(i, j, k)] = std::abs(f - g.at(i, j, k)) / denom;
      }
  return err;
}

inline double max_relative_error(const MfaModel& m, const ScalarGrid& g) {
  const auto err = relative_errors(m, g);
  return *std::max_element(err.begin(), err.end());
}

/// Fit, measure the per-span max relative error in every dimension, split
/// every offending span at its parameter midpoint and refit until the
/// tolerance, the round cap or the control cap is reached.
inline EncodeResult adaptive_encode(const ScalarGrid& g, const EncodeConfig& cfg) {
  cfg.validate();
  g.validate();
  const auto params = parameterize_grid(g);
  std::array<int, 3> cap{};
  std::array<KnotVector, 3> knots;
  for (std::size_t d = 0; d < 3; ++d) {
    cap[d] = cfg.max_ctrl[d] > 0 ? cfg.max_ctrl[d] : static_cast<int>(g.dims[d]);
    knots[d] = initial_knots(params[d], cfg.degree[d], cfg.nctrl[d]);
  }

  EncodeResult out;
  for (int round = 0;; ++round) {
    out.model = fit_grid_with_knots(g, knots);
    const auto err = relative_errors(out.model, g);

    RefinementRound rec;
    rec.round = round;
    rec.nctrl = out.model.nctrl;
    // per-dimension, per-span maxima; sample spans looked up once per axis
    std::array<std::vector<double>, 3> span_err;
    std::array<std::vector<int>, 3> sample_span;
    std::array<std::vector<int>, 3> span_population;
    for (std::size_t d = 0; d < 3; ++d) {
      span_err[d].assign(knots[d].knots.size(), 0.0);
      span_population[d].assign(knots[d].knots.size(), 0);
      sample_span[d].resize(params[d].size());
      for (std::size_t i = 0; i < params[d].size(); ++i) {
        sample_span[d][i] = find_span(knots[d], params[d][i]);
        ++span_population[d][static_cast<std::size_t>(sample_span[d][i])];
      }
      const auto& kn = knots[d].knots;
      for (std::size_t s = 0; s + 1 < kn.size(); ++s) rec.spans[d] += kn[s] < kn[s + 1] ? 1 : 0;
    }
    for (std::size_t k = 0; k < g.dims[2]; ++k)
      for (std::size_t j = 0; j < g.dims[1]; ++j)
        for (std::size_t i = 0; i < g.dims[0]; ++i) {
          const double e = err[g.index(i, j, k)];
          rec.max_error = std::max(rec.max_error, e);
          auto& a = span_err[0][static_cast<std::size_t>(sample_span[0][i])];
          auto& b = span_err[1][static_cast<std::size_t>(sample_span[1][j])];
          auto& c = span_err[2][static_cast<std::size_t>(sample_span[2][k])];
          a = std::max(a, e);
          b = std::max(b, e);
          c = std::max(c, e);
        }

    if (rec.max_error <= cfg.e_max) {
      out.report.rounds.push_back(rec);
      out.report.converged = true;
      out.report.stop_reason = "tolerance met";
      break;
    }
    if (round >= cfg.max_rounds) {
      out.report.rounds.push_back(rec);
      out.report.stop_reason = "max_rounds";
      break;
    }

    bool capped = false;
    for (std::size_t d = 0; d < 3; ++d) {
      struct Offender {
        double error;
        std::size_t span;
      };
      std::vector<Offender> off;
      for (std::size_t s = 0; s < span_err[d].size(); ++s)
        if (span_err[d][s] > cfg.e_max && span_population[d][s] >= 2) off.push_back({span_err[d][s], s});
      std::stable_sort(off.begin(), off.end(),
                       [](const Offender& a, const Offender& b) { return a.error > b.error; });
      const int room = cap[d] - knots[d].n_ctrl();
      if (static_cast<int>(off.size()) > room) {
        capped = true;
        off.resize(static_cast<std::size_t>(std::max(room, 0)));
      }
      auto& kn = knots[d].knots;
      std::vector<double> added;
      for (const auto& o : off) added.push_back(0.5 * (kn[o.span] + kn[o.span + 1]));
      kn.insert(kn.end() - (knots[d].degree + 1), added.begin(), added.end());
      std::sort(kn.begin(), kn.end());
      rec.splits += static_cast<int>(added.size());
    }
    out.report.rounds.push_back(rec);
    if (rec.splits == 0) {
      out.report.stop_reason = capped ? "max_ctrl" : "no splittable spans";
      break;
    }
  }
  return out;
}

}  // namespace splinevol
