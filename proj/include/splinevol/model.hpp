// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "splinevol/core.hpp"
#include "splinevol/knots.hpp"

namespace splinevol {

/// Point in the model's parameter cube [0,1]^3.
struct ParamPoint {
  double u = 0.0, v = 0.0, w = 0.0;
};

/// Tensor-product B-spline volume (non-rational, all weights 1).
///
/// Control values are stored w-major / v / u-minor:
/// `ctrl[(k * nctrl[1] + j) * nctrl[0] + i]`. The model is immutable once
/// built; evaluation allocates only per-call stack scratch and may be called
/// concurrently.
struct MfaModel {
  std::array<KnotVector, 3> knots;
  std::array<int, 3> nctrl{};
  std::vector<double> ctrl;
  double value_min = 0.0;
  double value_max = 0.0;
  Box domain;

  std::array<int, 3> degrees() const {
    return {knots[0].degree, knots[1].degree, knots[2].degree};
  }
  double value_span() const { return value_max - value_min; }

  std::size_t ctrl_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(nctrl[1]) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(nctrl[0]) +
           static_cast<std::size_t>(i);
  }

  ParamPoint to_param(const Vec3& p) const {
    const Vec3 e = domain.extent();
    return {(p.x - domain.lo.x) / e.x, (p.y - domain.lo.y) / e.y, (p.z - domain.lo.z) / e.z};
  }

  void validate() const {
    for (int d = 0; d < 3; ++d) {
      knots[static_cast<std::size_t>(d)].validate();
      if (knots[static_cast<std::size_t>(d)].n_ctrl() != nctrl[static_cast<std::size_t>(d)])
        throw ConfigError("dimension " + std::to_string(d) + ": knot count does not match nctrl");
      if (nctrl[static_cast<std::size_t>(d)] < knots[static_cast<std::size_t>(d)].degree + 1)
        throw ConfigError("dimension " + std::to_string(d) + ": nctrl below degree + 1");
    }
    if (ctrl.size() != static_cast<std::size_t>(nctrl[0]) * static_cast<std::size_t>(nctrl[1]) *
                           static_cast<std::size_t>(nctrl[2]))
      throw ConfigError("control array size does not match nctrl");
    if (!(value_min <= value_max)) throw ConfigError("value range min exceeds max");
    if (!domain.valid()) throw ConfigError("domain bounds are empty");
  }

  friend bool operator==(const MfaModel&, const MfaModel&) = default;
};

namespace detail {

inline void check_param(const ParamPoint& q) {
  if (!(q.u >= 0.0 && q.u <= 1.0 && q.v >= 0.0 && q.v <= 1.0 && q.w >= 0.0 && q.w <= 1.0))
    throw DomainError("parameter (" + std::to_string(q.u) + ", " + std::to_string(q.v) + ", " +
                      std::to_string(q.w) + ") outside the unit cube");
}

}  // namespace detail

namespace detail {

// Kernels for models whose three degrees all equal P (1 <= P <= 4).
template <int P>
inline double value_at_fixed(const MfaModel& m, const int span[3], const double params[3]) {
  double basis[3][P + 1];
  for (int d = 0; d < 3; ++d)
    basis_funs_fixed<P>(m.knots[static_cast<std::size_t>(d)].knots.data(), span[d], params[d], basis[d]);
  const double* base = m.ctrl.data() + m.ctrl_index(span[0] - P, span[1] - P, span[2] - P);
  const std::size_t sy = static_cast<std::size_t>(m.nctrl[0]);
  const std::size_t sz = sy * static_cast<std::size_t>(m.nctrl[1]);
  double sum = 0.0;
  for (int c = 0; c <= P; ++c) {
    double plane = 0.0;
    for (int b = 0; b <= P; ++b) {
      const double* row = base + static_cast<std::size_t>(c) * sz + static_cast<std::size_t>(b) * sy;
      double line = 0.0;
      for (int a = 0; a <= P; ++a) line += basis[0][a] * row[a];
      plane += basis[1][b] * line;
    }
    sum += basis[2][c] * plane;
  }
  return sum;
}

template <int P>
inline double value_gradient_at_fixed(const MfaModel& m, const int span[3], const double params[3], Vec3& grad) {
  double basis[3][P + 1], deriv[3][P + 1];
  for (int d = 0; d < 3; ++d)
    basis_and_derivs_fixed<P>(m.knots[static_cast<std::size_t>(d)].knots.data(), span[d], params[d], basis[d],
                              deriv[d]);
  const double* base = m.ctrl.data() + m.ctrl_index(span[0] - P, span[1] - P, span[2] - P);
  const std::size_t sy = static_cast<std::size_t>(m.nctrl[0]);
  const std::size_t sz = sy * static_cast<std::size_t>(m.nctrl[1]);
  double val = 0.0, gu = 0.0, gv = 0.0, gw = 0.0;
  for (int c = 0; c <= P; ++c) {
    double pl_u = 0.0, pl_v = 0.0, pl_val = 0.0;
    for (int b = 0; b <= P; ++b) {
      const double* row = base + static_cast<std::size_t>(c) * sz + static_cast<std::size_t>(b) * sy;
      double line = 0.0, line_du = 0.0;
      for (int a = 0; a <= P; ++a) {
        line += basis[0][a] * row[a];
        line_du += deriv[0][a] * row[a];
      }
      pl_u += basis[1][b] * line_du;
      pl_v += deriv[1][b] * line;
      pl_val += basis[1][b] * line;
    }
    gu += basis[2][c] * pl_u;
    gv += basis[2][c] * pl_v;
    gw += deriv[2][c] * pl_val;
    val += basis[2][c] * pl_val;
  }
  grad = {gu, gv, gw};
  return val;
}

// Common degree of all three dimensions when a fixed kernel exists, else 0.
inline int fixed_degree(const MfaModel& m) {
  const int p = m.knots[0].degree;
  return p >= 1 && p <= 4 && m.knots[1].degree == p && m.knots[2].degree == p ? p : 0;
}

// Value from precomputed spans; params already checked.
inline double value_at(const MfaModel& m, const int span[3], const double params[3]) {
  switch (fixed_degree(m)) {
    case 1: return value_at_fixed<1>(m, span, params);
    case 2: return value_at_fixed<2>(m, span, params);
    case 3: return value_at_fixed<3>(m, span, params);
    case 4: return value_at_fixed<4>(m, span, params);
    default: break;
  }
  double basis[3][kMaxDegree + 1];
  for (int d = 0; d < 3; ++d) basis_funs_into(m.knots[static_cast<std::size_t>(d)], span[d], params[d], basis[d]);
  const int pu = m.knots[0].degree, pv = m.knots[1].degree, pw = m.knots[2].degree;
  const int i0 = span[0] - pu, j0 = span[1] - pv, k0 = span[2] - pw;
  double sum = 0.0;
  for (int c = 0; c <= pw; ++c) {
    double plane = 0.0;
    for (int b = 0; b <= pv; ++b) {
      const double* row = m.ctrl.data() + m.ctrl_index(i0, j0 + b, k0 + c);
      double line = 0.0;
      for (int a = 0; a <= pu; ++a) line += basis[0][a] * row[a];
      plane += basis[1][b] * line;
    }
    sum += basis[2][c] * plane;
  }
  return sum;
}

// Value and parameter-space gradient from precomputed spans.
inline double value_gradient_at(const MfaModel& m, const int span[3], const double params[3], Vec3& grad) {
  switch (fixed_degree(m)) {
    case 1: return value_gradient_at_fixed<1>(m, span, params, grad);
    case 2: return value_gradient_at_fixed<2>(m, span, params, grad);
    case 3: return value_gradient_at_fixed<3>(m, span, params, grad);
    case 4: return value_gradient_at_fixed<4>(m, span, params, grad);
    default: break;
  }
  double basis[3][kMaxDegree + 1];
  double deriv[3][kMaxDegree + 1];
  for (int d = 0; d < 3; ++d) {
    const auto& kv = m.knots[static_cast<std::size_t>(d)];
    if (kv.degree == 0) {
      // piecewise-constant direction: zero slope
      basis[d][0] = 1.0;
      deriv[d][0] = 0.0;
    } else {
      basis_and_derivs_into(kv, span[d], params[d], basis[d], deriv[d]);
    }
  }
  const int pu = m.knots[0].degree, pv = m.knots[1].degree, pw = m.knots[2].degree;
  const int i0 = span[0] - pu, j0 = span[1] - pv, k0 = span[2] - pw;
  double val = 0.0, gu = 0.0, gv = 0.0, gw = 0.0;
  for (int c = 0; c <= pw; ++c) {
    double pl_u = 0.0, pl_v = 0.0, pl_val = 0.0;
    for (int b = 0; b <= pv; ++b) {
      const double* row = m.ctrl.data() + m.ctrl_index(i0, j0 + b, k0 + c);
      double line = 0.0, line_du = 0.0;
      for (int a = 0; a <= pu; ++a) {
        line += basis[0][a] * row[a];
        line_du += deriv[0][a] * row[a];
      }
      pl_u += basis[1][b] * line_du;
      pl_v += deriv[1][b] * line;
      pl_val += basis[1][b] * line;
    }
    gu += basis[2][c] * pl_u;
    gv += basis[2][c] * pl_v;
    gw += deriv[2][c] * pl_val;
    val += basis[2][c] * pl_val;
  }
  grad = {gu, gv, gw};
  return val;
}

}  // namespace detail

/// Value of the model at q; sums only the (p+1)^3 active control values.
inline double eval_value(const MfaModel& m, const ParamPoint& q) {
  detail::check_param(q);
  const double params[3] = {q.u, q.v, q.w};
  int span[3];
  for (int d = 0; d < 3; ++d) span[d] = find_span(m.knots[static_cast<std::size_t>(d)], params[d]);
  return detail::value_at(m, span, params);
}

/// Value and parameter-space gradient (dF/du, dF/dv, dF/dw) in one pass
/// sharing span search and basis evaluation. Divide gradient component d by
/// the domain extent along d to get the physical gradient.
inline double eval_value_gradient(const MfaModel& m, const ParamPoint& q, Vec3& grad) {
  detail::check_param(q);
  const double params[3] = {q.u, q.v, q.w};
  int span[3];
  for (int d = 0; d < 3; ++d) span[d] = find_span(m.knots[static_cast<std::size_t>(d)], params[d]);
  return detail::value_gradient_at(m, span, params, grad);
}

/// Parameter-space gradient; see eval_value_gradient.
inline Vec3 eval_gradient(const MfaModel& m, const ParamPoint& q) {
  Vec3 g;
  eval_value_gradient(m, q, g);
  return g;
}

/// Physical-space gradient from a parameter-space one.
inline Vec3 to_physical_gradient(const MfaModel& m, const Vec3& param_grad) {
  const Vec3 e = m.domain.extent();
  return {param_grad.x / e.x, param_grad.y / e.y, param_grad.z / e.z};
}

/// Model filled with a constant control value.
inline MfaModel constant_model(double c, std::array<int, 3> degree, std::array<int, 3> nctrl,
                               Box domain = {}) {
  MfaModel m;
  for (std::size_t d = 0; d < 3; ++d) m.knots[d] = uniform_knots(degree[d], nctrl[d]);
  m.nctrl = nctrl;
  m.ctrl.assign(static_cast<std::size_t>(nctrl[0]) * static_cast<std::size_t>(nctrl[1]) *
                    static_cast<std::size_t>(nctrl[2]),
                c);
  m.value_min = m.value_max = c;
  m.domain = domain;
  return m;
}

}  // namespace splinevol
