// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "splinevol/core.hpp"

namespace splinevol {

// Largest polynomial degree supported by the fixed-size evaluation scratch.
inline constexpr int kMaxDegree = 9;

/// Clamped knot vector of one B-spline dimension.
///
/// The first and last `degree + 1` knots are 0 and 1 respectively; interior
/// knots are nondecreasing with multiplicity at most `degree`.
struct KnotVector {
  int degree = 0;
  std::vector<double> knots;

  int n_ctrl() const { return static_cast<int>(knots.size()) - degree - 1; }

  // Throws ConfigError describing the first violated invariant.
  void validate() const {
    const int p = degree;
    if (p < 0 || p > kMaxDegree)
      throw ConfigError("knot vector degree " + std::to_string(p) + " outside [0, " +
                        std::to_string(kMaxDegree) + "]");
    if (static_cast<int>(knots.size()) < 2 * (p + 1))
      throw ConfigError("knot vector too short for degree " + std::to_string(p));
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (!(knots[i - 1] <= knots[i]))
        throw ConfigError("knots not nondecreasing at index " + std::to_string(i));
    const std::size_t len = knots.size();
    for (int i = 0; i <= p; ++i) {
      if (knots[static_cast<std::size_t>(i)] != 0.0)
        throw ConfigError("knot vector not clamped at 0 (index " + std::to_string(i) + ")");
      if (knots[len - 1 - static_cast<std::size_t>(i)] != 1.0)
        throw ConfigError("knot vector not clamped at 1 (index " +
                          std::to_string(len - 1 - static_cast<std::size_t>(i)) + ")");
    }
    if (n_ctrl() > p + 1 && (knots[static_cast<std::size_t>(p) + 1] <= 0.0 ||
                             knots[len - static_cast<std::size_t>(p) - 2] >= 1.0))
      throw ConfigError("interior knots must lie strictly inside (0, 1)");
    // interior multiplicity
    std::size_t run = 1;
    for (std::size_t i = static_cast<std::size_t>(p) + 2; i + static_cast<std::size_t>(p) + 1 < len;
         ++i) {
      run = knots[i] == knots[i - 1] ? run + 1 : 1;
      if (run > static_cast<std::size_t>(p))
        throw ConfigError("interior knot " + std::to_string(knots[i]) +
                          " exceeds multiplicity " + std::to_string(p));
    }
  }

  friend bool operator==(const KnotVector&, const KnotVector&) = default;
};

/// Clamped knot vector with uniformly spaced interior knots.
inline KnotVector uniform_knots(int degree, int n_ctrl) {
  if (n_ctrl < degree + 1)
    throw ConfigError("control count " + std::to_string(n_ctrl) + " below degree + 1");
  KnotVector kv{degree, {}};
  kv.knots.assign(static_cast<std::size_t>(degree + 1), 0.0);
  const int interior = n_ctrl - degree - 1;
  for (int j = 1; j <= interior; ++j)
    kv.knots.push_back(static_cast<double>(j) / static_cast<double>(interior + 1));
  kv.knots.insert(kv.knots.end(), static_cast<std::size_t>(degree + 1), 1.0);
  return kv;
}

/// Index i with knots[i] <= u < knots[i+1]; u == 1 maps to the last
/// non-degenerate span (n_ctrl - 1).
inline int find_span(const KnotVector& kv, double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw DomainError("parameter " + std::to_string(u) + " outside [0, 1]");
  const int n = kv.n_ctrl() - 1;
  if (u >= kv.knots[static_cast<std::size_t>(n + 1)]) return n;
  const auto first = kv.knots.begin() + kv.degree;
  const auto last = kv.knots.begin() + n + 1;
  return static_cast<int>(std::upper_bound(first, last, u) - kv.knots.begin()) - 1;
}

/// Bucketed span lookup returning exactly find_span(kv, u). Each bucket holds
/// the span of its left edge; a short scan finishes the search. The knot
/// vector must outlive the index.
class SpanIndex {
 public:
  explicit SpanIndex(const KnotVector& kv) : kv_(&kv) {
    const int buckets = 4 * kv.n_ctrl();
    scale_ = static_cast<double>(buckets);
    start_.resize(static_cast<std::size_t>(buckets));
    for (int b = 0; b < buckets; ++b)
      start_[static_cast<std::size_t>(b)] = find_span(kv, static_cast<double>(b) / scale_);
  }

  int operator()(double u) const {
    if (!(u >= 0.0 && u < 1.0)) return find_span(*kv_, u);
    const double* U = kv_->knots.data();
    const auto b = std::min(static_cast<std::size_t>(u * scale_), start_.size() - 1);
    int s = start_[b];
    while (u >= U[s + 1]) ++s;
    while (s > kv_->degree && u < U[s]) --s;  // bucket edge rounded above u
    return s;
  }

 private:
  const KnotVector* kv_;
  double scale_ = 1.0;
  std::vector<int> start_;
};

namespace detail {

inline void check_span(const KnotVector& kv, int span, double u) {
  const int p = kv.degree;
  const int n = kv.n_ctrl() - 1;
  if (span < p || span > n || u < kv.knots[static_cast<std::size_t>(span)] ||
      u > kv.knots[static_cast<std::size_t>(span + 1)])
    throw InternalError("span " + std::to_string(span) + " inconsistent with parameter " +
                        std::to_string(u));
}

// Nonzero basis values N_{span-p..span}(u) written to out[0..p]. No checking.
inline void basis_funs_into(const KnotVector& kv, int span, double u, double* out) {
  const int p = kv.degree;
  const double* U = kv.knots.data();
  std::array<double, kMaxDegree + 1> left, right;  // entries 1..p written before use
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<std::size_t>(j)] = u - U[span + 1 - j];
    right[static_cast<std::size_t>(j)] = U[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[static_cast<std::size_t>(r + 1)] +
                                    left[static_cast<std::size_t>(j - r)]);
      out[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    out[j] = saved;
  }
}

// Basis values and first derivatives in one pass (requires p >= 1).
inline void basis_and_derivs_into(const KnotVector& kv, int span, double u, double* vals,
                                  double* ders) {
  const int p = kv.degree;
  const double* U = kv.knots.data();
  // ndu[j][r]: upper triangle holds basis values, lower triangle knot differences
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> ndu;
  std::array<double, kMaxDegree + 1> left, right;  // entries 1..p written before use
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    left[uj] = u - U[span + 1 - j];
    right[uj] = U[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const auto ur = static_cast<std::size_t>(r);
      ndu[uj][ur] = right[ur + 1] + left[uj - ur];
      const double temp = ndu[ur][uj - 1] / ndu[uj][ur];
      ndu[ur][uj] = saved + right[ur + 1] * temp;
      saved = left[uj - ur] * temp;
    }
    ndu[uj][uj] = saved;
  }
  const auto up = static_cast<std::size_t>(p);
  for (int r = 0; r <= p; ++r) vals[r] = ndu[static_cast<std::size_t>(r)][up];
  // first derivative: p * (N_{r,p-1}/(u_{r+p}-u_r) - N_{r+1,p-1}/(u_{r+p+1}-u_{r+1}))
  for (int r = 0; r <= p; ++r) {
    const auto ur = static_cast<std::size_t>(r);
    double d = 0.0;
    if (r >= 1) d += ndu[ur - 1][up - 1] / ndu[up][ur - 1];
    if (r <= p - 1) d -= ndu[ur][up - 1] / ndu[up][ur];
    ders[r] = static_cast<double>(p) * d;
  }
}

// Compile-time-degree versions of the two routines above, same arithmetic.
template <int P>
inline void basis_funs_fixed(const double* U, int span, double u, double* out) {
  double left[P + 1], right[P + 1];
  out[0] = 1.0;
  for (int j = 1; j <= P; ++j) {
    left[j] = u - U[span + 1 - j];
    right[j] = U[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

template <int P>
inline void basis_and_derivs_fixed(const double* U, int span, double u, double* vals, double* ders) {
  double ndu[P + 1][P + 1];
  double left[P + 1], right[P + 1];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= P; ++j) {
    left[j] = u - U[span + 1 - j];
    right[j] = U[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int r = 0; r <= P; ++r) vals[r] = ndu[r][P];
  for (int r = 0; r <= P; ++r) {
    double d = 0.0;
    if (r >= 1) d += ndu[r - 1][P - 1] / ndu[P][r - 1];
    if (r <= P - 1) d -= ndu[r][P - 1] / ndu[P][r];
    ders[r] = static_cast<double>(P) * d;
  }
}

}  // namespace detail

/// The p+1 nonzero basis functions at u (Cox-de Boor, triangular scheme).
inline std::vector<double> basis_funs(const KnotVector& kv, int span, double u) {
  detail::check_span(kv, span, u);
  std::vector<double> out(static_cast<std::size_t>(kv.degree + 1));
  detail::basis_funs_into(kv, span, u, out.data());
  return out;
}

/// First derivatives of the p+1 nonzero basis functions at u. Only order 1 is
/// implemented; any other order, or order > degree, is rejected.
inline std::vector<double> basis_derivs(const KnotVector& kv, int span, double u, int order = 1) {
  if (order != 1)
    throw ConfigError("basis derivative order " + std::to_string(order) + " unsupported");
  if (order > kv.degree)
    throw ConfigError("basis derivative order " + std::to_string(order) + " exceeds degree " +
                      std::to_string(kv.degree));
  detail::check_span(kv, span, u);
  std::vector<double> vals(static_cast<std::size_t>(kv.degree + 1));
  std::vector<double> ders(vals.size());
  detail::basis_and_derivs_into(kv, span, u, vals.data(), ders.data());
  return ders;
}

}  // namespace splinevol
