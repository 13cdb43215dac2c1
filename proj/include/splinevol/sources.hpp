// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

// Sample sources plugged into render(): analytic ground truth, MFA models and
// local grid filters, plus wrappers for gradient isolation and query counting.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>

#include "splinevol/fields.hpp"
#include "splinevol/interpolators.hpp"
#include "splinevol/model.hpp"
#include "splinevol/renderer.hpp"

namespace splinevol {

template <class Field>
class AnalyticSource {
 public:
  AnalyticSource(Field field, Box bounds) : field_(std::move(field)), bounds_(bounds) {}
  Box bounds() const { return bounds_; }
  double value(const Vec3& p) const { return field_.value(p); }
  Vec3 gradient(const Vec3& p) const { return field_.gradient(p); }

 private:
  Field field_;
  Box bounds_;
};

/// Queries an MFA model; positions are normalized to [0,1]^3 before
/// evaluation and gradients converted back to physical units. Spans come from
/// a bucketed index instead of a binary search. The model must outlive the
/// source.
class MfaSource {
 public:
  explicit MfaSource(const MfaModel& model)
      : model_(&model), index_{SpanIndex(model.knots[0]), SpanIndex(model.knots[1]), SpanIndex(model.knots[2])} {}

  Box bounds() const { return model_->domain; }
  double value(const Vec3& p) const {
    double t[3];
    int span[3];
    locate(p, t, span);
    return detail::value_at(*model_, span, t);
  }
  Vec3 gradient(const Vec3& p) const {
    Vec3 g;
    value_gradient(p, g);
    return g;
  }
  double value_gradient(const Vec3& p, Vec3& g) const {
    double t[3];
    int span[3];
    locate(p, t, span);
    const double v = detail::value_gradient_at(*model_, span, t, g);
    g = to_physical_gradient(*model_, g);
    return v;
  }

 private:
  void locate(const Vec3& p, double t[3], int span[3]) const {
    const Box& box = model_->domain;
    for (int d = 0; d < 3; ++d) {
      t[d] = std::clamp((p[d] - box.lo[d]) / (box.hi[d] - box.lo[d]), 0.0, 1.0);
      span[d] = index_[d](t[d]);
    }
  }

  const MfaModel* model_;
  std::array<SpanIndex, 3> index_;
};

template <FilterKind Kind>
class FilterSource {
 public:
  explicit FilterSource(const ScalarGrid& grid) : grid_(&grid) {}
  Box bounds() const { return grid_->bounds; }
  double value(const Vec3& p) const {
    if constexpr (Kind == FilterKind::trilinear) return trilinear_value(*grid_, p);
    else if constexpr (Kind == FilterKind::tricubic) return tricubic_value(*grid_, p);
    else return catmull_rom_value(*grid_, p);
  }
  Vec3 gradient(const Vec3& p) const {
    if constexpr (Kind == FilterKind::trilinear) return trilinear_gradient(*grid_, p);
    else if constexpr (Kind == FilterKind::tricubic) return tricubic_gradient(*grid_, p);
    else return catmull_rom_gradient(*grid_, p);
  }
  double value_gradient(const Vec3& p, Vec3& g) const
    requires(Kind != FilterKind::trilinear)
  {
    if constexpr (Kind == FilterKind::tricubic) return tricubic_value_gradient(*grid_, p, g);
    else return catmull_rom_value_gradient(*grid_, p, g);
  }

 private:
  const ScalarGrid* grid_;
};

using TrilinearSource = FilterSource<FilterKind::trilinear>;
using TricubicSource = FilterSource<FilterKind::tricubic>;
using CatmullRomSource = FilterSource<FilterKind::catmull_rom>;

/// Values (and bounds) from one source, gradients from another. Rendering
/// with exact values and a reconstructed gradient isolates gradient error.
template <SampleSource ValueSrc, SampleSource GradientSrc>
class SplitSource {
 public:
  SplitSource(const ValueSrc& values, const GradientSrc& gradients) : values_(&values), gradients_(&gradients) {}
  Box bounds() const { return values_->bounds(); }
  double value(const Vec3& p) const { return values_->value(p); }
  Vec3 gradient(const Vec3& p) const { return gradients_->gradient(p); }

 private:
  const ValueSrc* values_;
  const GradientSrc* gradients_;
};

/// Counts value and gradient queries issued to the wrapped source.
template <SampleSource Inner>
class CountingSource {
 public:
  explicit CountingSource(const Inner& inner) : inner_(&inner) {}
  Box bounds() const { return inner_->bounds(); }
  double value(const Vec3& p) const {
    values_.fetch_add(1, std::memory_order_relaxed);
    return inner_->value(p);
  }
  Vec3 gradient(const Vec3& p) const {
    gradients_.fetch_add(1, std::memory_order_relaxed);
    return inner_->gradient(p);
  }
  long value_queries() const { return values_.load(); }
  long gradient_queries() const { return gradients_.load(); }

 private:
  const Inner* inner_;
  mutable std::atomic<long> values_{0};
  mutable std::atomic<long> gradients_{0};
};

}  // namespace splinevol
