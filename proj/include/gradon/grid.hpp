#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gradon/core.hpp"

namespace gradon {

/// Axis-aligned box in R^n.
struct Box {
  int n = 2;
  Vec lo;
  Vec hi;

  static Box centered(int dim, double half_width) {
    Box b;
    b.n = dim;
    b.lo = Vec::zero(dim);
    b.hi = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) {
      b.lo[i] = -half_width;
      b.hi[i] = half_width;
    }
    return b;
  }
  bool contains(const Vec& x) const {
    for (int i = 0; i < n; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
};

/// Uniform, isotropic, cell-centered grid. Sample i sits at
/// origin + (i + 1/2) h per axis; the covered box has side shape * h.
struct GridLayout {
  int n = 2;
  std::array<int, 3> shape{0, 0, 1};
  Vec origin;  // lower corner of the covered box
  double h = 0.0;

  /// Grid over the centered box [-half_width, half_width]^n.
  static GridLayout centered(int dim, double half_width, int cells_per_axis);

  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) s *= static_cast<std::size_t>(shape[i]);
    return s;
  }
  std::size_t flat(int i0, int i1, int i2 = 0) const {
    std::size_t idx = static_cast<std::size_t>(i0);
    idx = idx * shape[1] + static_cast<std::size_t>(i1);
    if (n == 3) idx = idx * shape[2] + static_cast<std::size_t>(i2);
    return idx;
  }
  Vec point(std::size_t flat_index) const {
    std::array<int, 3> idx{0, 0, 0};
    if (n == 3) {
      idx[2] = static_cast<int>(flat_index % shape[2]);
      flat_index /= shape[2];
    }
    idx[1] = static_cast<int>(flat_index % shape[1]);
    idx[0] = static_cast<int>(flat_index / shape[1]);
    Vec x = Vec::zero(n);
    for (int a = 0; a < n; ++a) x[a] = origin[a] + (idx[a] + 0.5) * h;
    return x;
  }
  double cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= h;
    return v;
  }
  bool operator==(const GridLayout& o) const {
    return n == o.n && shape == o.shape && h == o.h &&
           origin.v == o.origin.v;
  }
};

/// Whether a field represents data supported in M (extended by zero to
/// the padded box M1) or a general function on all of M1.
enum class DomainTag { FieldOnM, FieldOnM1 };

/// Real double-precision samples on a GridLayout.
struct ScalarField {
  GridLayout grid;
  DomainTag tag = DomainTag::FieldOnM1;
  std::vector<double> values;

  static ScalarField zeros(const GridLayout& g, DomainTag tag = DomainTag::FieldOnM1) {
    ScalarField f;
    f.grid = g;
    f.tag = tag;
    f.values.assign(g.size(), 0.0);
    return f;
  }
};

/// Discrete L2 inner product, h^n-weighted.
double field_inner(const ScalarField& a, const ScalarField& b);
double field_norm(const ScalarField& a);

/// Zeroes samples outside [-half_width, half_width]^n and tags the field
/// as M-supported.
void mask_to_box(ScalarField& f, double half_width);
std::vector<std::size_t> masked_indices(const GridLayout& g, double half_width);

void check_finite(const ScalarField& f, const char* what);

}  // namespace gradon
