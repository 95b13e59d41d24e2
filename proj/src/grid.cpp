#include "gradon/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gradon {

GridLayout GridLayout::centered(int dim, double half_width, int cells_per_axis) {
  if (dim != 2 && dim != 3) throw ConfigError("grid dimension must be 2 or 3");
  if (cells_per_axis < 2) throw ConfigError("grid needs at least 2 cells per axis");
  if (!(half_width > 0.0)) throw ConfigError("grid half-width must be positive");
  GridLayout g;
  g.n = dim;
  g.shape = {cells_per_axis, cells_per_axis, dim == 3 ? cells_per_axis : 1};
  g.h = 2.0 * half_width / cells_per_axis;
  g.origin = Vec::zero(dim);
  for (int i = 0; i < dim; ++i) g.origin[i] = -half_width;
  return g;
}

double field_inner(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid == b.grid)) throw NumericalError("inner product of mismatched grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s * a.grid.cell_volume();
}

double field_norm(const ScalarField& a) { return std::sqrt(field_inner(a, a)); }

void mask_to_box(ScalarField& f, double half_width) {
  const auto& g = f.grid;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    Vec x = g.point(i);
    bool inside = true;
    for (int a = 0; a < g.n; ++a)
      if (std::abs(x[a]) > half_width) { inside = false; break; }
    if (!inside) f.values[i] = 0.0;
  }
  f.tag = DomainTag::FieldOnM;
}

std::vector<std::size_t> masked_indices(const GridLayout& g, double half_width) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec x = g.point(i);
    bool inside = true;
    for (int a = 0; a < g.n; ++a)
      if (std::abs(x[a]) > half_width) { inside = false; break; }
    if (inside) idx.push_back(i);
  }
  return idx;
}

void check_finite(const ScalarField& f, const char* what) {
  for (double v : f.values)
    if (!std::isfinite(v))
      throw NumericalError(std::string(what) + ": non-finite sample");
}

}  // namespace gradon
