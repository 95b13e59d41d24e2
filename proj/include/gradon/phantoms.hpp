#pragma once

#include <string>

#include "gradon/grid.hpp"

namespace gradon {

/// Indicator of the disk |x - center| <= radius (n = 2), rasterized by
/// cell-area coverage: each cell holds the fraction of an 8x8 sub-lattice
/// that lands inside, so the grid sum times h^2 tracks the true area and
/// the boundary carries no lattice staircase.
ScalarField make_disk_phantom(const GridLayout& g, const Vec& center,
                              double radius);

/// Ball indicator in n = 3, coverage-rasterized on a 4x4x4 sub-lattice.
ScalarField make_ball_phantom(const GridLayout& g, const Vec& center,
                              double radius);

/// exp(-|x - center|^2 / (2 sigma^2)), sampled at cell centers (the
/// function is smooth, so plain sampling is already second order).
ScalarField make_gaussian_phantom(const GridLayout& g, const Vec& center,
                                  double sigma);

/// Standard ten-ellipse head phantom on [-1, 1]^2 (n = 2 only), in the
/// high-contrast parameterization whose values lie in [0, 1]: a unit-value
/// skull ellipse, a -0.8 interior, two -0.2 cavities and five +0.1 blobs.
/// The full parameter table (semi-axes, center, rotation, additive value)
/// is listed in the README. Coverage-rasterized like the disk.
ScalarField make_shepp_logan_phantom(const GridLayout& g);

/// Dispatch by name: "disk", "gaussian", "shepp-logan" (n = 2), "ball"
/// (n = 3). center/radius apply to disk and ball, center/sigma to the
/// gaussian; shepp-logan ignores both. Unknown names throw ConfigError.
ScalarField make_phantom(const std::string& name, const GridLayout& g,
                         const Vec& center, double radius, double sigma);

}  // namespace gradon
