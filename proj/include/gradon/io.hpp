#pragma once

#include <string>

#include "gradon/grid.hpp"
#include "gradon/transform.hpp"

namespace gradon {

/// Field container: magic "GRTF", version u8, n u8, shape u32 per axis,
/// origin f64 per axis, spacing f64, then row-major f64 values,
/// little-endian throughout.
void write_field(const std::string& path, const ScalarField& f);
ScalarField read_field(const std::string& path);

/// Sinogram container: magic "GRTS", version u8, n u8, n_s u32, n_theta
/// u32, s0 f64, ds f64, direction table (n f64 per direction), then
/// s-major f64 values. Defining-function/weight ids are in-memory only.
void write_sinogram(const std::string& path, const Sinogram& g);
Sinogram read_sinogram(const std::string& path);

/// Plot-ready CSV mirrors (header row, 17 significant digits, '.' decimal).
void write_field_csv(const std::string& path, const ScalarField& f);
void write_sinogram_csv(const std::string& path, const Sinogram& g);

/// One CSV cell for a double: %.17g, locale-independent.
std::string csv_number(double v);

}  // namespace gradon
