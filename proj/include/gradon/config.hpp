#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradon/geometry.hpp"
#include "gradon/transform.hpp"

namespace gradon {

/// One run's worth of settings, read from a flat `key = value` file
/// (one pair per line, `#` starts a comment). Unknown keys and malformed
/// or out-of-range values throw ConfigError naming the key, so a typo can
/// never silently fall back to a default. Every field below carries its
/// default; a missing file section simply keeps them.
///
/// Two keys are pinned to the library's built-in conventions and exist so
/// a config file states the full geometry explicitly:
///   pad_factor         must be 0.25 (the reconstruction norms and the
///                      boundary roll-off assume a 25% padding ring);
///   delta_width_factor must be 2 (the smoothed delta spans two cells).
struct RunConfig {
  int dimension = 2;
  double grid_half_width = 1.0;  // inner box M = [-L, L]^n
  int grid_resolution = 128;     // cells per axis over the padded box
  double pad_factor = 0.25;

  std::string defining_name = "euclidean";  // euclidean | perturbed
  Vec bump_center = Vec::zero(2);
  double bump_radius = 0.6;
  double bump_amplitude = 1.0;
  double epsilon = 0.01;

  std::string weight_name = "constant";  // constant | gaussian-modulated
  double weight_value = 1.0;
  double weight_base = 1.0;
  double weight_amplitude = 0.5;
  double weight_sigma = 0.5;
  Vec weight_center = Vec::zero(2);

  int n_s = 0;  // 0 = derive from the geometry; larger values pad the range
  int n_theta = 180;
  double delta_width_factor = 2.0;

  double cg_tol = 1e-6;
  int cg_max_iter = 200;

  std::vector<double> lambda_ladder = {8.0, 16.0, 24.0, 32.0};
  std::vector<double> delta_ladder = {1e-3, 3.162e-3, 1e-2, 3.162e-2, 1e-1};

  std::string output_dir = "out";
  int threads = 0;  // 0 = hardware; the GRADON_THREADS env var wins
  std::uint64_t seed = 2026;

  double phantom_radius = 1.0;
  double phantom_sigma = 0.3;
  Vec phantom_center = Vec::zero(2);

  Vec probe_point = Vec::zero(2);
  Vec probe_direction = Vec::of(1.0, 0.0);
  double window_radius = 0.2;
  int bolker_samples = 16;
  int fbi_fan = 8;

  /// Grid over the padded box [-L(1+pad), L(1+pad)]^n.
  GridLayout grid() const;
  Box padded_box() const;
  DefiningFunction defining() const;
  Weight weight() const;
  BumpFunction bump() const;
  /// Derived layout, widened symmetrically when n_s asks for more bins.
  SinogramLayout sinogram_layout() const;
};

/// Parses config text and validates every value; throws ConfigError with
/// the offending key in the message.
RunConfig parse_run_config(const std::string& text);

RunConfig load_run_config(const std::string& path);

/// Range and consistency checks shared by the parser and by callers that
/// build a RunConfig in code.
void validate_run_config(const RunConfig& cfg);

}  // namespace gradon
