#include "gradon/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace gradon {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& s,
                            const char* want) {
  throw ConfigError("config: key '" + key + "' expects " + want + ", got '" +
                    s + "'");
}

double parse_double(const std::string& key, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    bad_value(key, s, "a number");
  return v;
}

long parse_int(const std::string& key, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    bad_value(key, s, "an integer");
  return v;
}

std::uint64_t parse_uint64(const std::string& key, const std::string& s) {
  if (s.empty() || s[0] == '-') bad_value(key, s, "a nonnegative integer");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE)
    bad_value(key, s, "a nonnegative integer");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_value(key, s, "a comma-separated number list");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) bad_value(key, s, "a comma-separated number list");
  return out;
}

Vec parse_vec(const std::string& key, const std::string& s, int dim) {
  const std::vector<double> c = parse_list(key, s);
  if (static_cast<int>(c.size()) != dim)
    throw ConfigError("config: key '" + key + "' needs " +
                      std::to_string(dim) + " components, got " +
                      std::to_string(c.size()));
  Vec x = Vec::zero(dim);
  for (int i = 0; i < dim; ++i) x[i] = c[i];
  return x;
}

void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value) {
  const int d = cfg.dimension;
  if (key == "dimension") {
    // handled on the first pass; re-parsed here only for the error check
    cfg.dimension = static_cast<int>(parse_int(key, value));
  } else if (key == "grid_half_width") {
    cfg.grid_half_width = parse_double(key, value);
  } else if (key == "grid_resolution") {
    cfg.grid_resolution = static_cast<int>(parse_int(key, value));
  } else if (key == "pad_factor") {
    cfg.pad_factor = parse_double(key, value);
  } else if (key == "defining") {
    cfg.defining_name = value;
  } else if (key == "bump_center") {
    cfg.bump_center = parse_vec(key, value, d);
  } else if (key == "bump_radius") {
    cfg.bump_radius = parse_double(key, value);
  } else if (key == "bump_amplitude") {
    cfg.bump_amplitude = parse_double(key, value);
  } else if (key == "epsilon") {
    cfg.epsilon = parse_double(key, value);
  } else if (key == "weight") {
    cfg.weight_name = value;
  } else if (key == "weight_value") {
    cfg.weight_value = parse_double(key, value);
  } else if (key == "weight_base") {
    cfg.weight_base = parse_double(key, value);
  } else if (key == "weight_amplitude") {
    cfg.weight_amplitude = parse_double(key, value);
  } else if (key == "weight_sigma") {
    cfg.weight_sigma = parse_double(key, value);
  } else if (key == "weight_center") {
    cfg.weight_center = parse_vec(key, value, d);
  } else if (key == "n_s") {
    cfg.n_s = value == "auto" ? 0 : static_cast<int>(parse_int(key, value));
  } else if (key == "n_theta") {
    cfg.n_theta = static_cast<int>(parse_int(key, value));
  } else if (key == "delta_width_factor") {
    cfg.delta_width_factor = parse_double(key, value);
  } else if (key == "cg_tol") {
    cfg.cg_tol = parse_double(key, value);
  } else if (key == "cg_max_iter") {
    cfg.cg_max_iter = static_cast<int>(parse_int(key, value));
  } else if (key == "lambda_ladder") {
    cfg.lambda_ladder = parse_list(key, value);
  } else if (key == "delta_ladder") {
    cfg.delta_ladder = parse_list(key, value);
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(parse_int(key, value));
  } else if (key == "seed") {
    cfg.seed = parse_uint64(key, value);
  } else if (key == "phantom_radius") {
    cfg.phantom_radius = parse_double(key, value);
  } else if (key == "phantom_sigma") {
    cfg.phantom_sigma = parse_double(key, value);
  } else if (key == "phantom_center") {
    cfg.phantom_center = parse_vec(key, value, d);
  } else if (key == "probe_point") {
    cfg.probe_point = parse_vec(key, value, d);
  } else if (key == "probe_direction") {
    cfg.probe_direction = parse_vec(key, value, d);
  } else if (key == "window_radius") {
    cfg.window_radius = parse_double(key, value);
  } else if (key == "bolker_samples") {
    cfg.bolker_samples = static_cast<int>(parse_int(key, value));
  } else if (key == "fbi_fan") {
    cfg.fbi_fan = static_cast<int>(parse_int(key, value));
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void check(bool ok, const char* message) {
  if (!ok) throw ConfigError(std::string("config: ") + message);
}

}  // namespace

GridLayout RunConfig::grid() const {
  return GridLayout::centered(dimension, grid_half_width * (1.0 + pad_factor),
                              grid_resolution);
}

Box RunConfig::padded_box() const {
  return Box::centered(dimension, grid_half_width * (1.0 + pad_factor));
}

DefiningFunction RunConfig::defining() const {
  if (defining_name == "euclidean") return make_euclidean(dimension);
  return make_perturbed(bump(), epsilon);
}

Weight RunConfig::weight() const {
  if (weight_name == "constant")
    return make_constant_weight(dimension, weight_value);
  return make_gaussian_modulated_weight(dimension, weight_base,
                                        weight_amplitude, weight_sigma,
                                        weight_center);
}

BumpFunction RunConfig::bump() const {
  BumpFunction a;
  a.n = dimension;
  a.center = bump_center;
  a.radius = bump_radius;
  a.amplitude = bump_amplitude;
  return a;
}

SinogramLayout RunConfig::sinogram_layout() const {
  SinogramLayout lay = make_sinogram_layout(defining(), grid(), n_theta);
  if (n_s > lay.n_s) {
    const int extra = n_s - lay.n_s;
    lay.s0 -= (extra / 2) * lay.ds;
    lay.n_s = n_s;
  }
  return lay;
}

void validate_run_config(const RunConfig& cfg) {
  check(cfg.dimension == 2 || cfg.dimension == 3, "dimension must be 2 or 3");
  check(std::isfinite(cfg.grid_half_width) && cfg.grid_half_width > 0.0,
        "grid_half_width must be positive");
  check(cfg.grid_resolution >= 8, "grid_resolution must be at least 8");
  check(cfg.pad_factor == 0.25,
        "pad_factor must be 0.25; the solver's norms and boundary roll-off "
        "assume a 25% padding ring");
  check(cfg.delta_width_factor == 2.0,
        "delta_width_factor must be 2; the smoothed delta spans two cells");

  check(cfg.defining_name == "euclidean" || cfg.defining_name == "perturbed",
        "defining must be 'euclidean' or 'perturbed'");
  check(cfg.bump_center.n == cfg.dimension, "bump_center dimension mismatch");
  check(std::isfinite(cfg.bump_radius) && cfg.bump_radius > 0.0,
        "bump_radius must be positive");
  check(std::isfinite(cfg.bump_amplitude), "bump_amplitude must be finite");
  check(std::isfinite(cfg.epsilon), "epsilon must be finite");

  check(cfg.weight_name == "constant" ||
            cfg.weight_name == "gaussian-modulated",
        "weight must be 'constant' or 'gaussian-modulated'");
  check(cfg.weight_center.n == cfg.dimension, "weight_center dimension mismatch");
  if (cfg.weight_name == "constant") {
    check(std::isfinite(cfg.weight_value) && cfg.weight_value != 0.0,
          "weight_value must be nonzero");
  } else {
    check(std::isfinite(cfg.weight_base), "weight_base must be finite");
    check(std::isfinite(cfg.weight_amplitude),
          "weight_amplitude must be finite");
    check(std::isfinite(cfg.weight_sigma) && cfg.weight_sigma > 0.0,
          "weight_sigma must be positive");
  }

  check(cfg.n_s >= 0, "n_s must be 'auto' or a positive bin count");
  check(cfg.n_theta >= 4, "n_theta must be at least 4");
  check(std::isfinite(cfg.cg_tol) && cfg.cg_tol > 0.0 && cfg.cg_tol < 1.0,
        "cg_tol must lie in (0, 1)");
  check(cfg.cg_max_iter >= 1, "cg_max_iter must be at least 1");

  check(!cfg.lambda_ladder.empty(), "lambda_ladder must be nonempty");
  for (std::size_t i = 0; i < cfg.lambda_ladder.size(); ++i) {
    check(std::isfinite(cfg.lambda_ladder[i]) && cfg.lambda_ladder[i] > 0.0,
          "lambda_ladder entries must be positive");
    check(i == 0 || cfg.lambda_ladder[i] > cfg.lambda_ladder[i - 1],
          "lambda_ladder must increase strictly");
  }
  check(!cfg.delta_ladder.empty(), "delta_ladder must be nonempty");
  for (std::size_t i = 0; i < cfg.delta_ladder.size(); ++i) {
    check(std::isfinite(cfg.delta_ladder[i]) && cfg.delta_ladder[i] >= 0.0,
          "delta_ladder entries must be nonnegative");
    check(i == 0 || cfg.delta_ladder[i] > cfg.delta_ladder[i - 1],
          "delta_ladder must increase strictly");
  }

  check(!cfg.output_dir.empty(), "output_dir must be nonempty");
  check(cfg.threads >= 0, "threads must be nonnegative (0 = hardware)");
  check(std::isfinite(cfg.phantom_radius) && cfg.phantom_radius > 0.0,
        "phantom_radius must be positive");
  check(std::isfinite(cfg.phantom_sigma) && cfg.phantom_sigma > 0.0,
        "phantom_sigma must be positive");
  check(cfg.phantom_center.n == cfg.dimension,
        "phantom_center dimension mismatch");
  check(cfg.probe_point.n == cfg.dimension, "probe_point dimension mismatch");
  check(cfg.probe_direction.n == cfg.dimension,
        "probe_direction dimension mismatch");
  check(cfg.probe_direction.norm() > 0.0, "probe_direction must be nonzero");
  check(std::isfinite(cfg.window_radius) && cfg.window_radius > 0.0,
        "window_radius must be positive");
  check(cfg.bolker_samples >= 4, "bolker_samples must be at least 4");
  check(cfg.fbi_fan >= 2, "fbi_fan must be at least 2");

  // constructor-level admissibility (perturbation size, weight sign)
  cfg.defining();
  if (cfg.weight_name != "constant") {
    Weight w = cfg.weight();
    w.validate(cfg.padded_box(), 8, 16);
  }
  if (cfg.n_s > 0) {
    const int derived = make_sinogram_layout(cfg.defining(), cfg.grid(),
                                             cfg.n_theta)
                            .n_s;
    if (cfg.n_s < derived)
      throw ConfigError("config: n_s = " + std::to_string(cfg.n_s) +
                        " is smaller than the " + std::to_string(derived) +
                        " bins the geometry needs");
  }
}

RunConfig parse_run_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": missing key before '='");
    if (!kv.emplace(key, value).second)
      throw ConfigError("config: duplicate key '" + key + "'");
  }

  RunConfig cfg;
  if (auto it = kv.find("dimension"); it != kv.end()) {
    cfg.dimension = static_cast<int>(parse_int("dimension", it->second));
    if (cfg.dimension == 3) {
      cfg.bump_center = Vec::zero(3);
      cfg.weight_center = Vec::zero(3);
      cfg.phantom_center = Vec::zero(3);
      cfg.probe_point = Vec::zero(3);
      cfg.probe_direction = Vec::of(1.0, 0.0, 0.0);
    }
  }
  for (const auto& [key, value] : kv) apply_key(cfg, key, value);
  validate_run_config(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace gradon
