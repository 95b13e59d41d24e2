#include "gradon/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "gradon/io.hpp"
#include "gradon/microlocal.hpp"
#include "gradon/parallel.hpp"
#include "gradon/phantoms.hpp"
#include "gradon/recon.hpp"

namespace gradon {

namespace {

std::string out_path(const RunConfig& cfg, const std::string& file) {
  std::filesystem::create_directories(cfg.output_dir);
  return (std::filesystem::path(cfg.output_dir) / file).string();
}

double field_mass(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume();
}

ScalarField read_field_for(const RunConfig& cfg, const char* command,
                           const std::string& path) {
  ScalarField f = read_field(path);
  if (!(f.grid == cfg.grid()))
    throw ConfigError(std::string(command) +
                      ": input field grid does not match the config grid");
  return f;
}

Sinogram read_sinogram_for(const RunConfig& cfg, const char* command,
                           const std::string& path) {
  Sinogram g = read_sinogram(path);
  if (g.layout.n != cfg.dimension)
    throw ConfigError(std::string(command) +
                      ": sinogram dimension does not match the config");
  return g;
}

}  // namespace

CommandResult cmd_phantom(const RunConfig& cfg, const std::string& name) {
  const ScalarField f = make_phantom(name, cfg.grid(), cfg.phantom_center,
                                     cfg.phantom_radius, cfg.phantom_sigma);
  CommandResult r;
  r.command = "phantom";
  r.outputs = {out_path(cfg, name + ".grtf"), out_path(cfg, name + ".csv")};
  write_field(r.outputs[0], f);
  write_field_csv(r.outputs[1], f);
  r.metric_name = "mass";
  r.metric_value = field_mass(f);
  return r;
}

CommandResult cmd_forward(const RunConfig& cfg, const std::string& field_path) {
  const ScalarField f = read_field_for(cfg, "forward", field_path);
  RadonSystem sys(cfg.defining(), cfg.weight(), cfg.grid(),
                  cfg.sinogram_layout());
  const Sinogram g = sys.forward(f);
  CommandResult r;
  r.command = "forward";
  r.outputs = {out_path(cfg, "sinogram.grts"), out_path(cfg, "sinogram.csv")};
  write_sinogram(r.outputs[0], g);
  write_sinogram_csv(r.outputs[1], g);
  r.metric_name = "max_abs";
  for (double v : g.values) r.metric_value = std::max(r.metric_value, std::abs(v));
  return r;
}

CommandResult cmd_adjoint(const RunConfig& cfg, const std::string& sino_path) {
  const Sinogram g = read_sinogram_for(cfg, "adjoint", sino_path);
  RadonSystem sys(cfg.defining(), cfg.weight(), cfg.grid(), g.layout);
  const ScalarField b = sys.adjoint(g);
  CommandResult r;
  r.command = "adjoint";
  r.outputs = {out_path(cfg, "backprojection.grtf"),
               out_path(cfg, "backprojection.csv")};
  write_field(r.outputs[0], b);
  write_field_csv(r.outputs[1], b);
  r.metric_name = "l2_norm";
  r.metric_value = field_norm(b);
  return r;
}

CommandResult cmd_recon(const RunConfig& cfg, const std::string& sino_path) {
  const Sinogram g = read_sinogram_for(cfg, "recon", sino_path);
  RadonSystem sys(cfg.defining(), cfg.weight(), cfg.grid(), g.layout);
  const CgResult cg = cg_normal_solve(sys, g, cfg.cg_tol, cfg.cg_max_iter);

  CommandResult r;
  r.command = "recon";
  r.outputs = {out_path(cfg, "recon.grtf"), out_path(cfg, "recon.csv"),
               out_path(cfg, "iterations.csv")};
  write_field(r.outputs[0], cg.solution);
  write_field_csv(r.outputs[1], cg.solution);

  std::ofstream log(r.outputs[2], std::ios::binary);
  if (!log) throw ConfigError("cannot open iteration log: " + r.outputs[2]);
  log << "iteration,relative_residual,energy\n";
  const std::size_t rows = std::min(cg.residuals.size(), cg.energies.size());
  for (std::size_t i = 0; i < rows; ++i)
    log << i + 1 << ',' << csv_number(cg.residuals[i]) << ','
        << csv_number(cg.energies[i]) << '\n';

  r.metric_name = "relative_residual";
  r.metric_value = cg.residuals.empty() ? 1.0 : cg.residuals.back();
  if (!cg.converged) {
    r.status = "FAIL";
    r.invariant = cg.stagnated ? "cg-stagnation" : "cg-max-iterations";
    r.exit_code = 2;
  }
  return r;
}

CommandResult cmd_bolker(const RunConfig& cfg) {
  const Box inner = Box::centered(cfg.dimension, cfg.grid_half_width);
  const Box padded = cfg.padded_box();
  const BolkerReport rep = check_bolker(cfg.defining(), inner,
                                        cfg.bolker_samples, cfg.n_theta,
                                        &padded);

  CommandResult r;
  r.command = "bolker-check";
  r.outputs = {out_path(cfg, "bolker.csv")};
  std::ofstream csv(r.outputs[0], std::ios::binary);
  if (!csv) throw ConfigError("cannot open bolker csv: " + r.outputs[0]);
  csv << "check,ok,value\n";
  auto row = [&](const char* name, bool ok, double value) {
    csv << name << ',' << (ok ? 1 : 0) << ',' << csv_number(value) << '\n';
  };
  row("homogeneity", rep.homogeneity.ok, rep.homogeneity.worst);
  row("gradient-nonzero", rep.gradient_nonzero.ok, rep.gradient_nonzero.worst);
  row("hessian-positive", rep.hessian_positive.ok, rep.hessian_positive.worst);
  row("derivative-consistency", rep.derivative_consistency.ok,
      rep.derivative_consistency.worst);
  row("bolker-injectivity", rep.injectivity_ok, rep.injectivity_margin);
  row("bolker-surjectivity", rep.surjectivity_ok, rep.surjectivity_worst_gap);
  row("bolker-surjectivity-padded", rep.surjectivity_ok,
      rep.surjectivity_worst_gap_padded);

  r.metric_name = "injectivity_margin";
  r.metric_value = rep.injectivity_margin;
  if (!rep.all_ok()) {
    r.status = "FAIL";
    r.exit_code = 2;
    if (!rep.homogeneity.ok) r.invariant = "homogeneity";
    else if (!rep.gradient_nonzero.ok) r.invariant = "gradient-nonzero";
    else if (!rep.hessian_positive.ok) r.invariant = "hessian-positive";
    else if (!rep.injectivity_ok) r.invariant = "bolker-injectivity";
    else r.invariant = "bolker-surjectivity";
  }
  return r;
}

CommandResult cmd_symbol(const RunConfig& cfg) {
  RadonSystem sys(cfg.defining(), cfg.weight(), cfg.grid(),
                  cfg.sinogram_layout());
  const SymbolProbe probe =
      probe_symbol(sys, cfg.probe_point, cfg.probe_direction.normalized(),
                   cfg.lambda_ladder, cfg.window_radius);
  CommandResult r;
  r.command = "symbol-check";
  r.outputs = {out_path(cfg, "symbol.csv")};
  write_probe_csv(r.outputs[0], probe);
  r.metric_name = "ratio_corrected";
  r.metric_value = probe.ratio_corrected.back();
  return r;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  // The family adds the config bump on top of the base definition, so
  // delta = 0 reproduces the base exactly whether that base is euclidean
  // or already perturbed.
  const double base_eps =
      cfg.defining_name == "perturbed" ? cfg.epsilon : 0.0;
  const BumpFunction bump = cfg.bump();
  PerturbationFamily fam;
  fam.defining = [bump, base_eps](double d) {
    return make_perturbed(bump, base_eps + d);
  };
  fam.weight = [w = cfg.weight()](double) { return w; };

  const PerturbationSweep sweep =
      perturbation_sweep(cfg.defining(), cfg.weight(), fam, cfg.delta_ladder,
                         cfg.grid(), cfg.n_theta, cfg.seed);

  CommandResult r;
  r.command = "perturb-sweep";
  r.outputs = {out_path(cfg, "sweep.csv")};
  write_sweep_csv(r.outputs[0], sweep);
  std::ofstream tail(r.outputs[0], std::ios::binary | std::ios::app);
  tail << "slope," << csv_number(sweep.slope) << '\n';
  if (!tail.good())
    throw ConfigError("failed while writing sweep csv: " + r.outputs[0]);
  r.metric_name = "slope";
  r.metric_value = sweep.slope;
  return r;
}

CommandResult cmd_fbi(const RunConfig& cfg, const std::string& field_path) {
  const ScalarField f = read_field_for(cfg, "fbi-probe", field_path);
  std::vector<Vec> fan;
  for (const Direction& d : sample_directions(cfg.dimension, cfg.fbi_fan))
    fan.push_back(d.u);
  const FbiScan scan =
      decay_scan(f, cfg.probe_point, fan, cfg.lambda_ladder);
  CommandResult r;
  r.command = "fbi-probe";
  r.outputs = {out_path(cfg, "fbi.csv")};
  write_scan_csv(r.outputs[0], scan);
  r.metric_name = "suspect_directions";
  for (const DirectionDecay& d : scan.directions)
    if (d.wavefront_suspect) r.metric_value += 1.0;
  return r;
}

int run_command(const std::string& command, const RunConfig& cfg,
                const std::vector<std::string>& inputs, std::ostream& out) {
  try {
    validate_run_config(cfg);
    set_thread_count(cfg.threads);
    auto need_input = [&](const char* what) -> const std::string& {
      if (inputs.empty())
        throw ConfigError(command + ": missing input (" + what + ")");
      return inputs.front();
    };

    CommandResult r;
    if (command == "phantom") {
      r = cmd_phantom(cfg, need_input("phantom name"));
    } else if (command == "forward") {
      r = cmd_forward(cfg, need_input("field file"));
    } else if (command == "adjoint") {
      r = cmd_adjoint(cfg, need_input("sinogram file"));
    } else if (command == "recon") {
      r = cmd_recon(cfg, need_input("sinogram file"));
    } else if (command == "bolker-check") {
      r = cmd_bolker(cfg);
    } else if (command == "symbol-check") {
      r = cmd_symbol(cfg);
    } else if (command == "perturb-sweep") {
      r = cmd_sweep(cfg);
    } else if (command == "fbi-probe") {
      r = cmd_fbi(cfg, need_input("field file"));
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }

    out << "RESULT command=" << r.command << " status=" << r.status;
    if (!r.invariant.empty()) out << " invariant=" << r.invariant;
    out << " metric=" << r.metric_name << " value="
        << csv_number(r.metric_value) << " outputs=";
    for (std::size_t i = 0; i < r.outputs.size(); ++i)
      out << (i ? ";" : "") << r.outputs[i];
    out << '\n';
    return r.exit_code;
  } catch (const ConfigError& e) {
    out << "RESULT command=" << command
        << " status=ERROR code=1 reason=" << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    out << "RESULT command=" << command
        << " status=ERROR code=2 reason=" << e.what() << '\n';
    return 2;
  }
}

}  // namespace gradon
