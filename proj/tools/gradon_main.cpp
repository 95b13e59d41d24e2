#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradon/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gradon: generalized Radon transforms over level-set families"};
  app.fallthrough();
  std::string config_path;
  std::string out_dir;
  app.add_option("--config", config_path,
                 "run configuration file (key = value lines)");
  app.add_option("--out", out_dir, "output directory, overriding the config");
  app.require_subcommand(1);

  std::string phantom_name;
  std::string input_path;
  CLI::App* cmd = app.add_subcommand(
      "phantom", "rasterize a named phantom and write it as .grtf + .csv");
  cmd->add_option("name", phantom_name, "disk | gaussian | shepp-logan | ball")
      ->required();
  cmd = app.add_subcommand("forward", "apply the transform to a field file");
  cmd->add_option("field", input_path, "input .grtf field")->required();
  cmd = app.add_subcommand("adjoint", "backproject a sinogram file");
  cmd->add_option("sinogram", input_path, "input .grts sinogram")->required();
  cmd = app.add_subcommand(
      "recon", "invert a sinogram by preconditioned CG on the normal equations");
  cmd->add_option("sinogram", input_path, "input .grts sinogram")->required();
  app.add_subcommand("bolker-check",
                     "sample the defining-function and Bolker conditions");
  app.add_subcommand("symbol-check",
                     "oscillatory probe of the normal operator's symbol");
  app.add_subcommand("perturb-sweep",
                     "operator-gap and margin sweep over the delta ladder");
  cmd = app.add_subcommand("fbi-probe",
                           "directional decay scan of a field at probe_point");
  cmd->add_option("field", input_path, "input .grtf field")->required();
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    gradon::RunConfig cfg;
    if (!config_path.empty()) cfg = gradon::load_run_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    std::vector<std::string> inputs;
    if (command == "phantom") inputs.push_back(phantom_name);
    else if (!input_path.empty()) inputs.push_back(input_path);
    return gradon::run_command(command, cfg, inputs, std::cout);
  } catch (const gradon::ConfigError& e) {
    std::cout << "RESULT command=" << command
              << " status=ERROR code=1 reason=" << e.what() << '\n';
    return 1;
  }
}
