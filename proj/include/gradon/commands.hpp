#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "gradon/config.hpp"

namespace gradon {

/// What a CLI command reports back. `status` is "PASS" or "FAIL"; a fail
/// names the broken invariant and carries exit code 2. Validation problems
/// are not represented here — they throw ConfigError and map to exit 1.
struct CommandResult {
  std::string command;
  std::string status = "PASS";
  std::string metric_name;
  double metric_value = 0.0;
  std::vector<std::string> outputs;
  std::string invariant;  // set when status == "fail"
  int exit_code = 0;
};

CommandResult cmd_phantom(const RunConfig& cfg, const std::string& name);
CommandResult cmd_forward(const RunConfig& cfg, const std::string& field_path);
CommandResult cmd_adjoint(const RunConfig& cfg, const std::string& sino_path);
CommandResult cmd_recon(const RunConfig& cfg, const std::string& sino_path);
CommandResult cmd_bolker(const RunConfig& cfg);
CommandResult cmd_symbol(const RunConfig& cfg);
CommandResult cmd_sweep(const RunConfig& cfg);
CommandResult cmd_fbi(const RunConfig& cfg, const std::string& field_path);

/// Dispatches one command by its CLI name, prints exactly one line
///   RESULT command=<name> status=<ok|fail|error> ...
/// to `out`, and returns the process exit code: 0 success, 1 validation
/// failure (ConfigError), 2 numerical failure (NumericalError, CG
/// stagnation, Bolker failure). `inputs` holds the command's positional
/// file arguments.
int run_command(const std::string& command, const RunConfig& cfg,
                const std::vector<std::string>& inputs, std::ostream& out);

}  // namespace gradon
