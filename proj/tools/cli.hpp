#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sstep::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_not_converged = 2 };

/// Full command line without the program name, e.g. {"solve", "--s", "3"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_solve(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_gen(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_info(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Long flag names registered for a subcommand ("solve", "gen", "info").
std::vector<std::string> flag_names(const std::string& subcommand);
std::string help_text(const std::string& subcommand);

/// Path of the singular-value file written next to a generated matrix.
std::string sigma_sidecar_path(const std::string& matrix_path);

}  // namespace sstep::cli
