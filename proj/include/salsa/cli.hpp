#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "salsa/bench.hpp"
#include "salsa/convolution.hpp"

namespace salsa::cli {

enum class Subcommand { Run, Deblur, PsfDump };

struct CliConfig {
  Subcommand subcommand = Subcommand::Run;
  std::filesystem::path image_path;
  std::optional<std::string> experiment_id;
  std::optional<BlurKind> blur;
  PsfParams psf_params;
  std::optional<double> sigma2;
  std::optional<double> tau;
  /// Explicit mu, or 0.1 * tau once tau is known when --mu auto was given.
  std::optional<double> mu;
  bool mu_auto = false;
  std::vector<SolverKind> solvers;
  std::optional<int> max_iters;
  std::optional<double> rel_tol;
  std::optional<double> target_objective;
  std::optional<std::uint64_t> seed;
  bool penalize_approximation = true;
  std::filesystem::path out_dir = "salsa_out";
};

/// Bad command line. For --help the message is the help text and
/// exit_code() is 0; otherwise it names the offending flag and exit_code() is 2.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& message, int exit_code) : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

/// args[0] is the program name.
CliConfig parse_args(const std::vector<std::string>& args);

/// Experiment description for `run` (preset plus overrides) or `deblur`.
ExperimentSpec build_experiment_spec(const CliConfig& config);

/// Executes the command. Returns 0 iff every requested solver finished
/// without diverging; 1 on divergence, 3 on I/O or input errors.
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with usage errors reported on `err`.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace salsa::cli
