#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dimerwork/ks.hpp"
#include "dimerwork/model.hpp"
#include "dimerwork/sweep.hpp"

namespace dimerwork::cli {

enum ExitCode : int { kOk = 0, kBadArguments = 2, kNumericalFailure = 3, kIoFailure = 4 };

/// Everything a subcommand needs; defaults are the standard drive
/// (A0 = J, Atau = 7J) at kT = 2J.
struct RunConfig {
  DriveParams drive;
  double kT = 2.0;
  ProtocolKind protocol = ProtocolKind::Exact;
  ProtocolOptions options;
  std::size_t steps = 0;  // 0 = default policy
  bool auto_steps = false;
  unsigned workers = 0;
  std::string out;
  bool strict = false;

  SweepGrid grid;
  bool include_timing = true;

  double populations_kT_min = 1e-3;
  double populations_kT_max = 1e6;
  std::size_t populations_points = 91;
  std::string dump_iterations;
};

/// Applies a JSON configuration document on top of `cfg`.
/// Throws DomainError on unknown keys or ill-typed values.
void apply_config_json(const std::string& text, RunConfig& cfg);

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dimerwork::cli
