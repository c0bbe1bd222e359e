#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dimerwork/ks.hpp"
#include "dimerwork/model.hpp"

namespace dimerwork {

/// Evenly spaced values from `first` to `last` inclusive.
std::vector<double> linspace(double first, double last, std::size_t count);

struct SweepGrid {
  std::vector<double> U_values = linspace(0.0, 10.0, 40);
  std::vector<double> tau_values = linspace(0.1, 10.0, 40);
  std::vector<double> kT_values = {0.2, 2.0, 20.0};
  std::vector<ProtocolKind> protocols = {ProtocolKind::Exact};

  /// Throws DomainError on empty or non-increasing lists, tau <= 0, kT <= 0, U < 0.
  void validate() const;
  std::size_t point_count() const;
};

/// Per-point settings shared by the whole sweep.
struct SweepSettings {
  DriveParams drive;  // U and tau are overwritten per point
  ProtocolOptions options;
  /// 0 selects default_steps(tau).
  std::size_t steps = 0;
  bool auto_steps = false;
};

struct SweepRow {
  ProtocolKind protocol = ProtocolKind::Exact;
  double kT = 0.0;
  double U = 0.0;
  double tau = 0.0;
  double W = 0.0;
  double n1_tau = 0.0;
  double n2_tau = 0.0;
  std::size_t scf_iterations = 0;
  bool converged = true;
  double wall_ms = 0.0;
};

struct SweepFailure {
  ProtocolKind protocol = ProtocolKind::Exact;
  double kT = 0.0;
  double U = 0.0;
  double tau = 0.0;
  std::string message;
};

struct SweepResult {
  /// Ordered by (protocol, kT, U, tau).
  std::vector<SweepRow> rows;
  std::vector<SweepFailure> failures;
};

/// Step count used for one point under `settings`.
std::size_t steps_for(const SweepSettings& settings, const DriveParams& p, double kT);

/// Computes a single grid point.
SweepRow run_point(ProtocolKind protocol, double kT, double U, double tau,
                   const SweepSettings& settings);

/// Evaluates every grid point on `workers` threads (0 = hardware concurrency).
/// Output is independent of the worker count.
SweepResult run_sweep(const SweepGrid& grid, const SweepSettings& settings, unsigned workers);

inline constexpr const char* kSweepCsvHeader =
    "protocol,kT_over_J,U_over_J,tauJ,W_over_J,n1_tau,n2_tau,scf_iterations,converged,wall_ms";

/// One header line, then one line per row; 12 significant digits.
/// With include_timing == false the wall_ms column is written as 0.
void write_sweep_csv(std::ostream& out, const SweepResult& result, bool include_timing = true);

/// Parses a CSV produced by write_sweep_csv. Throws DomainError on schema mismatch.
SweepResult read_sweep_csv(std::istream& in);

struct RelativeErrorRow {
  ProtocolKind protocol = ProtocolKind::Exact;
  double kT = 0.0;
  double U = 0.0;
  double tau = 0.0;
  double relative_error = 0.0;
};

/// |W_a - W_e| / max(|W_e|, 1e-6 J), matched row by row on (kT, U, tau).
/// `approx` must hold a single protocol. Throws DomainError when the grids differ.
std::vector<RelativeErrorRow> relative_error_map(const SweepResult& approx,
                                                 const SweepResult& exact);

/// Rows of one protocol and temperature.
SweepResult select(const SweepResult& result, ProtocolKind protocol, double kT);

/// printf("%.12g")
std::string format_number(double x);

}  // namespace dimerwork
