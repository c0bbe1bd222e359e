#pragma once

// Zero-order Kohn-Sham protocols: the interacting dimer is replaced by a
// formally non-interacting one whose site potentials carry Hartree and
// pseudo-LDA exchange-correlation terms. Work statistics are computed
// entirely inside the KS system.

#include <optional>
#include <string_view>
#include <vector>

#include "dimerwork/dynamics.hpp"
#include "dimerwork/model.hpp"
#include "dimerwork/work.hpp"

namespace dimerwork {

enum class ProtocolKind { Exact, NonInteracting, StaticPLDA, ALDAInspired };

std::string_view to_string(ProtocolKind k);
/// Accepts exact, noninteracting, plda, alda.
ProtocolKind parse_protocol(std::string_view name);

struct KSPotential {
  SitePair v_ext;
  SitePair v_hartree;
  SitePair v_xc;

  SitePair total() const { return v_ext + v_hartree + v_xc; }
};

/// U n / 2. Throws DomainError unless 0 <= n <= 2.
double hartree_potential(double n, double U);

/// -2^{-4/3} (4/3) U n^{1/3}. Throws DomainError for n < 0.
double xc_potential_plda(double n, double U);

/// v_ext + Hartree + xc for the site occupations `density`.
KSPotential ks_potential(SitePair v_ext, SitePair density, double U);

/// Density that freezes the static p-LDA functionals.
enum class PldaDensitySource { SelfConsistent, Exact };

std::string_view to_string(PldaDensitySource s);
PldaDensitySource parse_plda_density(std::string_view name);

struct ProtocolOptions {
  PldaDensitySource plda_density = PldaDensitySource::SelfConsistent;

  // Time-dependent (ALDA-inspired) cycle.
  double mixing = 1.0;  // 1 is plain iteration
  std::size_t max_iter = 200;
  double tolerance = 1e-5;
  bool record_iterations = false;

  // t = 0 self-consistent KS thermal density for the static p-LDA.
  double static_mixing = 0.5;
  double static_tolerance = 1e-9;
  std::size_t static_max_iter = 500;
};

struct SCFReport {
  std::size_t iterations = 0;
  /// For the ALDA cycle: sum over the grid of |n1_in - n1_out| / M per iteration.
  std::vector<double> residual_history;
  bool converged = false;
  double mixing_used = 1.0;
  /// 1-based iteration whose output is reported (differs from `iterations`
  /// only when unconverged).
  std::size_t reported_iteration = 0;
};

struct ProtocolResult {
  ProtocolKind kind = ProtocolKind::Exact;
  double W = 0.0;
  Trajectory traj;
  WorkDistribution dist;
  /// Source and final Hamiltonians whose spectra define the work values.
  std::optional<HermitianOperator> h_initial;
  std::optional<HermitianOperator> h_final;
  std::optional<SCFReport> scf;
  /// Output n1(t) of every ALDA iteration, if requested.
  std::vector<std::vector<double>> iteration_n1;
};

/// Self-consistent t = 0 KS thermal occupations n = Tr[rho^KS[n] n_j].
/// Throws NumericalError if not converged after opts.static_max_iter.
SitePair static_ks_density(const DriveParams& p, double kT, const ProtocolOptions& opts,
                           SCFReport* report = nullptr);

ProtocolResult exact_run(const DriveParams& p, double kT, const TimeGrid& grid);
ProtocolResult noninteracting_run(const DriveParams& p, double kT, const TimeGrid& grid);
ProtocolResult static_plda_run(const DriveParams& p, double kT, const TimeGrid& grid,
                               const ProtocolOptions& opts = {});
/// Never throws on non-convergence: the lowest-residual iterate is returned
/// with scf->converged == false.
ProtocolResult alda_run(const DriveParams& p, double kT, const TimeGrid& grid,
                        const ProtocolOptions& opts = {});

ProtocolResult run_protocol(ProtocolKind kind, const DriveParams& p, double kT,
                            const TimeGrid& grid, const ProtocolOptions& opts = {});

}  // namespace dimerwork
