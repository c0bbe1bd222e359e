#include "dimerwork/ks.hpp"

#include <cmath>
#include <string>

#include "dimerwork/thermo.hpp"

namespace dimerwork {

namespace {

// Occupations computed from density matrices may overshoot [0, 2] by
// rounding; anything further out is a caller error.
constexpr double kOccupationSlack = 1e-10;

double checked_occupation(double n, bool check_upper, const char* who) {
  if (!(n >= -kOccupationSlack) || (check_upper && !(n <= 2.0 + kOccupationSlack))) {
    throw DomainError(std::string(who) + ": occupation outside [0, 2]");
  }
  return std::clamp(n, 0.0, 2.0);
}

}  // namespace

std::string_view to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::Exact: return "exact";
    case ProtocolKind::NonInteracting: return "noninteracting";
    case ProtocolKind::StaticPLDA: return "plda";
    case ProtocolKind::ALDAInspired: return "alda";
  }
  return "unknown";
}

ProtocolKind parse_protocol(std::string_view name) {
  if (name == "exact") return ProtocolKind::Exact;
  if (name == "noninteracting") return ProtocolKind::NonInteracting;
  if (name == "plda") return ProtocolKind::StaticPLDA;
  if (name == "alda") return ProtocolKind::ALDAInspired;
  throw DomainError("unknown protocol '" + std::string(name) +
                    "' (expected exact, noninteracting, plda or alda)");
}

std::string_view to_string(PldaDensitySource s) {
  return s == PldaDensitySource::SelfConsistent ? "scf" : "exact";
}

PldaDensitySource parse_plda_density(std::string_view name) {
  if (name == "scf") return PldaDensitySource::SelfConsistent;
  if (name == "exact") return PldaDensitySource::Exact;
  throw DomainError("unknown p-LDA density source '" + std::string(name) +
                    "' (expected scf or exact)");
}

double hartree_potential(double n, double U) {
  return 0.5 * U * checked_occupation(n, true, "hartree_potential");
}

double xc_potential_plda(double n, double U) {
  static const double prefactor = std::pow(2.0, -4.0 / 3.0) * 4.0 / 3.0;
  return -prefactor * U * std::cbrt(checked_occupation(n, false, "xc_potential_plda"));
}

KSPotential ks_potential(SitePair v_ext, SitePair density, double U) {
  return KSPotential{
      v_ext,
      {hartree_potential(density.site1, U), hartree_potential(density.site2, U)},
      {xc_potential_plda(density.site1, U), xc_potential_plda(density.site2, U)},
  };
}

namespace {

SitePair exact_initial_density(const DriveParams& p, double kT) {
  const ThermalState rho = thermal_state(hamiltonian(p, external_potential(0.0, p)), kT);
  return site_occupations(rho.rho.matrix());
}

// Runs the TPM bookkeeping for a trajectory evolved from the Gibbs state of h0.
ProtocolResult finish(ProtocolKind kind, HermitianOperator h0, HermitianOperator htau,
                      Trajectory traj, double kT, double J) {
  ProtocolResult r;
  r.kind = kind;
  r.dist = work_distribution(h0, htau, traj.propagator, kT, J);
  r.W = average_extracted_work(r.dist);
  r.traj = std::move(traj);
  r.h_initial = std::move(h0);
  r.h_final = std::move(htau);
  return r;
}

ProtocolResult run_fixed_family(ProtocolKind kind, const HamiltonianAt& h_at,
                                const DriveParams& p, double kT, const TimeGrid& grid) {
  HermitianOperator h0 = h_at(0.0);
  const ThermalState rho0 = thermal_state(h0, kT);
  Trajectory traj = evolve(rho0.rho.matrix(), h_at, grid);
  return finish(kind, std::move(h0), h_at(p.tau), std::move(traj), kT, p.J);
}

}  // namespace

SitePair static_ks_density(const DriveParams& p, double kT, const ProtocolOptions& opts,
                           SCFReport* report) {
  const SitePair v0 = external_potential(0.0, p);
  SitePair n{1.0, 1.0};
  SCFReport local;
  local.mixing_used = opts.static_mixing;
  for (std::size_t it = 1; it <= opts.static_max_iter; ++it) {
    const HermitianOperator hks = ks_hamiltonian(p, ks_potential(v0, n, p.U).total());
    const SitePair out = site_occupations(thermal_state(hks, kT).rho.matrix());
    const double residual = std::abs(out.site1 - n.site1);
    local.iterations = it;
    local.residual_history.push_back(residual);
    if (residual < opts.static_tolerance) {
      local.converged = true;
      local.reported_iteration = it;
      if (report) *report = local;
      return out;
    }
    const double a = opts.static_mixing;
    n = {a * out.site1 + (1.0 - a) * n.site1, a * out.site2 + (1.0 - a) * n.site2};
  }
  if (report) *report = local;
  throw NumericalError("static_ks_density: t=0 self-consistency did not converge, residual " +
                       std::to_string(local.residual_history.back()));
}

ProtocolResult exact_run(const DriveParams& p, double kT, const TimeGrid& grid) {
  p.validate();
  const HamiltonianAt h_at = [&p](double t) { return hamiltonian(p, external_potential(t, p)); };
  return run_fixed_family(ProtocolKind::Exact, h_at, p, kT, grid);
}

ProtocolResult noninteracting_run(const DriveParams& p, double kT, const TimeGrid& grid) {
  p.validate();
  const HamiltonianAt h_at = [&p](double t) {
    return ks_hamiltonian(p, external_potential(t, p));
  };
  return run_fixed_family(ProtocolKind::NonInteracting, h_at, p, kT, grid);
}

ProtocolResult static_plda_run(const DriveParams& p, double kT, const TimeGrid& grid,
                               const ProtocolOptions& opts) {
  p.validate();
  SCFReport report;
  SitePair n0;
  if (opts.plda_density == PldaDensitySource::SelfConsistent) {
    n0 = static_ks_density(p, kT, opts, &report);
  } else {
    n0 = exact_initial_density(p, kT);
    report.converged = true;
  }
  const KSPotential frozen = ks_potential({0.0, 0.0}, n0, p.U);
  const SitePair shift = frozen.v_hartree + frozen.v_xc;
  const HamiltonianAt h_at = [&p, shift](double t) {
    return ks_hamiltonian(p, external_potential(t, p) + shift);
  };
  ProtocolResult r = run_fixed_family(ProtocolKind::StaticPLDA, h_at, p, kT, grid);
  r.scf = std::move(report);
  return r;
}

ProtocolResult alda_run(const DriveParams& p, double kT, const TimeGrid& grid,
                        const ProtocolOptions& opts) {
  p.validate();
  if (opts.max_iter < 1) throw DomainError("alda_run: max_iter must be at least 1");
  if (!(opts.mixing > 0.0 && opts.mixing <= 1.0)) {
    throw DomainError("alda_run: mixing must lie in (0, 1]");
  }
  const std::size_t m = grid.steps();
  const double dt = grid.dt();

  // n1 on the grid; n2 = 2 - n1.
  std::vector<double> density(m + 1, exact_initial_density(p, kT).site1);

  SCFReport report;
  report.mixing_used = opts.mixing;
  std::optional<ProtocolResult> best;
  double best_residual = 0.0;
  std::vector<std::vector<double>> curves;

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    const auto n_at = [&density, m, dt](double t) {
      // linear interpolation between grid points
      const double x = t / dt;
      const std::size_t k = std::min(static_cast<std::size_t>(x), m - 1);
      const double f = x - static_cast<double>(k);
      return (1.0 - f) * density[k] + f * density[k + 1];
    };
    const HamiltonianAt h_at = [&p, &n_at](double t) {
      const double n1 = n_at(t);
      return ks_hamiltonian(p, ks_potential(external_potential(t, p), {n1, 2.0 - n1}, p.U).total());
    };

    ProtocolResult current = run_fixed_family(ProtocolKind::ALDAInspired, h_at, p, kT, grid);

    double residual = 0.0;
    for (std::size_t k = 0; k <= m; ++k) residual += std::abs(current.traj.n1[k] - density[k]);
    residual /= static_cast<double>(m);

    report.iterations = it;
    report.residual_history.push_back(residual);
    if (opts.record_iterations) curves.push_back(current.traj.n1);

    const bool done = residual <= opts.tolerance;
    std::vector<double> output = done ? std::vector<double>{} : current.traj.n1;
    if (done || !best || residual < best_residual) {
      best_residual = residual;
      report.reported_iteration = it;
      best = std::move(current);
    }
    if (done) {
      report.converged = true;
      break;
    }
    const double a = opts.mixing;
    for (std::size_t k = 0; k <= m; ++k) density[k] = a * output[k] + (1.0 - a) * density[k];
  }
  best->scf = std::move(report);
  best->iteration_n1 = std::move(curves);
  return std::move(*best);
}

ProtocolResult run_protocol(ProtocolKind kind, const DriveParams& p, double kT,
                            const TimeGrid& grid, const ProtocolOptions& opts) {
  switch (kind) {
    case ProtocolKind::Exact: return exact_run(p, kT, grid);
    case ProtocolKind::NonInteracting: return noninteracting_run(p, kT, grid);
    case ProtocolKind::StaticPLDA: return static_plda_run(p, kT, grid, opts);
    case ProtocolKind::ALDAInspired: return alda_run(p, kT, grid, opts);
  }
  throw DomainError("run_protocol: unknown protocol");
}

}  // namespace dimerwork
