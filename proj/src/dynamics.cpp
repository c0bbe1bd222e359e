#include "dimerwork/dynamics.hpp"

#include <cmath>

#include "dimerwork/thermo.hpp"

namespace dimerwork {

TimeGrid::TimeGrid(double tau, std::size_t steps) : tau_(tau), steps_(steps) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("TimeGrid: tau must be positive");
  if (steps == 0) throw DomainError("TimeGrid: at least one step is required");
}

double TimeGrid::time(std::size_t k) const {
  if (k >= steps_) return tau_;
  return tau_ * static_cast<double>(k) / static_cast<double>(steps_);
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(steps_ + 1);
  for (std::size_t k = 0; k <= steps_; ++k) t[k] = time(k);
  return t;
}

std::size_t default_steps(double tau) {
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(2000.0 * tau)));
}

Matrix4c step_exponential(const HermitianOperator& H, double dt) {
  const Matrix4c& v = H.eigenvectors();
  Eigen::Vector4cd phase;
  for (Eigen::Index n = 0; n < 4; ++n) phase(n) = std::polar(1.0, -H.eigenvalues()(n) * dt);
  if (!H.is_real()) return v * phase.asDiagonal() * v.adjoint();
  const Matrix4r w = v.real();
  Matrix4c out;
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = i; j < 4; ++j) {
      Complex s = 0.0;
      for (Eigen::Index n = 0; n < 4; ++n) s += (w(i, n) * w(j, n)) * phase(n);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

namespace {

double midpoint(const TimeGrid& grid, std::size_t k) {
  // midpoint of [t_k, t_{k+1}], always strictly inside [0, tau]
  return 0.5 * (grid.time(k) + grid.time(k + 1));
}

double occupation_site1(const Matrix4c& u, const Matrix4c& rho0) {
  // diagonal of U rho0 U^dagger only
  const Matrix4c ur = u * rho0;
  double n1 = 0.0;
  for (Eigen::Index s = 0; s < 4; ++s) {
    const double pop = ur.row(s).dot(u.row(s)).real();
    n1 += ManyBodyBasis::occupation(1, static_cast<std::size_t>(s)) * pop;
  }
  return n1;
}

}  // namespace

Matrix4c propagator(const HamiltonianAt& hamiltonian_at, const TimeGrid& grid) {
  Matrix4c u = Matrix4c::Identity();
  const double dt = grid.dt();
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    u = step_exponential(hamiltonian_at(midpoint(grid, k)), dt) * u;
  }
  return u;
}

Trajectory evolve(const Matrix4c& rho0, const HamiltonianAt& hamiltonian_at,
                  const TimeGrid& grid) {
  const std::size_t m = grid.steps();
  Trajectory traj;
  traj.n1.resize(m + 1);
  traj.n2.resize(m + 1);
  Matrix4c u = Matrix4c::Identity();
  const double dt = grid.dt();
  const SitePair start = site_occupations(rho0);
  const double total = start.site1 + start.site2;
  traj.n1[0] = start.site1;
  traj.n2[0] = start.site2;
  for (std::size_t k = 0; k < m; ++k) {
    u = step_exponential(hamiltonian_at(midpoint(grid, k)), dt) * u;
    traj.n1[k + 1] = occupation_site1(u, rho0);
    traj.n2[k + 1] = total - traj.n1[k + 1];
  }
  traj.final_state = u * rho0 * u.adjoint();
  traj.propagator = u;
  return traj;
}

std::size_t converged_steps(const Matrix4c& rho0, const HamiltonianAt& hamiltonian_at, double tau,
                            std::size_t initial, double tolerance, std::size_t max_steps) {
  std::size_t m = std::max<std::size_t>(initial, 1);
  auto final_n1 = [&](std::size_t steps) {
    const Matrix4c u = propagator(hamiltonian_at, TimeGrid(tau, steps));
    return site_occupations(u * rho0 * u.adjoint()).site1;
  };
  double previous = final_n1(m);
  while (2 * m <= max_steps) {
    m *= 2;
    const double current = final_n1(m);
    if (std::abs(current - previous) < tolerance) return m;
    previous = current;
  }
  throw NumericalError("converged_steps: n1(tau) did not settle below tolerance");
}

double unitarity_defect(const Matrix4c& u) {
  return max_abs(u.adjoint() * u - Matrix4c::Identity());
}

}  // namespace dimerwork
