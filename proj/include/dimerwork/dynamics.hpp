#pragma once

#include <functional>
#include <vector>

#include "dimerwork/model.hpp"

namespace dimerwork {

/// Uniform grid of M steps over [0, tau]; M + 1 instants including both ends.
class TimeGrid {
 public:
  /// Throws DomainError unless tau > 0 and steps >= 1.
  TimeGrid(double tau, std::size_t steps);

  double tau() const { return tau_; }
  std::size_t steps() const { return steps_; }
  double dt() const { return tau_ / static_cast<double>(steps_); }
  /// t_k; t_M is exactly tau.
  double time(std::size_t k) const;
  std::vector<double> times() const;

 private:
  double tau_;
  std::size_t steps_;
};

/// Default step count max(1000, ceil(2000 tau J)).
std::size_t default_steps(double tau);

using HamiltonianAt = std::function<HermitianOperator(double)>;

/// exp(-i H dt) from the eigendecomposition of H.
Matrix4c step_exponential(const HermitianOperator& H, double dt);

/// Time-ordered U(tau, 0) = prod_k exp(-i H(t_k + dt/2) dt), later steps on
/// the left.
Matrix4c propagator(const HamiltonianAt& hamiltonian_at, const TimeGrid& grid);

struct Trajectory {
  std::vector<double> n1;
  std::vector<double> n2;
  Matrix4c final_state;
  /// U(tau, 0) accumulated while recording the trajectory.
  Matrix4c propagator;
};

/// rho(t_k) = U(t_k, 0) rho0 U(t_k, 0)^dagger with n_j(t_k) = Tr[rho(t_k) n_j].
Trajectory evolve(const Matrix4c& rho0, const HamiltonianAt& hamiltonian_at,
                  const TimeGrid& grid);

/// Doubles the step count, starting from `initial`, until the final site-1
/// occupation changes by less than `tolerance`. Returns the accepted count.
std::size_t converged_steps(const Matrix4c& rho0, const HamiltonianAt& hamiltonian_at, double tau,
                            std::size_t initial, double tolerance = 1e-7,
                            std::size_t max_steps = std::size_t{1} << 22);

/// max |U^dagger U - I|
double unitarity_defect(const Matrix4c& u);

}  // namespace dimerwork
