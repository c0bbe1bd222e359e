#pragma once

#include <vector>

#include "dimerwork/model.hpp"

namespace dimerwork {

struct WorkSample {
  double w = 0.0;
  double prob = 0.0;
};

/// Two-point-measurement work statistics.
///
/// samples are sorted by w; values within 1e-9 max(J, |w|) of each other
/// are merged (probabilities added, w probability-weighted).
struct WorkDistribution {
  std::vector<WorkSample> samples;
  double beta = 0.0;
  /// Delta F = -kT ln(Z_tau / Z_0) for the Hamiltonian family that produced it.
  double free_energy_change = 0.0;

  double kT() const { return 1.0 / beta; }
  double total_probability() const;
  /// <w> = sum_i w_i p_i, the mean work done on the system.
  double mean_work() const;
};

/// p_{m|n} = |<psi_m(tau)| U |psi_n(0)>|^2 (row m, column n).
Matrix4r transition_matrix(const HermitianOperator& H0, const HermitianOperator& Htau,
                           const Matrix4c& propagator);

/// P(w) = sum_{n,m} p_n(0) p_{m|n} delta(w - (E_m(tau) - E_n(0))). kT > 0.
WorkDistribution work_distribution(const HermitianOperator& H0, const HermitianOperator& Htau,
                                   const Matrix4c& propagator, double kT, double J = 1.0);

/// W = -sum_i w_i p_i; positive when the drive draws energy from the system.
double average_extracted_work(const WorkDistribution& d);

/// | <exp(-w/kT)> - Z_tau/Z_0 | / (Z_tau/Z_0)
double jarzynski_residual(const WorkDistribution& d);

/// Sudden-quench limit (propagator = identity): W = -Tr[rho(0) (H(tau) - H(0))].
double sudden_quench_work(const HermitianOperator& H0, const HermitianOperator& Htau, double kT);

/// max over rows and columns of |sum - 1|
double stochasticity_defect(const Matrix4r& transitions);

}  // namespace dimerwork
