#pragma once

#include <array>

#include "dimerwork/model.hpp"

namespace dimerwork {

/// Canonical (Gibbs) state of a Hamiltonian.
///
/// The partition function is kept as its logarithm: at kT = 1e-3 J the
/// Boltzmann weights of the unshifted spectrum overflow a double.
struct ThermalState {
  HermitianOperator rho;
  double kT = 0.0;
  double log_Z = 0.0;
  /// p_n for the eigenstates of the source Hamiltonian, ascending E_n.
  std::array<double, kDim> populations{};

  double partition_function() const;
};

/// rho = exp(-H/kT)/Z. Throws DomainError for kT <= 0.
ThermalState thermal_state(const HermitianOperator& H, double kT);

/// Zero-temperature limit |psi_0><psi_0| (kT = 0, log_Z = -E_0 / 0 is not
/// meaningful and is left at 0).
ThermalState ground_state(const HermitianOperator& H);

/// log Tr exp(-H/kT), evaluated with the ground energy factored out.
double log_partition_function(const Vector4r& energies, double kT);

/// E_1 - E_0.
double spectral_gap(const HermitianOperator& H);

/// sum_n p_n |psi_n><psi_n|
Matrix4c mixture(const HermitianOperator& H, const std::array<double, kDim>& weights);

/// Tr[rho n_1], Tr[rho n_2]
SitePair site_occupations(const Matrix4c& rho);

}  // namespace dimerwork
