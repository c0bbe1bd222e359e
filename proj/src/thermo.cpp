#include "dimerwork/thermo.hpp"

#include <cmath>

namespace dimerwork {

double ThermalState::partition_function() const { return std::exp(log_Z); }

double log_partition_function(const Vector4r& energies, double kT) {
  if (!(kT > 0.0)) throw DomainError("log_partition_function: kT must be positive");
  const double e0 = energies.minCoeff();
  double sum = 0.0;
  for (Eigen::Index n = 0; n < energies.size(); ++n) sum += std::exp(-(energies(n) - e0) / kT);
  return -e0 / kT + std::log(sum);
}

Matrix4c mixture(const HermitianOperator& H, const std::array<double, kDim>& weights) {
  const Matrix4c& v = H.eigenvectors();
  Matrix4c rho = Matrix4c::Zero();
  for (std::size_t n = 0; n < kDim; ++n) {
    const auto col = v.col(static_cast<Eigen::Index>(n));
    rho.noalias() += weights[n] * (col * col.adjoint());
  }
  // Symmetrize away rounding so the result passes the Hermiticity check.
  return 0.5 * (rho + rho.adjoint());
}

ThermalState thermal_state(const HermitianOperator& H, double kT) {
  if (!(kT > 0.0)) {
    throw DomainError("thermal_state: kT must be positive (use ground_state for T -> 0)");
  }
  const Vector4r& e = H.eigenvalues();
  std::array<double, kDim> p{};
  double sum = 0.0;
  for (std::size_t n = 0; n < kDim; ++n) {
    p[n] = std::exp(-(e(static_cast<Eigen::Index>(n)) - e(0)) / kT);
    sum += p[n];
  }
  for (double& x : p) x /= sum;
  return ThermalState{HermitianOperator(mixture(H, p)), kT, -e(0) / kT + std::log(sum), p};
}

ThermalState ground_state(const HermitianOperator& H) {
  const std::array<double, kDim> p{1.0, 0.0, 0.0, 0.0};
  return ThermalState{HermitianOperator(mixture(H, p)), 0.0, 0.0, p};
}

double spectral_gap(const HermitianOperator& H) {
  return H.eigenvalues()(1) - H.eigenvalues()(0);
}

SitePair site_occupations(const Matrix4c& rho) {
  SitePair n;
  for (std::size_t s = 0; s < kDim; ++s) {
    const double pop = rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
    n.site1 += ManyBodyBasis::occupation(1, s) * pop;
    n.site2 += ManyBodyBasis::occupation(2, s) * pop;
  }
  return n;
}

}  // namespace dimerwork
