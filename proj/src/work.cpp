#include "dimerwork/work.hpp"

#include <algorithm>
#include <cmath>

#include "dimerwork/thermo.hpp"

namespace dimerwork {

double WorkDistribution::total_probability() const {
  double s = 0.0;
  for (const auto& x : samples) s += x.prob;
  return s;
}

double WorkDistribution::mean_work() const {
  double s = 0.0;
  for (const auto& x : samples) s += x.w * x.prob;
  return s;
}

Matrix4r transition_matrix(const HermitianOperator& H0, const HermitianOperator& Htau,
                           const Matrix4c& propagator) {
  const Matrix4c overlaps = Htau.eigenvectors().adjoint() * propagator * H0.eigenvectors();
  return overlaps.cwiseAbs2();
}

WorkDistribution work_distribution(const HermitianOperator& H0, const HermitianOperator& Htau,
                                   const Matrix4c& propagator, double kT, double J) {
  if (!(kT > 0.0)) throw DomainError("work_distribution: kT must be positive");
  const ThermalState source = thermal_state(H0, kT);
  const Matrix4r trans = transition_matrix(H0, Htau, propagator);
  const Vector4r& e0 = H0.eigenvalues();
  const Vector4r& et = Htau.eigenvalues();

  std::vector<WorkSample> raw;
  raw.reserve(kDim * kDim);
  for (Eigen::Index n = 0; n < 4; ++n) {
    for (Eigen::Index m = 0; m < 4; ++m) {
      raw.push_back({et(m) - e0(n), source.populations[static_cast<std::size_t>(n)] * trans(m, n)});
    }
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const WorkSample& a, const WorkSample& b) { return a.w < b.w; });

  WorkDistribution d;
  d.beta = 1.0 / kT;
  d.free_energy_change = -kT * (log_partition_function(et, kT) - source.log_Z);
  // Merge runs of nearly equal work values; the merged w is the
  // probability-weighted mean so <w> is unchanged.
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i + 1;
    double prob = raw[i].prob;
    double moment = raw[i].w * raw[i].prob;
    const double anchor = raw[i].w;
    while (j < raw.size() &&
           std::abs(raw[j].w - anchor) < 1e-9 * std::max(J, std::abs(raw[j].w))) {
      prob += raw[j].prob;
      moment += raw[j].w * raw[j].prob;
      ++j;
    }
    d.samples.push_back({prob > 0.0 ? moment / prob : anchor, prob});
    i = j;
  }
  return d;
}

double average_extracted_work(const WorkDistribution& d) { return -d.mean_work(); }

double jarzynski_residual(const WorkDistribution& d) {
  // Both sides are scaled by Z_0/Z_tau = exp(beta dF) to stay in range.
  double s = 0.0;
  for (const auto& x : d.samples) {
    s += x.prob * std::exp(-d.beta * (x.w - d.free_energy_change));
  }
  return std::abs(s - 1.0);
}

double sudden_quench_work(const HermitianOperator& H0, const HermitianOperator& Htau, double kT) {
  const ThermalState rho = thermal_state(H0, kT);
  return -(rho.rho.matrix() * (Htau.matrix() - H0.matrix())).trace().real();
}

double stochasticity_defect(const Matrix4r& transitions) {
  const double rows = (transitions.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (transitions.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}

}  // namespace dimerwork
