#pragma once

// Test-only brute force: second-quantized operators on the 16-state Fock
// space (Jordan-Wigner), projected onto the engine's basis vectors, plus
// Pade matrix exponentials. Shares nothing with src/ beyond the SitePair
// and Matrix4c type names.

#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace dimerwork::testing {

using Fock = Eigen::Matrix<double, 16, 16>;
using Sector = Eigen::Matrix<double, 16, 4>;

// mode 0 = 1up, 1 = 1dn, 2 = 2up, 3 = 2dn
inline Fock annihilator(int mode) {
  Eigen::Matrix2d ident = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d parity;
  parity << 1, 0, 0, -1;
  Eigen::Matrix2d lower;
  lower << 0, 1, 0, 0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(1, 1);
  for (int k = 0; k < 4; ++k) {
    const Eigen::Matrix2d& f = k < mode ? parity : (k == mode ? lower : ident);
    Eigen::MatrixXd next = Eigen::kroneckerProduct(m, f);
    m = next;
  }
  return m;
}

struct FockDimer {
  std::array<Fock, 4> c;
  Sector basis;  // columns: |ud,0>, |0,ud>, |u,d>, |d,u>

  FockDimer() {
    for (int k = 0; k < 4; ++k) c[static_cast<std::size_t>(k)] = annihilator(k);
    Eigen::Matrix<double, 16, 1> vacuum = Eigen::Matrix<double, 16, 1>::Zero();
    vacuum(0) = 1.0;
    auto create = [&](int a, int b) {
      Eigen::Matrix<double, 16, 1> v = cd(a) * (cd(b) * vacuum);
      return Eigen::Matrix<double, 16, 1>(v / v.norm());
    };
    basis.col(0) = create(0, 1);
    basis.col(1) = create(2, 3);
    basis.col(2) = create(0, 3);
    basis.col(3) = create(1, 2);
  }

  Fock cd(int k) const { return c[static_cast<std::size_t>(k)].transpose(); }
  Fock n(int k) const { return cd(k) * c[static_cast<std::size_t>(k)]; }

  Eigen::Matrix4d project(const Fock& op) const { return basis.transpose() * op * basis; }

  Eigen::Matrix4d hamiltonian(double J, double U, double v1, double v2) const {
    Fock hop = Fock::Zero();
    for (auto [a, b] : {std::pair{0, 2}, std::pair{1, 3}}) {
      hop += cd(a) * c[static_cast<std::size_t>(b)] + cd(b) * c[static_cast<std::size_t>(a)];
    }
    const Fock h = -J * hop + U * (n(0) * n(1) + n(2) * n(3)) + v1 * (n(0) + n(1)) +
                   v2 * (n(2) + n(3));
    return project(h);
  }

  Eigen::Matrix4d number_site1() const { return project(n(0) + n(1)); }
};

inline const FockDimer& fock_dimer() {
  static const FockDimer d;
  return d;
}

/// exp(-i H dt) through Eigen's Pade-based matrix exponential.
inline Eigen::Matrix4cd pade_step(const Eigen::Matrix4d& h, double dt) {
  const Eigen::Matrix4cd a = std::complex<double>(0.0, -dt) * h.cast<std::complex<double>>();
  return a.exp();
}

/// Midpoint product with Pade steps over `steps` steps of [0, tau].
inline Eigen::Matrix4cd pade_propagator(const std::function<Eigen::Matrix4d(double)>& h_at,
                                        double tau, std::size_t steps) {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  const double dt = tau / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    u = pade_step(h_at((static_cast<double>(k) + 0.5) * dt), dt) * u;
  }
  return u;
}

}  // namespace dimerwork::testing
