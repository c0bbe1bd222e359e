#pragma once

// Two-site Hubbard model at half filling, restricted to the Sz = 0 sector.
//
// Units: hbar = 1, energies in units of the hopping J, times in 1/J.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace dimerwork {

using Matrix4c = Eigen::Matrix4cd;
using Matrix4r = Eigen::Matrix4d;
using Vector4r = Eigen::Vector4d;
using Complex = std::complex<double>;

inline constexpr std::size_t kDim = 4;

/// Raised when an input lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an iterative numerical procedure fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pair of per-site values (potentials, occupations).
struct SitePair {
  double site1 = 0.0;
  double site2 = 0.0;

  friend SitePair operator+(SitePair a, SitePair b) {
    return {a.site1 + b.site1, a.site2 + b.site2};
  }
  friend bool operator==(const SitePair&, const SitePair&) = default;
};

/// Basis of the two-electron Sz = 0 sector.
///
/// Ordered as |ud,0>, |0,ud>, |u,d>, |d,u>, where |u,d> = c+_{1u} c+_{2d}|0>
/// and |d,u> = c+_{1d} c+_{2u}|0>.
class ManyBodyBasis {
 public:
  enum class State : std::size_t { DoubleOnSite1 = 0, DoubleOnSite2, UpDown, DownUp };

  static constexpr std::size_t size() { return kDim; }

  /// Particle count (0, 1 or 2) on `site` (1 or 2) for basis state index `state`.
  static int occupation(int site, std::size_t state);

  static std::string_view label(std::size_t state);

  /// Diagonal number operator n_site in this basis.
  static Matrix4r number_operator(int site);

 private:
  static constexpr std::array<std::array<int, kDim>, 2> kOccupation{{
      {2, 0, 1, 1},
      {0, 2, 1, 1},
  }};
};

/// Which site is pushed up by the drive.
///
/// V1Plus: v1 = +f(t), v2 = -f(t); site 2 attracts electrons.
/// V1Minus: v1 = -f(t), v2 = +f(t), the mirror image.
enum class SignConvention { V1Plus, V1Minus };

std::string_view to_string(SignConvention c);
SignConvention parse_sign_convention(std::string_view name);

/// Parameters of the sinusoidally driven dimer. The drive frequency is tied
/// to the duration so that the sine reaches its maximum exactly at t = tau.
struct DriveParams {
  double J = 1.0;
  double U = 0.0;
  double A0 = 1.0;
  double Atau = 7.0;
  double tau = 1.0;
  SignConvention sign = SignConvention::V1Plus;

  double omega() const;

  /// Throws DomainError on J <= 0, U < 0 or tau <= 0.
  void validate() const;
};

/// Complex Hermitian 4x4 matrix together with its eigendecomposition.
///
/// Eigenvalues are ascending. Each eigenvector is phase-fixed so that its
/// largest-magnitude component (lowest index on ties) is real and positive.
class HermitianOperator {
 public:
  /// Throws DomainError unless |M - M^dagger|_max < 1e-12 * max(1, |M|_max).
  explicit HermitianOperator(const Matrix4c& matrix);
  explicit HermitianOperator(const Matrix4r& matrix);

  const Matrix4c& matrix() const { return matrix_; }
  const Vector4r& eigenvalues() const { return eigenvalues_; }
  const Matrix4c& eigenvectors() const { return eigenvectors_; }

  /// True when the matrix has no imaginary part (the eigenvectors are then real).
  bool is_real() const { return real_; }

 private:
  friend HermitianOperator ks_hamiltonian(const DriveParams& p, SitePair vks);
  // Takes a known eigensystem; no checks.
  HermitianOperator(const Matrix4r& matrix, const Vector4r& eigenvalues, const Matrix4r& eigenvectors);
  void diagonalize();
  void fix_phases();

  Matrix4c matrix_;
  Vector4r eigenvalues_;
  Matrix4c eigenvectors_;
  bool real_ = false;
};

/// External potential (v1, v2) at time t in [0, tau].
SitePair external_potential(double t, const DriveParams& p);

/// Exact Hamiltonian K + U + V with the given site potentials.
HermitianOperator hamiltonian(const DriveParams& p, SitePair v);

/// Kohn-Sham Hamiltonian K + sum_j v^KS_j n_j (no interaction term).
HermitianOperator ks_hamiltonian(const DriveParams& p, SitePair vks);

/// Real-valued matrix of K + U (U = interaction) + v_1 n_1 + v_2 n_2.
Matrix4r hubbard_matrix(double J, double U, SitePair v);

/// max |A_ij|
double max_abs(const Matrix4c& m);

}  // namespace dimerwork
