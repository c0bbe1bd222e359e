#include "dimerwork/model.hpp"

#include <cmath>
#include <numbers>

namespace dimerwork {

int ManyBodyBasis::occupation(int site, std::size_t state) {
  if (site < 1 || site > 2 || state >= kDim) {
    throw DomainError("ManyBodyBasis::occupation: site must be 1 or 2 and state < 4");
  }
  return kOccupation[static_cast<std::size_t>(site - 1)][state];
}

std::string_view ManyBodyBasis::label(std::size_t state) {
  static constexpr std::array<std::string_view, kDim> kLabels{"|ud,0>", "|0,ud>", "|u,d>",
                                                              "|d,u>"};
  return kLabels.at(state);
}

Matrix4r ManyBodyBasis::number_operator(int site) {
  Matrix4r n = Matrix4r::Zero();
  for (std::size_t s = 0; s < kDim; ++s) {
    n(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = occupation(site, s);
  }
  return n;
}

std::string_view to_string(SignConvention c) {
  return c == SignConvention::V1Plus ? "v1-plus" : "v1-minus";
}

SignConvention parse_sign_convention(std::string_view name) {
  if (name == "v1-plus") return SignConvention::V1Plus;
  if (name == "v1-minus") return SignConvention::V1Minus;
  throw DomainError("unknown sign convention '" + std::string(name) +
                    "' (expected v1-plus or v1-minus)");
}

double DriveParams::omega() const { return std::numbers::pi / (2.0 * tau); }

void DriveParams::validate() const {
  if (!(J > 0.0)) throw DomainError("DriveParams: J must be positive");
  if (!(U >= 0.0)) throw DomainError("DriveParams: U must be non-negative");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("DriveParams: tau must be positive");
  if (!std::isfinite(A0) || !std::isfinite(Atau)) {
    throw DomainError("DriveParams: drive amplitudes must be finite");
  }
}

double max_abs(const Matrix4c& m) { return m.cwiseAbs().maxCoeff(); }

HermitianOperator::HermitianOperator(const Matrix4c& matrix) : matrix_(matrix) {
  const double scale = std::max(1.0, max_abs(matrix_));
  if (max_abs(matrix_ - matrix_.adjoint()) >= 1e-12 * scale) {
    throw DomainError("HermitianOperator: matrix is not Hermitian");
  }
  real_ = matrix_.imag().isZero(0.0);
  diagonalize();
}

HermitianOperator::HermitianOperator(const Matrix4r& matrix)
    : HermitianOperator(Matrix4c(matrix.cast<Complex>())) {}

void HermitianOperator::diagonalize() {
  if (real_) {
    Eigen::SelfAdjointEigenSolver<Matrix4r> solver(matrix_.real());
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(matrix_);
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
  }
  fix_phases();
}

HermitianOperator::HermitianOperator(const Matrix4r& matrix, const Vector4r& eigenvalues,
                                     const Matrix4r& eigenvectors)
    : matrix_(matrix.cast<Complex>()),
      eigenvalues_(eigenvalues),
      eigenvectors_(eigenvectors.cast<Complex>()),
      real_(true) {
  fix_phases();
}

void HermitianOperator::fix_phases() {
  for (Eigen::Index col = 0; col < 4; ++col) {
    auto v = eigenvectors_.col(col);
    Eigen::Index pivot = 0;
    double largest = std::abs(v(0));
    for (Eigen::Index i = 1; i < 4; ++i) {
      // ties resolved toward the lowest index
      if (std::abs(v(i)) > largest + 1e-12) {
        largest = std::abs(v(i));
        pivot = i;
      }
    }
    v *= std::conj(v(pivot)) / std::abs(v(pivot));
    v(pivot) = Complex(v(pivot).real(), 0.0);
  }
}

SitePair external_potential(double t, const DriveParams& p) {
  if (!(t >= 0.0 && t <= p.tau)) {
    throw DomainError("external_potential: t outside [0, tau]");
  }
  const double f = p.A0 + p.Atau * std::sin(p.omega() * t);
  return p.sign == SignConvention::V1Plus ? SitePair{f, -f} : SitePair{-f, f};
}

Matrix4r hubbard_matrix(double J, double U, SitePair v) {
  Matrix4r h = Matrix4r::Zero();
  h(0, 0) = U + 2.0 * v.site1;
  h(1, 1) = U + 2.0 * v.site2;
  h(2, 2) = v.site1 + v.site2;
  h(3, 3) = v.site1 + v.site2;
  // <ud,0|K|u,d> = -J, <ud,0|K|d,u> = +J; the same for |0,ud>.
  h(0, 2) = h(2, 0) = -J;
  h(0, 3) = h(3, 0) = J;
  h(1, 2) = h(2, 1) = -J;
  h(1, 3) = h(3, 1) = J;
  return h;
}

HermitianOperator hamiltonian(const DriveParams& p, SitePair v) {
  return HermitianOperator(hubbard_matrix(p.J, p.U, v));
}

HermitianOperator ks_hamiltonian(const DriveParams& p, SitePair vks) {
  // Non-interacting: many-body eigenstates are products of the bonding (a, b)
  // and antibonding (-b, a) orbitals of h = [[v1, -J], [-J, v2]].
  const double s = 0.5 * (vks.site1 + vks.site2);
  const double d = 0.5 * (vks.site1 - vks.site2);
  const double r = std::hypot(d, p.J);
  double a = 1.0, b = 0.0;
  if (r > 0.0) {
    // the two forms are equal; each avoids cancellation on its side of d = 0
    a = d >= 0.0 ? p.J : r - d;
    b = d >= 0.0 ? d + r : p.J;
    const double norm = std::hypot(a, b);
    a /= norm;
    b /= norm;
  }
  const double ab = a * b;
  const double root2 = std::sqrt(2.0);
  Matrix4r vec;
  // columns: bonding^2, singlet of one bonding + one antibonding, triplet, antibonding^2
  vec.col(0) << a * a, b * b, ab, -ab;
  vec.col(1) << -root2 * ab, root2 * ab, (a * a - b * b) / root2, (b * b - a * a) / root2;
  vec.col(2) << 0.0, 0.0, 1.0 / root2, 1.0 / root2;
  vec.col(3) << b * b, a * a, -ab, ab;
  const Vector4r energies(2.0 * (s - r), 2.0 * s, 2.0 * s, 2.0 * (s + r));
  return HermitianOperator(hubbard_matrix(p.J, 0.0, vks), energies, vec);
}

}  // namespace dimerwork
