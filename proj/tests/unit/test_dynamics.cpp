#include <cmath>

#include "doctest.h"
#include "dimerwork/dynamics.hpp"
#include "dimerwork/thermo.hpp"
#include "support/fock_space.hpp"
#include "support/random_points.hpp"

using namespace dimerwork;

namespace {

HamiltonianAt exact_family(const DriveParams& p) {
  return [p](double t) { return hamiltonian(p, external_potential(t, p)); };
}

DriveParams drive(double U, double tau) {
  DriveParams p;
  p.U = U;
  p.tau = tau;
  return p;
}

Matrix4c thermal_rho(const DriveParams& p, double kT) {
  return thermal_state(hamiltonian(p, external_potential(0.0, p)), kT).rho.matrix();
}

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid g(3.0, 7);
  CHECK(g.time(0) == 0.0);
  CHECK(g.time(7) == 3.0);
  CHECK(g.dt() == doctest::Approx(3.0 / 7.0));
  const auto t = g.times();
  REQUIRE(t.size() == 8);
  for (std::size_t k = 1; k < t.size(); ++k) CHECK(t[k] - t[k - 1] == doctest::Approx(g.dt()));
  CHECK_THROWS_AS(TimeGrid(0.0, 10), DomainError);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), DomainError);

  CHECK(default_steps(0.1) == 1000);
  CHECK(default_steps(0.5) == 1000);
  CHECK(default_steps(9.0) == 18000);
  CHECK(default_steps(7.0001) == 14001);
}

TEST_CASE("constant hamiltonian propagates as exp(-i H tau)") {
  const HermitianOperator h = hamiltonian(drive(3.0, 1.0), {1.5, -0.5});
  const HamiltonianAt constant = [&h](double) { return h; };
  const double tau = 2.7;
  const Matrix4c expected = testing::pade_step(h.matrix().real(), tau);
  for (std::size_t m : {1u, 13u, 400u}) {
    CHECK(max_abs(propagator(constant, TimeGrid(tau, m)) - expected) < 1e-10);
  }
}

TEST_CASE("very short evolution is close to the identity") {
  const DriveParams p = drive(9.0, 1e-6);
  const Matrix4c u = propagator(exact_family(p), TimeGrid(p.tau, default_steps(p.tau)));
  CHECK(max_abs(u - Matrix4c::Identity()) < 1e-4);
}

TEST_CASE("midpoint product agrees with Pade steps on the second-quantized hamiltonian") {
  const DriveParams p = drive(4.0, 2.0);
  auto brute = [&](double t) {
    const SitePair v = external_potential(t, p);
    return Eigen::Matrix4d(testing::fock_dimer().hamiltonian(1.0, p.U, v.site1, v.site2));
  };
  const Matrix4c u = propagator(exact_family(p), TimeGrid(p.tau, 500));
  CHECK(max_abs(u - testing::pade_propagator(brute, p.tau, 500)) < 1e-11);
}

TEST_CASE("second-order convergence in the step size") {
  const DriveParams p = drive(2.0, 3.0);
  const Matrix4c reference = propagator(exact_family(p), TimeGrid(p.tau, 64000));
  const double coarse = max_abs(propagator(exact_family(p), TimeGrid(p.tau, 250)) - reference);
  const double fine = max_abs(propagator(exact_family(p), TimeGrid(p.tau, 500)) - reference);
  const double ratio = coarse / fine;
  MESSAGE("error ratio for halved dt: " << ratio);
  CHECK(ratio > 3.6);
  CHECK(ratio < 4.4);
}

TEST_CASE("unitarity is kept over 1e5 steps") {
  const DriveParams p = drive(9.0, 10.0);
  const Matrix4c u = propagator(exact_family(p), TimeGrid(p.tau, 100000));
  CHECK(unitarity_defect(u) < 1e-10);
}

TEST_CASE("propagators compose over aligned grids") {
  const DriveParams p = drive(5.0, 4.0);
  const HamiltonianAt full = exact_family(p);
  const HamiltonianAt second_half = [&](double t) { return full(t + p.tau / 2.0); };
  const Matrix4c whole = propagator(full, TimeGrid(p.tau, 2000));
  const Matrix4c first = propagator(full, TimeGrid(p.tau / 2.0, 1000));
  const Matrix4c second = propagator(second_half, TimeGrid(p.tau / 2.0, 1000));
  CHECK(max_abs(whole - second * first) < 1e-10);
}

TEST_CASE("non-Hermitian hamiltonians from the callback are rejected") {
  const HamiltonianAt broken = [](double t) {
    Matrix4c m = hubbard_matrix(1.0, 1.0, {t, -t}).cast<Complex>();
    m(0, 1) = Complex(0.0, 1.0);  // m(1, 0) stays 0
    return HermitianOperator(m);
  };
  CHECK_THROWS_AS(propagator(broken, TimeGrid(1.0, 10)), DomainError);
}

TEST_CASE("trajectory conservation laws") {
  testing::PointGenerator gen(5u);
  for (int i = 0; i < 10; ++i) {
    const DriveParams p = drive(gen.uniform(0, 10), gen.uniform(0.2, 6.0));
    const Matrix4c rho0 = thermal_rho(p, gen.uniform(0.2, 20.0));
    const TimeGrid grid(p.tau, 1500);
    const Trajectory tr = evolve(rho0, exact_family(p), grid);
    REQUIRE(tr.n1.size() == grid.steps() + 1);
    for (std::size_t k = 0; k <= grid.steps(); ++k) {
      CHECK(std::abs(tr.n1[k] + tr.n2[k] - 2.0) < 1e-8);
      CHECK(tr.n1[k] >= -1e-12);
      CHECK(tr.n1[k] <= 2.0 + 1e-12);
    }
    CHECK(std::abs((rho0 * rho0).trace().real() -
                   (tr.final_state * tr.final_state).trace().real()) < 1e-10);
    CHECK(unitarity_defect(tr.propagator) < 1e-10);

    // the recorded n1 matches a direct evaluation from the final state
    CHECK(tr.n1.back() == doctest::Approx(site_occupations(tr.final_state).site1).epsilon(1e-12));
  }
}

TEST_CASE("symmetric static potential keeps the sites balanced") {
  DriveParams p = drive(3.0, 5.0);
  p.A0 = 0.0;
  p.Atau = 0.0;
  const Matrix4c rho0 = thermal_rho(p, 2.0);
  const Trajectory tr = evolve(rho0, exact_family(p), TimeGrid(p.tau, 2000));
  for (double n : tr.n1) CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("energy is conserved without the drive") {
  DriveParams p = drive(4.0, 6.0);
  p.Atau = 0.0;
  // a non-stationary pure state |ud,0>
  Matrix4c rho0 = Matrix4c::Zero();
  rho0(0, 0) = 1.0;
  const HermitianOperator h = hamiltonian(p, external_potential(0.0, p));
  const double e0 = (rho0 * h.matrix()).trace().real();
  for (double tau : {0.5, 2.0, 6.0}) {
    DriveParams q = p;
    q.tau = tau;
    const Trajectory tr = evolve(rho0, exact_family(q), TimeGrid(tau, 3000));
    CHECK(std::abs((tr.final_state * h.matrix()).trace().real() - e0) < 1e-8);
  }
}

TEST_CASE("driven trajectory at U = 2J, kT = 2J, tau = 10/J") {
  const DriveParams p = drive(2.0, 10.0);
  const TimeGrid grid(p.tau, default_steps(p.tau));
  const Trajectory tr = evolve(thermal_rho(p, 2.0), exact_family(p), grid);
  const std::size_t m = grid.steps();
  CHECK(tr.n1.front() > 0.7);
  CHECK(tr.n1.back() < 0.55);
  // ripples persist after the transient and shrink toward the end
  auto spread = [&](std::size_t a, std::size_t b) {
    const auto [lo, hi] = std::minmax_element(tr.n1.begin() + a, tr.n1.begin() + b);
    return *hi - *lo;
  };
  int turning_points = 0;
  for (std::size_t k = m / 2 + 1; k < m; ++k) {
    if ((tr.n1[k] - tr.n1[k - 1]) * (tr.n1[k + 1] - tr.n1[k]) < 0.0) ++turning_points;
  }
  CHECK(turning_points >= 2);
  CHECK(spread(3 * m / 4, m) < spread(m / 4, m / 2));
}

TEST_CASE("automatic step doubling settles n1(tau)") {
  const DriveParams p = drive(6.0, 2.0);
  const Matrix4c rho0 = thermal_rho(p, 2.0);
  const std::size_t m = converged_steps(rho0, exact_family(p), p.tau, 100, 1e-7);
  CHECK(m >= 200);
  const auto n1_at = [&](std::size_t steps) {
    const Matrix4c u = propagator(exact_family(p), TimeGrid(p.tau, steps));
    return site_occupations(u * rho0 * u.adjoint()).site1;
  };
  CHECK(std::abs(n1_at(m) - n1_at(m / 2)) < 1e-7);
  CHECK_THROWS_AS(converged_steps(rho0, exact_family(p), p.tau, 100, 1e-30, 800), NumericalError);
}
