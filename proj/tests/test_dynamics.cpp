#include <cmath>
#include <complex>

#include "doctest.h"
#include "nhqm/biortho.hpp"
#include "nhqm/dynamics.hpp"
#include "nhqm/errors.hpp"
#include "nhqm/models.hpp"

using namespace nhqm;

namespace {

ComplexMatrix upper2() {
  ComplexMatrix h(2, 2);
  h << Complex(1, 0), Complex(1, 0), Complex(0, 0), Complex(2, 0);
  return h;
}

// V e^{-i E t / hbar} V^{-1} psi0 without any normalization precondition.
ComplexVector endpoint_oracle(const ComplexMatrix& h, const ComplexVector& psi0,
                              double t, double hbar) {
  const BiorthogonalSystem sys = biorthogonalize(h);
  ComplexVector c = sys.left * psi0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c[i] *= std::exp(Complex(0, -1) * sys.spectrum[static_cast<std::size_t>(i)] * t / hbar);
  }
  return sys.right * c;
}

}  // namespace

TEST_CASE("evolve_spectral: 2x2 oracle at t = pi") {
  const BiorthogonalSystem sys = biorthogonalize(upper2());
  ComplexVector c(2);
  c << Complex(1, 0), Complex(1, 0);
  c /= std::sqrt(2.0);

  // phases are e^{-i pi} = -1 and e^{-2 i pi} = 1: psi = (-psi_1 + psi_2)/sqrt(2)
  const QuantumState psi = evolve_spectral(sys, c, M_PI);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(psi.amps[0] - Complex(s * (s - 1.0), 0)) < 1e-13);
  CHECK(std::abs(psi.amps[1] - Complex(s * s, 0)) < 1e-13);
  CHECK(psi.hermitian_rep());

  // full period: e^{-2 pi i E} = 1 for integer spectrum
  const QuantumState back = evolve_spectral(sys, c, 2.0 * M_PI);
  CHECK((back.amps - sys.right * c).norm() < 1e-12);
}

TEST_CASE("evolve_spectral: argument validation") {
  const BiorthogonalSystem sys = biorthogonalize(upper2());
  ComplexVector c(2);
  c << Complex(1, 0), Complex(1, 0);
  CHECK_THROWS_AS(evolve_spectral(sys, c, 1.0), NotNormalized);
  CHECK_THROWS_AS(evolve_spectral(sys, ComplexVector::Ones(3), 1.0), DimensionMismatch);
  c /= std::sqrt(2.0);
  CHECK_THROWS_AS(evolve_spectral(sys, c, 1.0, 0.0), ConfigInvalid);
}

TEST_CASE("evolve_left_spectral: matches the dual partner at t = 0") {
  const BiorthogonalSystem sys = biorthogonalize(upper2());
  ComplexVector c(2);
  c << Complex(0.6, 0.3), Complex(0.5, -0.2);
  c /= c.norm();
  // at t = 0 the bra is sum c_n^* <phi_n| = c^dagger L
  const ComplexRowVector bra = evolve_left_spectral(sys, c, 0.0);
  CHECK((bra - ComplexRowVector(c.adjoint() * sys.left)).norm() < 1e-14);
}

TEST_CASE("biorthogonal overlap is conserved for a real spectrum") {
  const BiorthogonalSystem sys = biorthogonalize(upper2());
  ComplexVector c(2);
  c << Complex(0.6, 0.3), Complex(0.5, -0.2);
  c /= c.norm();

  const Complex ov0 =
      (evolve_left_spectral(sys, c, 0.0) * evolve_spectral(sys, c, 0.0).amps).value();
  CHECK(std::abs(ov0 - Complex(1, 0)) < 1e-13);
  for (int i = 1; i <= 100; ++i) {
    const double t = 0.1 * i;
    const Complex ov =
        (evolve_left_spectral(sys, c, t) * evolve_spectral(sys, c, t).amps).value();
    CHECK(std::abs(ov - ov0) < 1e-13);
  }
}

TEST_CASE("complex eigenvalue drives e^{2 Im(E) t / hbar} overlap drift") {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 0) = Complex(1, 0.1);
  h(1, 1) = Complex(2, 0);
  const BiorthogonalSystem sys = biorthogonalize(h);
  ComplexVector c = ComplexVector::Zero(2);
  c[0] = 1.0;

  for (const double t : {0.5, 1.0, 3.0, 5.0}) {
    const Complex ov =
        (evolve_left_spectral(sys, c, t) * evolve_spectral(sys, c, t).amps).value();
    const double expect = std::exp(2.0 * 0.1 * t);
    CHECK(std::abs(ov - expect) / expect < 1e-12);
  }
}

TEST_CASE("inertial_force: linear ramp gives -i hbar (deta) x exactly") {
  const FockSpace fs{8, 1.0, 1.0, 0.5};
  const ScheduleLinear sched{10.0};
  const TimeDependentModel model = driven_oscillator_model(fs, sched);
  const ComplexMatrix x = fock_operators(fs).x;

  const ComplexMatrix f = inertial_force(model, 5.0);
  const ComplexMatrix closed = Complex(0, -fs.hbar / 10.0) * x;
  CHECK((f - closed).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inertial_force: constant metric gives zero force") {
  TimeDependentModel model;
  model.dim = 3;
  model.hbar = 1.0;
  model.Lambda_of_t = [](double) {
    return ComplexMatrix(2.0 * ComplexMatrix::Identity(3, 3));
  };
  CHECK(inertial_force(model, 1.0).norm() == 0.0);  // FD of a constant
}

TEST_CASE("inertial_force: error paths") {
  TimeDependentModel bare;
  bare.dim = 2;
  CHECK_THROWS_AS(inertial_force(bare, 0.0), ConfigInvalid);

  TimeDependentModel indef;
  indef.dim = 2;
  indef.Lambda_of_t = [](double) {
    return ComplexMatrix(-ComplexMatrix::Identity(2, 2));
  };
  CHECK_THROWS_AS(inertial_force(indef, 0.0), SingularMetric);
}

TEST_CASE("inertial_force: finite-difference fallback is second order") {
  const FockSpace fs{8, 1.0, 1.0, 0.5};
  const ScheduleLinear sched{10.0};
  const TimeDependentModel model = driven_oscillator_model(fs, sched);
  const ComplexMatrix exact = inertial_force(model, 5.0);

  TimeDependentModel fd = model;
  fd.dLambda_of_t = nullptr;
  const auto err = [&](double h) {
    fd.fd_step = h;
    return (inertial_force(fd, 5.0) - exact).cwiseAbs().maxCoeff();
  };
  // steps large enough that the h^2 truncation term dominates the rounding
  // noise (the noise scales like 1/h and the signal like h^2)
  const double ratio = err(1e-2) / err(5e-3);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("evolve_timedep: hermitian two-level closed form") {
  ComplexMatrix sx(2, 2);
  sx << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
  ComplexVector psi0 = ComplexVector::Zero(2);
  psi0[0] = 1.0;

  TimeDependentModel slow;
  slow.dim = 2;
  slow.H_of_t = [sx](double) { return sx; };

  TimeDependentModel fast = slow;
  fast.H_apply = [sx](double, const ComplexVector& v) { return ComplexVector(sx * v); };

  for (const TimeDependentModel* m : {&slow, &fast}) {
    const Trajectory tr = evolve_timedep(*m, psi0, {0.0, 1.0}, 1e-3, false);
    // psi(t) = cos(t)|0> - i sin(t)|1>
    const ComplexVector& end = tr.states.back();
    CHECK(std::abs(end[0] - Complex(std::cos(1.0), 0)) < 1e-10);
    CHECK(std::abs(end[1] - Complex(0, -std::sin(1.0))) < 1e-10);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == 1.0);
  }
}

TEST_CASE("evolve_timedep: non-hermitian endpoint matches the spectral propagator") {
  const ComplexMatrix h = upper2();
  ComplexVector psi0 = ComplexVector::Zero(2);
  psi0[1] = 1.0;

  TimeDependentModel model;
  model.dim = 2;
  model.H_of_t = [h](double) { return h; };

  const Trajectory tr = evolve_timedep(model, psi0, {0.0, 2.0}, 1e-3, false);
  CHECK((tr.states.back() - endpoint_oracle(h, psi0, 2.0, 1.0)).norm() < 1e-10);
}

TEST_CASE("evolve_timedep: fourth-order endpoint convergence") {
  const ComplexMatrix h = upper2();
  ComplexVector psi0(2);
  psi0 << Complex(0.8, 0), Complex(0.6, 0);

  TimeDependentModel model;
  model.dim = 2;
  model.H_of_t = [h](double) { return h; };

  const ComplexVector exact = endpoint_oracle(h, psi0, 2.0, 1.0);
  const auto err = [&](double dt) {
    return (evolve_timedep(model, psi0, {0.0, 2.0}, dt, false).states.back() - exact)
        .norm();
  };
  const double ratio = err(0.05) / err(0.025);
  CHECK(ratio > 8.0);
  CHECK(ratio < 32.0);
}

TEST_CASE("evolve_timedep: ragged final step lands exactly on t1") {
  TimeDependentModel model;
  model.dim = 2;
  model.H_of_t = [](double) { return ComplexMatrix(ComplexMatrix::Identity(2, 2)); };
  ComplexVector psi0 = ComplexVector::Zero(2);
  psi0[0] = 1.0;

  const Trajectory tr = evolve_timedep(model, psi0, {0.0, 1.0}, 0.3, false);
  REQUIRE(tr.size() == 5);  // 0, 0.3, 0.6, 0.9, 1.0
  CHECK(tr.times.back() == 1.0);
  CHECK(tr.times[3] == doctest::Approx(0.9));
}

TEST_CASE("evolve_timedep: metric norm is conserved only with the force on") {
  const FockSpace fs{16, 1.0, 1.0, 0.5};
  const ScheduleLinear sched{10.0};
  const TimeDependentModel model = driven_oscillator_model(fs, sched);
  ComplexVector psi0 = ComplexVector::Zero(16);
  psi0[0] = psi0[1] = 1.0 / std::sqrt(2.0);

  const Trajectory on = evolve_timedep(model, psi0, {0.0, 1.0}, 1e-3, true);
  double drift_on = 0.0;
  for (const TrajectoryRecord& r : on.records) {
    drift_on = std::max(drift_on, std::abs(r.overlap.real() - 1.0));
  }
  CHECK(drift_on < 1e-6);

  const Trajectory off = evolve_timedep(model, psi0, {0.0, 1.0}, 1e-3, false);
  CHECK(std::abs(off.records.back().overlap.real() - 1.0) > 10.0 * drift_on);
}

TEST_CASE("evolve_timedep: argument and watchdog errors") {
  const FockSpace fs{8, 1.0, 1.0, 0.5};
  const TimeDependentModel model = driven_oscillator_model(fs, ScheduleLinear{2.0});
  ComplexVector psi0 = ComplexVector::Zero(8);
  psi0[0] = 1.0;

  TimeDependentModel empty;
  empty.dim = 8;
  CHECK_THROWS_AS(evolve_timedep(empty, psi0, {0.0, 1.0}, 0.1, false), ConfigInvalid);
  CHECK_THROWS_AS(evolve_timedep(model, ComplexVector::Zero(3), {0.0, 1.0}, 0.1, false),
                  DimensionMismatch);
  CHECK_THROWS_AS(evolve_timedep(model, psi0, {1.0, 0.0}, 0.1, false), ConfigInvalid);
  CHECK_THROWS_AS(evolve_timedep(model, psi0, {0.0, 1.0}, -0.1, false), ConfigInvalid);
  CHECK_THROWS_AS(evolve_timedep(model, psi0, {0.0, 1.0}, 2.0, false), ConfigInvalid);
  CHECK_THROWS_AS(evolve_timedep(model, 2.0 * psi0, {0.0, 1.0}, 0.1, false),
                  NotNormalized);

  TimeDependentModel no_force = model;
  no_force.Lambda_of_t = nullptr;
  no_force.F_apply = nullptr;
  CHECK_THROWS_AS(evolve_timedep(no_force, psi0, {0.0, 1.0}, 0.1, true), ConfigInvalid);

  // an absurd watchdog trips on the first step's integration error
  CHECK_THROWS_AS(evolve_timedep(model, psi0, {0.0, 1.0}, 0.1, true, 1e-15),
                  StepTooLarge);
}

TEST_CASE("expectation_position: oscillator oracles") {
  const FockSpace fs{8, 1.0, 1.0, 0.5};
  const FockOperators ops = fock_operators(fs);
  const double alpha = fs.alpha();

  ComplexVector ground = ComplexVector::Zero(8);
  ground[0] = 1.0;
  CHECK(std::abs(expectation_position(QuantumState::hermitian(ground), ops.x)) < 1e-14);

  ComplexVector even = ComplexVector::Zero(8);
  even[0] = even[1] = 1.0 / std::sqrt(2.0);
  CHECK(expectation_position(QuantumState::hermitian(even), ops.x) ==
        doctest::Approx(alpha).epsilon(1e-13));

  // scale invariance through the Rayleigh quotient
  CHECK(expectation_position(QuantumState::hermitian(ComplexVector(3.0 * even)), ops.x) ==
        doctest::Approx(alpha).epsilon(1e-13));

  CHECK_THROWS_AS(
      expectation_position(QuantumState::hermitian(ComplexVector::Zero(8)), ops.x),
      NotNormalized);
}

TEST_CASE("expectation_position: metric pullback") {
  const FockSpace fs{8, 1.0, 1.0, 0.5};
  const FockOperators ops = fock_operators(fs);
  const GaugeModel gm = gauge_hamiltonian(fs, 0.2);

  ComplexVector v = ComplexVector::Zero(8);
  v[0] = 0.8;
  v[2] = 0.6;
  const double got =
      expectation_position(QuantumState::hermitian(v), ops.x, &gm.metric);
  const ComplexVector u = gm.metric.g_sqrt * v;
  const double want = u.dot(ops.x * u).real() / u.squaredNorm();
  CHECK(got == doctest::Approx(want).epsilon(1e-13));
}
