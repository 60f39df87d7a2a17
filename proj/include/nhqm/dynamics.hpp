#pragma once

#include <functional>
#include <vector>

#include "nhqm/biortho.hpp"
#include "nhqm/matrixcore.hpp"
#include "nhqm/measurement.hpp"

namespace nhqm {

// ---- time-dependent model ----
//
// A time-dependent problem is described by callables rather than fixed
// matrices.  H_of_t is mandatory.  Lambda_of_t supplies the (hermitian,
// positive) metric at time t; when it is absent the evolution is treated as
// conventional (identity metric).  dLambda_of_t is optional: when null, the
// time derivative of the metric is obtained by a symmetric finite difference
// with step fd_step (0 selects the default 1e-6 * max(1, |t|)).
//
// The optional *_apply closures are fast paths: when provided they are used
// instead of materializing the corresponding matrix at every step.  They must
// agree with the matrix-valued callables; the library does not cross-check
// them.  x_op (size 0 if unused) is the observable recorded along the
// trajectory.
struct TimeDependentModel {
  Eigen::Index dim = 0;
  double hbar = 1.0;

  std::function<ComplexMatrix(double)> H_of_t;
  std::function<ComplexMatrix(double)> Lambda_of_t;
  std::function<ComplexMatrix(double)> dLambda_of_t;
  double fd_step = 0.0;

  std::function<ComplexVector(double, const ComplexVector&)> H_apply;
  std::function<ComplexVector(double, const ComplexVector&)> F_apply;
  std::function<ComplexVector(double, const ComplexVector&)> metric_half_apply;

  ComplexMatrix x_op;
};

// ---- trajectory containers ----
struct TrajectoryRecord {
  double x_expect = 0.0;  // metric-normalized position expectation
  Complex overlap;        // <psi_t | Lambda_t | psi_t>
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexVector> states;
  std::vector<TrajectoryRecord> records;

  std::size_t size() const { return times.size(); }
};

// ---- spectral evolution (time-independent generator) ----
//
// Given a biorthogonal system and expansion coefficients c (in the right
// eigenbasis), returns the state at time t:
//   psi_t = sum_n c_n exp(-i E_n t / hbar) |psi_n>.
// The coefficients must be normalized (sum |c_n|^2 = 1); the returned state
// carries no metric.
QuantumState evolve_spectral(const BiorthogonalSystem& sys,
                             const ComplexVector& c, double t,
                             double hbar = 1.0);

// Evolves the associated left (dual) state and returns the bra
//   <phi_t| = sum_n c_n* exp(+i E_n* t / hbar) <phi_n|,
// so that (evolve_left_spectral(...) * evolve_spectral(...).amps).value() is
// the biorthogonal overlap <phi_t|psi_t>.  For a real spectrum the phases
// cancel and the overlap is conserved exactly; a complex eigenvalue E makes
// an eigenstate's overlap drift as exp(2 Im(E) t / hbar).
ComplexRowVector evolve_left_spectral(const BiorthogonalSystem& sys,
                                      const ComplexVector& c, double t,
                                      double hbar = 1.0);

// ---- inertial force ----
//
// F_t = -(i hbar / 2) Lambda_t^{-1} (d Lambda_t / dt).  The derivative comes
// from dLambda_of_t when available and from a symmetric finite difference
// otherwise.  Throws SingularMetric when Lambda_t cannot be inverted.
ComplexMatrix inertial_force(const TimeDependentModel& model, double t);

// ---- time-dependent integration ----
//
// Classic fourth-order Runge-Kutta for i hbar dpsi/dt = (H_t + F_t) psi
// (include_force = true) or i hbar dpsi/dt = H_t psi (include_force = false).
// t_span = {t0, t1} with t1 > t0; dt must divide the span to within one part
// in 1e-9 (the last step is shortened to land exactly on t1).
//
// The initial state must be normalized with respect to Lambda_{t0} when the
// model carries a metric, and conventionally otherwise.  When include_force
// is set, the metric norm <psi|Lambda_t|psi> is conserved; a drift beyond
// `watchdog` aborts the run with StepTooLarge.  Each accepted step appends a
// TrajectoryRecord holding the metric-normalized position expectation (when
// x_op is present) and the metric overlap.
Trajectory evolve_timedep(const TimeDependentModel& model,
                          const ComplexVector& psi0,
                          std::pair<double, double> t_span, double dt,
                          bool include_force, double watchdog = 1e-3);

// ---- expectation values ----
//
// Metric-consistent position expectation: with u = g^{1/2} psi this is
// <u|x|u> / <u|u>.  The explicit metric argument (nullable) overrides the
// metric stored on the state; a non-hermitian state without either throws
// MissingMetric.  Hermitian states use the conventional Rayleigh quotient.
double expectation_position(const QuantumState& state, const ComplexMatrix& x_op,
                            const MetricOperator* metric_at_t = nullptr);

}  // namespace nhqm
