#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "nhqm/biortho.hpp"
#include "nhqm/dynamics.hpp"
#include "nhqm/matrixcore.hpp"

namespace nhqm {

// ---- spaces and schedules ----

// Truncated Fock space of a 1-d oscillator: dimension N with physical
// constants; alpha = sqrt(hbar / 2 m omega) is the oscillator length scale.
struct FockSpace {
  Eigen::Index N = 64;
  double hbar = 1.0;
  double m = 1.0;
  double omega = 1.0;

  double alpha() const { return std::sqrt(hbar / (2.0 * m * omega)); }
};

// Linear ramp eta(t) = t / tau with constant rate 1 / tau.
struct ScheduleLinear {
  double tau = 10.0;

  double eta(double t) const { return t / tau; }
  double deta() const { return 1.0 / tau; }
};

// ---- operator bundles ----

struct FockOperators {
  ComplexMatrix a;       // annihilation: sqrt(n) on the first superdiagonal
  ComplexMatrix a_dag;   // creation
  ComplexMatrix x;       // alpha (a + a_dag)
  ComplexMatrix p;       // i sqrt(m omega hbar / 2) (a_dag - a)
  ComplexMatrix H0;      // hbar omega (n + 1/2), exact diagonal
  ComplexMatrix parity;  // diag((-1)^n)
};

// Builds the truncated ladder/position/momentum operators.  [x, p] = i hbar I
// except the terminal corner entry, which is an unavoidable truncation
// artifact.
FockOperators fock_operators(const FockSpace& fs);

// ---- example builders ----

// H = H0 + i eps x^3 (products of truncated factors).  PT-symmetric with
// respect to the parity operator; low-lying spectrum real for small eps.
ComplexMatrix cubic_pt_hamiltonian(const FockSpace& fs, double eps);

// Hermitian partner of the cubic model through second order:
//   K = H0 + (eps^2 / m omega^4) ({x^2, p^2} + p x^2 p + (3 m omega^2 / 2) x^4).
ComplexMatrix perturbative_hermitian(const FockSpace& fs, double eps);

// Imaginary-gauge model H = (p - i hbar eta)^2 / 2m + V(x) with the exact
// metric family g = e^{2 eta x}.  V is a polynomial in x given by its
// coefficients (v_coeffs[k] multiplies x^k); an empty list selects the
// harmonic trap m omega^2 x^2 / 2.
struct GaugeModel {
  ComplexMatrix H;
  MetricOperator metric;
};

GaugeModel gauge_hamiltonian(const FockSpace& fs, double eta,
                             const std::vector<double>& v_coeffs = {});

// Harmonically driven oscillator in a uniformly accelerating frame:
//   H_t = hbar omega [(a - eta_t alpha)^dagger (a + eta_t alpha) + 1/2]
//       = H0 + hbar omega eta_t alpha (a_dag - a) - hbar omega eta_t^2 alpha^2,
// with time-dependent metric Lambda_t = e^{2 eta_t x}.  The returned model
// carries analytic metric derivatives, fast apply closures, and x as the
// recorded observable.
TimeDependentModel driven_oscillator_model(const FockSpace& fs,
                                           const ScheduleLinear& sched);

// ---- truncation convergence gate ----
//
// Returns the lowest real eigenvalues of builder(n) that survive a doubling
// test: a level is kept when (a) its imaginary part is at most im_tol in
// magnitude and (b) the nearest real eigenvalue of builder(2n) agrees with it
// within rel_tol relative to max(1, |E|).  At most k levels are returned,
// in ascending order; fewer survivors than k is not an error (callers that
// need exactly k must check the size).
std::vector<double> converged_levels(
    const std::function<ComplexMatrix(Eigen::Index)>& builder, Eigen::Index n,
    Eigen::Index k, double rel_tol = 1e-8, double im_tol = 1e-6);

}  // namespace nhqm
