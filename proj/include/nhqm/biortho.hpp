#pragma once

#include <cstddef>

#include "nhqm/matrixcore.hpp"

namespace nhqm {

// ---- biorthogonal spectral systems ----

// H = sum_n E_n |psi_n><phi_n| with <phi_n|psi_m> = delta_nm and
// sum_n |psi_n><phi_n| = I. right.col(n) is |psi_n>, left.row(n) is <phi_n|
// (the rows of V^{-1}), so the pairing is exactly 1 by construction.
struct BiorthogonalSystem {
  Spectrum spectrum;
  ComplexMatrix right;  // columns are the right eigenstates psi_n
  ComplexMatrix left;   // rows are the left eigenstates phi_n

  Eigen::Index dim() const { return right.rows(); }
};

// g = sum_m |phi_m><phi_m| (hermitian positive-definite) together with the
// derived operators used throughout: g^{-1} = sum_n |psi_n><psi_n|, the roots,
// and G = ln(g).
struct MetricOperator {
  ComplexMatrix g;
  ComplexMatrix g_inv;
  ComplexMatrix g_sqrt;
  ComplexMatrix g_inv_sqrt;
  ComplexMatrix G_log;

  Eigen::Index dim() const { return g.rows(); }
};

enum class SpectrumLabel { Real, Complex };

struct SpectrumClass {
  SpectrumLabel label;
  double max_imag;

  bool is_real() const { return label == SpectrumLabel::Real; }
};

// ---- operations ----

// Diagonalize H and package right/left eigenstates. Throws Defective when the
// eigenvector set is numerically rank-deficient and Degenerate when the
// smallest eigenvalue gap is below gap_tol_rel * ||H||_F (non-degeneracy is a
// structural assumption of the decomposition).
BiorthogonalSystem biorthogonalize(const ComplexMatrix& h, double tol = kDefaultTol,
                                   double gap_tol_rel = 1e-8);

// Label a spectrum real/complex by max |Im E_n| against an absolute tolerance.
SpectrumClass classify_spectrum(const Spectrum& s, double reality_tol);

// Low-lying variant: consider only the `count` lowest levels (by real part;
// the spectrum is already canonically sorted). Fock truncation corrupts high
// eigenvalues, so physical reality claims are made about the low block.
SpectrumClass classify_spectrum(const Spectrum& s, double reality_tol, std::size_t count);

// Build g and its derived operators from the left/right states.
// Throws NotPositiveDefinite when g is numerically not a metric (which signals
// a broken biorthonormalization upstream).
MetricOperator build_metric(const BiorthogonalSystem& sys, double tol = kDefaultTol);

// ||H^dagger g - g H||_F / ||g H||_F; zero iff H is pseudo-hermitian w.r.t. g.
double pseudo_hermiticity_residual(const ComplexMatrix& h, const MetricOperator& m);

// K = g^{1/2} H g^{-1/2}. Requires a real spectrum: if the transform fails to
// be hermitian within check_tol (relative), throws ComplexSpectrum.
ComplexMatrix hermitize(const ComplexMatrix& h, const MetricOperator& m,
                        double check_tol = 1e-8);

// Inverse map g^{-1/2} K g^{1/2}; applies to arbitrary observables, no checks.
ComplexMatrix dehermitize(const ComplexMatrix& k, const MetricOperator& m);

// ||P conj(H) P - H|| / ||H|| with T as entrywise conjugation in the chosen
// basis. Throws NotInvolution unless P^2 = I within tol.
double pt_symmetry_check(const ComplexMatrix& h, const ComplexMatrix& p,
                         double tol = kDefaultTol);

// ---- residual diagnostics (test and verify support) ----

// max |<phi_n|psi_m> - delta_nm|
double biorthonormality_residual(const BiorthogonalSystem& sys);

// || sum_n |psi_n><phi_n| - I ||_F
double completeness_residual(const BiorthogonalSystem& sys);

// || V diag(E) V^{-1} - H ||_F / ||H||_F
double reconstruction_residual(const BiorthogonalSystem& sys, const ComplexMatrix& h);

}  // namespace nhqm
