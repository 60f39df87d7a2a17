#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nhqm/errors.hpp"

namespace nhqm {

// ---- core types ----

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using ComplexRowVector = Eigen::RowVectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Eigenvalues in canonical order: ascending real part, ties by ascending
// imaginary part. Kept as a distinct type so ordering is part of the contract.
struct Spectrum {
  std::vector<Complex> values;

  std::size_t size() const { return values.size(); }
  const Complex& operator[](std::size_t i) const { return values[i]; }
};

constexpr double kDefaultTol = 1e-10;

// ---- small helpers ----

inline double frobenius(const ComplexMatrix& m) { return m.norm(); }

// relative deviation from hermiticity, ||M - M^dagger|| / max(1, ||M||)
inline double hermiticity_residual(const ComplexMatrix& m) {
  return (m - m.adjoint()).norm() / std::max(1.0, m.norm());
}

void require_square(const ComplexMatrix& m, const char* what);
void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what);
void require_finite(const ComplexMatrix& m, const char* what);

// ---- general (non-normal) eigendecomposition ----

// Full eigendecomposition M = V diag(E) V^{-1}.
//   - eigenvalues canonically sorted (ascending Re, then Im)
//   - V columns unit-norm with the largest-magnitude component real positive
//   - throws NonConvergence if the QR iteration fails
//   - throws Defective if cond(V) > 1/tol (diagonalizability required)
std::pair<Spectrum, ComplexMatrix> eig_general(const ComplexMatrix& m, double tol = kDefaultTol);

// Eigenvalues only, canonically sorted, no diagonalizability gate. Intended
// for truncation-convergence checks where the doubled-dimension matrix may be
// nearly defective yet its eigenvalues are still meaningful data.
Spectrum eigenvalues_only(const ComplexMatrix& m);

// ---- inversion ----

// Throws Singular when the matrix is not invertible at working precision.
ComplexMatrix invert(const ComplexMatrix& m, double tol = kDefaultTol);

// ---- functions of hermitian matrices ----

enum class HermFn { Sqrt, InvSqrt, Log, Exp };

// f applied through the spectral decomposition of a hermitian matrix.
// Sqrt/InvSqrt/Log require positive-definiteness: min eigenvalue must exceed
// tol * max(1, max eigenvalue). Result is hermitian by construction.
ComplexMatrix herm_matrix_function(const ComplexMatrix& m, HermFn f, double tol = kDefaultTol);

// ---- commutator algebra ----

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Nested-commutator expansion of e^{G/2} H e^{-G/2}:
//   H + (1/2)[G,H] + (1/(2! 2^2))[G,[G,H]] + ... up to `order` nested commutators.
// `order` must not exceed `cap` (default 32).
ComplexMatrix bch_transform(const ComplexMatrix& h, const ComplexMatrix& g, int order,
                            int cap = 32);

}  // namespace nhqm
