#include "nhqm/matrixcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace nhqm {

// ---- validation helpers ----

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionMismatch(std::string(what) + ": matrix must be square and non-empty");
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string(what) + ": dimensions differ");
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw Error(std::string(what) + ": non-finite entries");
}

namespace {

// canonical permutation: ascending real part, ties by ascending imaginary part
std::vector<Eigen::Index> canonical_order(const ComplexVector& e) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(e.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (e[a].real() != e[b].real()) return e[a].real() < e[b].real();
    return e[a].imag() < e[b].imag();
  });
  return idx;
}

// unit norm, largest-magnitude component made real positive (first index on ties)
void fix_column_phase(Eigen::Ref<ComplexVector> col) {
  col.normalize();
  Eigen::Index k = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double a = std::abs(col[i]);
    if (a > best) {
      best = a;
      k = i;
    }
  }
  if (best <= 0.0) return;
  const Complex phase = col[k] / best;
  col /= phase;
}

double condition_number(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace

// ---- eig_general ----

std::pair<Spectrum, ComplexMatrix> eig_general(const ComplexMatrix& m, double tol) {
  require_square(m, "eig_general");
  require_finite(m, "eig_general");
  if (tol <= 0.0) throw ConfigInvalid("eig_general: tol must be positive");

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("eig_general: QR iteration did not converge");

  const ComplexVector e_raw = solver.eigenvalues();
  const auto idx = canonical_order(e_raw);

  Spectrum spec;
  spec.values.reserve(idx.size());
  ComplexMatrix v(m.rows(), m.cols());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    spec.values.push_back(e_raw[idx[j]]);
    v.col(static_cast<Eigen::Index>(j)) = solver.eigenvectors().col(idx[j]);
    fix_column_phase(v.col(static_cast<Eigen::Index>(j)));
  }

  if (condition_number(v) > 1.0 / tol)
    throw Defective("eig_general: eigenvector set numerically rank-deficient (cond(V) > 1/tol)");

  return {std::move(spec), std::move(v)};
}

Spectrum eigenvalues_only(const ComplexMatrix& m) {
  require_square(m, "eigenvalues_only");
  require_finite(m, "eigenvalues_only");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("eigenvalues_only: QR iteration did not converge");
  const ComplexVector e_raw = solver.eigenvalues();
  const auto idx = canonical_order(e_raw);
  Spectrum spec;
  spec.values.reserve(idx.size());
  for (auto i : idx) spec.values.push_back(e_raw[i]);
  return spec;
}

// ---- invert ----

ComplexMatrix invert(const ComplexMatrix& m, double tol) {
  require_square(m, "invert");
  require_finite(m, "invert");
  Eigen::FullPivLU<ComplexMatrix> lu(m);
  lu.setThreshold(tol);
  if (!lu.isInvertible()) throw Singular("invert: pivot below threshold");
  return lu.inverse();
}

// ---- herm_matrix_function ----

ComplexMatrix herm_matrix_function(const ComplexMatrix& m, HermFn f, double tol) {
  require_square(m, "herm_matrix_function");
  require_finite(m, "herm_matrix_function");
  if (hermiticity_residual(m) > tol)
    throw NotHermitian("herm_matrix_function: input not hermitian within tolerance");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m + m.adjoint()));
  if (solver.info() != Eigen::Success)
    throw NonConvergence("herm_matrix_function: hermitian eigensolver failed");

  const RealVector ew = solver.eigenvalues();
  const ComplexMatrix& u = solver.eigenvectors();

  const bool needs_pd = (f == HermFn::Sqrt || f == HermFn::InvSqrt || f == HermFn::Log);
  if (needs_pd) {
    const double floor = tol * std::max(1.0, ew.maxCoeff());
    if (ew.minCoeff() <= floor)
      throw NotPositiveDefinite("herm_matrix_function: min eigenvalue at or below tolerance");
  }

  RealVector fw(ew.size());
  for (Eigen::Index i = 0; i < ew.size(); ++i) {
    switch (f) {
      case HermFn::Sqrt: fw[i] = std::sqrt(ew[i]); break;
      case HermFn::InvSqrt: fw[i] = 1.0 / std::sqrt(ew[i]); break;
      case HermFn::Log: fw[i] = std::log(ew[i]); break;
      case HermFn::Exp: fw[i] = std::exp(ew[i]); break;
    }
  }
  return u * fw.asDiagonal() * u.adjoint();
}

// ---- commutator algebra ----

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "anticommutator");
  return a * b + b * a;
}

ComplexMatrix bch_transform(const ComplexMatrix& h, const ComplexMatrix& g, int order, int cap) {
  require_same_dim(h, g, "bch_transform");
  if (order < 0) throw ConfigInvalid("bch_transform: order must be non-negative");
  if (order > cap) throw ConfigInvalid("bch_transform: order exceeds configured cap");

  // partial sum of e^{G/2} H e^{-G/2}: term_k = ad_G^k(H) / (k! 2^k)
  ComplexMatrix result = h;
  ComplexMatrix term = h;
  double coef = 1.0;
  for (int k = 1; k <= order; ++k) {
    term = g * term - term * g;
    coef /= 2.0 * k;
    result.noalias() += coef * term;
  }
  return result;
}

}  // namespace nhqm
