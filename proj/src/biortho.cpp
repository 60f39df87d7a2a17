#include "nhqm/biortho.hpp"

#include <algorithm>
#include <cmath>

namespace nhqm {

// ---- biorthogonalize ----

BiorthogonalSystem biorthogonalize(const ComplexMatrix& h, double tol, double gap_tol_rel) {
  auto [spec, v] = eig_general(h, tol);

  const double gap_tol = gap_tol_rel * h.norm();
  const std::size_t n = spec.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(spec.values[i] - spec.values[j]) < gap_tol)
        throw Degenerate("biorthogonalize: eigenvalue gap below tolerance");
    }
  }

  BiorthogonalSystem sys;
  sys.left = invert(v, tol);
  sys.spectrum = std::move(spec);
  sys.right = std::move(v);
  return sys;
}

// ---- classify_spectrum ----

SpectrumClass classify_spectrum(const Spectrum& s, double reality_tol) {
  return classify_spectrum(s, reality_tol, s.size());
}

SpectrumClass classify_spectrum(const Spectrum& s, double reality_tol, std::size_t count) {
  const std::size_t n = std::min(count, s.size());
  double max_imag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_imag = std::max(max_imag, std::abs(s.values[i].imag()));
  SpectrumClass c;
  c.max_imag = max_imag;
  c.label = (max_imag <= reality_tol) ? SpectrumLabel::Real : SpectrumLabel::Complex;
  return c;
}

// ---- build_metric ----

MetricOperator build_metric(const BiorthogonalSystem& sys, double tol) {
  MetricOperator m;
  // g = sum_m |phi_m><phi_m| = L^dagger L with L = V^{-1} (phi_m as rows)
  m.g = sys.left.adjoint() * sys.left;
  // explicit inverse map: g^{-1} = sum_n |psi_n><psi_n| = V V^dagger
  m.g_inv = sys.right * sys.right.adjoint();
  try {
    m.g_sqrt = herm_matrix_function(m.g, HermFn::Sqrt, tol);
    m.g_inv_sqrt = herm_matrix_function(m.g, HermFn::InvSqrt, tol);
    m.G_log = herm_matrix_function(m.g, HermFn::Log, tol);
  } catch (const NotPositiveDefinite&) {
    throw NotPositiveDefinite("build_metric: g not positive-definite at tolerance");
  } catch (const NotHermitian&) {
    throw NotPositiveDefinite("build_metric: g not hermitian at tolerance");
  }
  return m;
}

// ---- pseudo-hermiticity ----

double pseudo_hermiticity_residual(const ComplexMatrix& h, const MetricOperator& m) {
  require_same_dim(h, m.g, "pseudo_hermiticity_residual");
  const ComplexMatrix gh = m.g * h;
  return (h.adjoint() * m.g - gh).norm() / gh.norm();
}

// ---- hermitize / dehermitize ----

ComplexMatrix hermitize(const ComplexMatrix& h, const MetricOperator& m, double check_tol) {
  require_same_dim(h, m.g, "hermitize");
  ComplexMatrix k = m.g_sqrt * h * m.g_inv_sqrt;
  if (hermiticity_residual(k) > check_tol)
    throw ComplexSpectrum(
        "hermitize: transform not hermitian at tolerance (spectrum not real, or metric "
        "numerically unusable)");
  return k;
}

ComplexMatrix dehermitize(const ComplexMatrix& k, const MetricOperator& m) {
  require_same_dim(k, m.g, "dehermitize");
  return m.g_inv_sqrt * k * m.g_sqrt;
}

// ---- PT symmetry ----

double pt_symmetry_check(const ComplexMatrix& h, const ComplexMatrix& p, double tol) {
  require_same_dim(h, p, "pt_symmetry_check");
  const Eigen::Index n = p.rows();
  if ((p * p - ComplexMatrix::Identity(n, n)).norm() > tol * std::max(1.0, p.norm() * p.norm()))
    throw NotInvolution("pt_symmetry_check: P^2 != I within tolerance");
  return (p * h.conjugate() * p - h).norm() / h.norm();
}

// ---- residual diagnostics ----

double biorthonormality_residual(const BiorthogonalSystem& sys) {
  const Eigen::Index n = sys.dim();
  return (sys.left * sys.right - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

double completeness_residual(const BiorthogonalSystem& sys) {
  const Eigen::Index n = sys.dim();
  return (sys.right * sys.left - ComplexMatrix::Identity(n, n)).norm();
}

double reconstruction_residual(const BiorthogonalSystem& sys, const ComplexMatrix& h) {
  ComplexVector e(static_cast<Eigen::Index>(sys.spectrum.size()));
  for (Eigen::Index i = 0; i < e.size(); ++i)
    e[i] = sys.spectrum.values[static_cast<std::size_t>(i)];
  return (sys.right * e.asDiagonal() * sys.left - h).norm() / h.norm();
}

}  // namespace nhqm
