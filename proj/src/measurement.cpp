#include "nhqm/measurement.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace nhqm {

// ---- probabilities ----

double transition_probability(const BiorthogonalSystem& sys, const ComplexMatrix& u,
                              Eigen::Index n, Eigen::Index m) {
  require_same_dim(u, sys.right, "transition_probability");
  const Eigen::Index dim = sys.dim();
  if (n < 0 || n >= dim || m < 0 || m >= dim)
    throw IndexOutOfRange("transition_probability: level index out of range");
  const Complex amp = (sys.left.row(m) * (u * sys.right.col(n))).value();
  return std::norm(amp);
}

ComplexRowVector left_partner(const ComplexVector& c, const BiorthogonalSystem& sys, double tol) {
  if (c.size() != sys.dim())
    throw DimensionMismatch("left_partner: coefficient count != system dimension");
  if (std::abs(c.squaredNorm() - 1.0) > tol)
    throw NotNormalized("left_partner: sum |c_n|^2 != 1 within tolerance");
  // sum_n c_n^* <phi_n| — rows of `left` are the <phi_n|
  return c.adjoint() * sys.left;
}

double probability_via_metric(const BiorthogonalSystem& sys, const MetricOperator& m,
                              Eigen::Index n, const QuantumState& psi, double tol) {
  if (n < 0 || n >= sys.dim()) throw IndexOutOfRange("probability_via_metric: index out of range");
  if (psi.amps.size() != sys.dim())
    throw DimensionMismatch("probability_via_metric: state dimension mismatch");
  const ComplexVector g_psi = m.g * psi.amps;
  const double metric_norm = psi.amps.dot(g_psi).real();
  if (std::abs(metric_norm - 1.0) > tol)
    throw NotNormalized("probability_via_metric: state not metric-normalized");
  const Complex amp = sys.right.col(n).dot(g_psi);
  return std::norm(amp);
}

// ---- recording map ----

namespace {

// LAPACK-style elementary reflector: for unit v, returns the hermitian unitary
// Hm with Hm v = -phase * e0, reporting `phase` = e^{i arg v0}.
std::pair<ComplexMatrix, Complex> reflector_to_e0(const ComplexVector& v) {
  const Eigen::Index n = v.size();
  ComplexVector u = v;
  Complex phase(1.0, 0.0);
  if (std::abs(u[0]) > 0.0) phase = u[0] / std::abs(u[0]);
  u[0] += phase * v.norm();
  const double u2 = u.squaredNorm();
  ComplexMatrix hm = ComplexMatrix::Identity(n, n);
  if (u2 > 0.0) hm -= (2.0 / u2) * (u * u.adjoint());
  return {std::move(hm), -phase};
}

}  // namespace

ComplexMatrix pointer_unitary(const ComplexVector& ready, const ComplexVector& target) {
  if (ready.size() != target.size())
    throw DimensionMismatch("pointer_unitary: apparatus dimensions differ");
  auto [ha, pa] = reflector_to_e0(ready);   // ha * ready  = pa * e0
  auto [hb, pb] = reflector_to_e0(target);  // hb * target = pb * e0
  // R = hb^{-1} * diag(pb/pa, 1, ..., 1) * ha maps ready -> target; hb is its own inverse.
  ComplexMatrix r = ha;
  r.row(0) *= pb / pa;
  return hb * r;
}

ComplexMatrix build_recording_map(const BiorthogonalSystem& sys, const ApparatusModel& app) {
  const Eigen::Index dim_s = sys.dim();
  if (static_cast<Eigen::Index>(app.pointers.size()) != dim_s)
    throw PointerCountMismatch("build_recording_map: pointer count != system dimension");
  if (app.ready.size() != app.dim_A)
    throw DimensionMismatch("build_recording_map: ready state dimension != dim_A");

  ComplexMatrix u = ComplexMatrix::Zero(dim_s * app.dim_A, dim_s * app.dim_A);
  for (Eigen::Index k = 0; k < dim_s; ++k) {
    if (app.pointers[static_cast<std::size_t>(k)].size() != app.dim_A)
      throw DimensionMismatch("build_recording_map: pointer state dimension != dim_A");
    const ComplexMatrix proj = sys.right.col(k) * sys.left.row(k);  // |psi_k><phi_k|
    const ComplexMatrix r_k =
        pointer_unitary(app.ready, app.pointers[static_cast<std::size_t>(k)]);
    u += Eigen::kroneckerProduct(proj, r_k);  // system-major ordering
  }
  return u;
}

// ---- repeatability ----

RepeatabilityReport repeatability_residual(const ComplexMatrix& u_rec,
                                           const BiorthogonalSystem& sys,
                                           const ApparatusModel& app, const MetricOperator& m) {
  const Eigen::Index dim_s = sys.dim();
  if (static_cast<Eigen::Index>(app.pointers.size()) != dim_s)
    throw PointerCountMismatch("repeatability_residual: pointer count != system dimension");

  RepeatabilityReport rep;

  const ComplexMatrix composite_metric =
      Eigen::kroneckerProduct(m.g, ComplexMatrix::Identity(app.dim_A, app.dim_A));
  rep.norm_residual = (u_rec.adjoint() * composite_metric * u_rec - composite_metric).norm() /
                      composite_metric.norm();

  rep.identity_residuals.resize(dim_s, dim_s);
  rep.naive_residuals.resize(dim_s, dim_s);
  for (Eigen::Index mm = 0; mm < dim_s; ++mm) {
    for (Eigen::Index nn = 0; nn < dim_s; ++nn) {
      const Complex pointer_ov = app.pointers[static_cast<std::size_t>(mm)].dot(
          app.pointers[static_cast<std::size_t>(nn)]);
      const Complex biortho_ov = (sys.left.row(mm) * sys.right.col(nn)).value();
      const Complex naive_ov = sys.right.col(mm).dot(sys.right.col(nn));
      rep.identity_residuals(mm, nn) = std::abs(biortho_ov * (1.0 - pointer_ov));
      rep.naive_residuals(mm, nn) = std::abs(naive_ov * (1.0 - pointer_ov));
    }
  }
  return rep;
}

}  // namespace nhqm
