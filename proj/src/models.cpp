#include "nhqm/models.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nhqm/errors.hpp"

namespace nhqm {

namespace {

void validate(const FockSpace& fs) {
  if (fs.N < 2) throw ConfigInvalid("FockSpace: dimension must be at least 2");
  if (fs.hbar <= 0.0 || fs.m <= 0.0 || fs.omega <= 0.0) {
    throw ConfigInvalid("FockSpace: hbar, m, omega must be positive");
  }
}

// V(x) = sum_k c_k x^k by Horner's rule on the truncated x.
ComplexMatrix potential_polynomial(const ComplexMatrix& x,
                                   const std::vector<double>& coeffs) {
  const Eigen::Index n = x.rows();
  ComplexMatrix v = ComplexMatrix::Zero(n, n);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    v = v * x + *it * ComplexMatrix::Identity(n, n);
  }
  return v;
}

}  // namespace

// ---- operator bundles ----

FockOperators fock_operators(const FockSpace& fs) {
  validate(fs);
  const Eigen::Index n = fs.N;
  const double alpha = fs.alpha();

  FockOperators ops;
  ops.a = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    ops.a(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
  }
  ops.a_dag = ops.a.adjoint();
  ops.x = alpha * (ops.a + ops.a_dag);
  ops.p = Complex(0.0, std::sqrt(fs.m * fs.omega * fs.hbar / 2.0)) *
          (ops.a_dag - ops.a);

  ops.H0 = ComplexMatrix::Zero(n, n);
  ops.parity = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    ops.H0(k, k) = fs.hbar * fs.omega * (static_cast<double>(k) + 0.5);
    ops.parity(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  }
  return ops;
}

// ---- example builders ----

ComplexMatrix cubic_pt_hamiltonian(const FockSpace& fs, double eps) {
  const FockOperators ops = fock_operators(fs);
  return ops.H0 + Complex(0.0, eps) * (ops.x * ops.x * ops.x);
}

ComplexMatrix perturbative_hermitian(const FockSpace& fs, double eps) {
  const FockOperators ops = fock_operators(fs);
  const ComplexMatrix x2 = ops.x * ops.x;
  const ComplexMatrix p2 = ops.p * ops.p;
  const double pref = eps * eps / (fs.m * std::pow(fs.omega, 4));
  const double quartic = 1.5 * fs.m * fs.omega * fs.omega;
  return ops.H0 + pref * (anticommutator(x2, p2) + ops.p * x2 * ops.p +
                          quartic * (x2 * x2));
}

GaugeModel gauge_hamiltonian(const FockSpace& fs, double eta,
                             const std::vector<double>& v_coeffs) {
  const FockOperators ops = fock_operators(fs);
  const Eigen::Index n = fs.N;

  std::vector<double> coeffs = v_coeffs;
  if (coeffs.empty()) {
    coeffs = {0.0, 0.0, 0.5 * fs.m * fs.omega * fs.omega};  // harmonic trap
  }

  const ComplexMatrix pshift =
      ops.p - Complex(0.0, fs.hbar * eta) * ComplexMatrix::Identity(n, n);

  GaugeModel model;
  model.H = pshift * pshift / (2.0 * fs.m) + potential_polynomial(ops.x, coeffs);

  // The metric family e^{2 eta x} is assembled from one eigendecomposition of
  // the (hermitian) truncated x, which also yields the roots and the
  // generator exactly.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ops.x);
  if (es.info() != Eigen::Success) {
    throw NonConvergence("gauge_hamiltonian: eigensolver failed on x");
  }
  const ComplexMatrix& q = es.eigenvectors();
  const RealVector& d = es.eigenvalues();

  const auto exp_of = [&](double scale) -> ComplexMatrix {
    const RealVector e = (scale * d.array()).exp();
    return q * e.asDiagonal() * q.adjoint();
  };
  model.metric.g = exp_of(2.0 * eta);
  model.metric.g_inv = exp_of(-2.0 * eta);
  model.metric.g_sqrt = exp_of(eta);
  model.metric.g_inv_sqrt = exp_of(-eta);
  model.metric.G_log = 2.0 * eta * ops.x;
  return model;
}

TimeDependentModel driven_oscillator_model(const FockSpace& fs,
                                           const ScheduleLinear& sched) {
  if (sched.tau <= 0.0) throw ConfigInvalid("ScheduleLinear: tau must be positive");
  const FockOperators ops = fock_operators(fs);
  const Eigen::Index n = fs.N;
  const double alpha = fs.alpha();
  const double hw = fs.hbar * fs.omega;

  // Shared, immutable pieces captured by value in the closures below.
  const ComplexMatrix h0 = ops.H0;
  const ComplexMatrix drive = ops.a_dag - ops.a;
  const ComplexMatrix x = ops.x;

  // One eigendecomposition of x serves the whole metric family
  // Lambda_t = e^{2 eta_t x} and its exact time derivative.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(x);
  if (es.info() != Eigen::Success) {
    throw NonConvergence("driven_oscillator_model: eigensolver failed on x");
  }
  const ComplexMatrix q = es.eigenvectors();
  const RealVector d = es.eigenvalues();

  TimeDependentModel model;
  model.dim = n;
  model.hbar = fs.hbar;

  model.H_of_t = [=](double t) -> ComplexMatrix {
    const double eta = sched.eta(t);
    ComplexMatrix h = h0 + (hw * alpha * eta) * drive;
    h.diagonal().array() -= hw * alpha * alpha * eta * eta;
    return h;
  };
  model.Lambda_of_t = [=](double t) -> ComplexMatrix {
    const RealVector e = (2.0 * sched.eta(t) * d.array()).exp();
    return q * e.asDiagonal() * q.adjoint();
  };
  model.dLambda_of_t = [=](double t) -> ComplexMatrix {
    const RealVector e =
        2.0 * sched.deta() * d.array() * (2.0 * sched.eta(t) * d.array()).exp();
    return q * e.asDiagonal() * q.adjoint();
  };

  model.H_apply = [=](double t, const ComplexVector& v) -> ComplexVector {
    const double eta = sched.eta(t);
    return h0 * v + (hw * alpha * eta) * (drive * v) -
           (hw * alpha * alpha * eta * eta) * v;
  };
  // F_t = -(i hbar / 2) Lambda^{-1} dLambda = -i hbar (deta) x for this family.
  model.F_apply = [=](double /*t*/, const ComplexVector& v) -> ComplexVector {
    return Complex(0.0, -fs.hbar * sched.deta()) * (x * v);
  };
  model.metric_half_apply = [=](double t, const ComplexVector& v) -> ComplexVector {
    const Eigen::ArrayXd e = (sched.eta(t) * d.array()).exp();
    return q * (e * (q.adjoint() * v).array()).matrix();
  };
  model.x_op = x;
  return model;
}

// ---- truncation convergence gate ----

namespace {

std::vector<double> sorted_real_levels(const Spectrum& s, double im_tol) {
  std::vector<double> reals;
  reals.reserve(s.size());
  for (const Complex& e : s.values) {
    if (std::abs(e.imag()) <= im_tol) reals.push_back(e.real());
  }
  std::sort(reals.begin(), reals.end());
  return reals;
}

}  // namespace

std::vector<double> converged_levels(
    const std::function<ComplexMatrix(Eigen::Index)>& builder, Eigen::Index n,
    Eigen::Index k, double rel_tol, double im_tol) {
  if (!builder) throw ConfigInvalid("converged_levels: builder must be callable");
  if (n < 2 || k < 1) throw ConfigInvalid("converged_levels: need n >= 2 and k >= 1");

  const std::vector<double> coarse =
      sorted_real_levels(eigenvalues_only(builder(n)), im_tol);
  const std::vector<double> fine =
      sorted_real_levels(eigenvalues_only(builder(2 * n)), im_tol);
  if (fine.empty()) return {};

  std::vector<double> kept;
  for (const double e : coarse) {
    if (kept.size() == static_cast<std::size_t>(k)) break;
    // nearest value in the sorted doubled-N list
    const auto it = std::lower_bound(fine.begin(), fine.end(), e);
    double best = std::numeric_limits<double>::infinity();
    if (it != fine.end()) best = std::min(best, std::abs(*it - e));
    if (it != fine.begin()) best = std::min(best, std::abs(*(it - 1) - e));
    if (best <= rel_tol * std::max(1.0, std::abs(e))) kept.push_back(e);
  }
  return kept;
}

}  // namespace nhqm
