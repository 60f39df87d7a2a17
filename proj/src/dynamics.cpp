#include "nhqm/dynamics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "nhqm/errors.hpp"

namespace nhqm {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kNormTol = 1e-8;

// e^{-i E_n t / hbar} for every eigenvalue.
ComplexVector spectral_phases(const Spectrum& s, double t, double hbar) {
  const auto n = static_cast<Eigen::Index>(s.size());
  ComplexVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases[k] = std::exp(-kI * s.values[static_cast<std::size_t>(k)] * t / hbar);
  }
  return phases;
}

void check_spectral_args(const BiorthogonalSystem& sys, const ComplexVector& c,
                         double hbar, const char* where) {
  if (hbar <= 0.0) throw ConfigInvalid(std::string(where) + ": hbar must be positive");
  if (c.size() != sys.dim()) {
    throw DimensionMismatch(std::string(where) + ": coefficient vector has size " +
                            std::to_string(c.size()) + ", system has dimension " +
                            std::to_string(sys.dim()));
  }
  if (std::abs(c.squaredNorm() - 1.0) > kNormTol) {
    throw NotNormalized(std::string(where) + ": coefficients must satisfy sum |c_n|^2 = 1");
  }
}

}  // namespace

// ---- spectral evolution ----

QuantumState evolve_spectral(const BiorthogonalSystem& sys, const ComplexVector& c,
                             double t, double hbar) {
  check_spectral_args(sys, c, hbar, "evolve_spectral");
  const ComplexVector phases = spectral_phases(sys.spectrum, t, hbar);
  return QuantumState::hermitian(sys.right * phases.cwiseProduct(c));
}

ComplexRowVector evolve_left_spectral(const BiorthogonalSystem& sys,
                                      const ComplexVector& c, double t,
                                      double hbar) {
  check_spectral_args(sys, c, hbar, "evolve_left_spectral");
  const ComplexVector phases = spectral_phases(sys.spectrum, t, hbar);
  return phases.cwiseProduct(c).adjoint() * sys.left;
}

// ---- inertial force ----

ComplexMatrix inertial_force(const TimeDependentModel& model, double t) {
  if (!model.Lambda_of_t) {
    throw ConfigInvalid("inertial_force: model carries no metric provider");
  }
  const ComplexMatrix lambda = model.Lambda_of_t(t);
  require_square(lambda, "inertial_force");

  ComplexMatrix dlambda;
  if (model.dLambda_of_t) {
    dlambda = model.dLambda_of_t(t);
  } else {
    const double h =
        model.fd_step > 0.0 ? model.fd_step : 1e-6 * std::max(1.0, std::abs(t));
    dlambda = (model.Lambda_of_t(t + h) - model.Lambda_of_t(t - h)) / (2.0 * h);
  }
  require_same_dim(lambda, dlambda, "inertial_force");

  Eigen::LLT<ComplexMatrix> llt(lambda);
  if (llt.info() != Eigen::Success) {
    throw SingularMetric("inertial_force: metric is not positive definite at t = " +
                         std::to_string(t));
  }
  return Complex(0.0, -0.5 * model.hbar) * llt.solve(dlambda);
}

// ---- time-dependent integration ----

namespace {

// Per-time scalar record: u = Lambda_t^{1/2} psi (or psi itself when the
// model carries no metric), overlap = <psi|Lambda_t|psi> = <u|u>, and the
// normalized expectation <u|x|u>/<u|u>.
TrajectoryRecord make_record(const TimeDependentModel& model, double t,
                             const ComplexVector& psi) {
  ComplexVector u;
  if (model.metric_half_apply) {
    u = model.metric_half_apply(t, psi);
  } else if (model.Lambda_of_t) {
    const ComplexMatrix half =
        herm_matrix_function(model.Lambda_of_t(t), HermFn::Sqrt);
    u = half * psi;
  } else {
    u = psi;
  }
  TrajectoryRecord rec;
  rec.overlap = Complex(u.squaredNorm(), 0.0);
  if (model.x_op.size() > 0) {
    const double norm2 = u.squaredNorm();
    rec.x_expect = norm2 > 0.0 ? u.dot(model.x_op * u).real() / norm2 : 0.0;
  }
  return rec;
}

}  // namespace

Trajectory evolve_timedep(const TimeDependentModel& model, const ComplexVector& psi0,
                          std::pair<double, double> t_span, double dt,
                          bool include_force, double watchdog) {
  if (!model.H_of_t && !model.H_apply) {
    throw ConfigInvalid("evolve_timedep: model carries no hamiltonian provider");
  }
  if (psi0.size() != model.dim) {
    throw DimensionMismatch("evolve_timedep: initial state has size " +
                            std::to_string(psi0.size()) + ", model has dimension " +
                            std::to_string(model.dim));
  }
  if (model.hbar <= 0.0) throw ConfigInvalid("evolve_timedep: hbar must be positive");
  const double t0 = t_span.first;
  const double t1 = t_span.second;
  const double span = t1 - t0;
  if (!(span > 0.0)) throw ConfigInvalid("evolve_timedep: t_span must satisfy t1 > t0");
  if (!(dt > 0.0)) throw ConfigInvalid("evolve_timedep: dt must be positive");
  if (dt > span * (1.0 + 1e-12)) {
    throw ConfigInvalid("evolve_timedep: dt exceeds the integration span");
  }
  if (include_force && !(model.Lambda_of_t || (model.F_apply && model.metric_half_apply))) {
    throw ConfigInvalid("evolve_timedep: force requested but model carries no metric");
  }

  const double hbar = model.hbar;
  const Complex minus_i_over_hbar(0.0, -1.0 / hbar);

  // Fast path only when every needed operator has an apply closure.
  const bool fast = static_cast<bool>(model.H_apply) &&
                    (!include_force || static_cast<bool>(model.F_apply));
  if (!fast && !model.H_of_t) {
    throw ConfigInvalid(
        "evolve_timedep: force requires either F_apply or a materializable H_of_t");
  }

  // dpsi/dt = (-i/hbar) (H_t [+ F_t]) psi.
  const auto deriv_fast = [&](double t, const ComplexVector& v) -> ComplexVector {
    ComplexVector hv = model.H_apply(t, v);
    if (include_force) hv += model.F_apply(t, v);
    return minus_i_over_hbar * hv;
  };
  const auto generator_matrix = [&](double t) -> ComplexMatrix {
    ComplexMatrix a = model.H_of_t(t);
    require_square(a, "evolve_timedep");
    if (include_force) a += inertial_force(model, t);
    return minus_i_over_hbar * a;
  };

  const auto n_steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));

  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.records.reserve(n_steps + 1);

  ComplexVector psi = psi0;
  double t = t0;

  const TrajectoryRecord first = make_record(model, t, psi);
  if (std::abs(first.overlap.real() - 1.0) > kNormTol) {
    throw NotNormalized(
        "evolve_timedep: initial state must be metric-normalized at t0");
  }
  const double overlap0 = first.overlap.real();
  traj.times.push_back(t);
  traj.states.push_back(psi);
  traj.records.push_back(first);

  for (std::size_t step = 0; step < n_steps; ++step) {
    const double h = std::min(dt, t1 - t);

    ComplexVector k1, k2, k3, k4;
    if (fast) {
      k1 = deriv_fast(t, psi);
      k2 = deriv_fast(t + 0.5 * h, psi + (0.5 * h) * k1);
      k3 = deriv_fast(t + 0.5 * h, psi + (0.5 * h) * k2);
      k4 = deriv_fast(t + h, psi + h * k3);
    } else {
      const ComplexMatrix a0 = generator_matrix(t);
      const ComplexMatrix am = generator_matrix(t + 0.5 * h);
      const ComplexMatrix a1 = generator_matrix(t + h);
      k1 = a0 * psi;
      k2 = am * (psi + (0.5 * h) * k1);
      k3 = am * (psi + (0.5 * h) * k2);
      k4 = a1 * (psi + h * k3);
    }
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = (step + 1 == n_steps) ? t1 : t + h;

    const TrajectoryRecord rec = make_record(model, t, psi);
    if (include_force && std::abs(rec.overlap.real() - overlap0) > watchdog) {
      throw StepTooLarge("evolve_timedep: metric norm drifted by " +
                         std::to_string(std::abs(rec.overlap.real() - overlap0)) +
                         " at t = " + std::to_string(t) + "; reduce dt");
    }
    traj.times.push_back(t);
    traj.states.push_back(psi);
    traj.records.push_back(rec);
  }
  return traj;
}

// ---- expectation values ----

double expectation_position(const QuantumState& state, const ComplexMatrix& x_op,
                            const MetricOperator* metric_at_t) {
  require_square(x_op, "expectation_position");
  if (x_op.rows() != state.amps.size()) {
    throw DimensionMismatch("expectation_position: operator and state dimensions differ");
  }
  const MetricOperator* metric = metric_at_t;
  if (metric == nullptr && state.metric) metric = state.metric.get();
  if (metric == nullptr && !state.hermitian_rep()) {
    throw MissingMetric("expectation_position: non-hermitian state without a metric");
  }

  ComplexVector u;
  if (metric != nullptr) {
    if (metric->dim() != state.amps.size()) {
      throw DimensionMismatch("expectation_position: metric and state dimensions differ");
    }
    u = metric->g_sqrt * state.amps;
  } else {
    u = state.amps;
  }
  const double norm2 = u.squaredNorm();
  if (norm2 <= 0.0) {
    throw NotNormalized("expectation_position: state has zero norm");
  }
  return u.dot(x_op * u).real() / norm2;
}

}  // namespace nhqm
