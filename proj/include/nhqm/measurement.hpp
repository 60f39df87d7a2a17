#pragma once

#include <memory>
#include <vector>

#include "nhqm/biortho.hpp"
#include "nhqm/errors.hpp"

namespace nhqm {

// ---- states and apparatus ----

// A state vector tagged with its representation. In the hermitian
// representation the inner product is the standard one; in the non-hermitian
// representation it is <.|g|.> with the attached metric.
struct QuantumState {
  ComplexVector amps;
  std::shared_ptr<const MetricOperator> metric;  // null in the hermitian representation

  bool hermitian_rep() const { return metric == nullptr; }

  static QuantumState hermitian(ComplexVector a) { return {std::move(a), nullptr}; }
  static QuantumState nonhermitian(ComplexVector a, std::shared_ptr<const MetricOperator> m) {
    if (!m) throw MissingMetric("QuantumState: non-hermitian representation requires a metric");
    return {std::move(a), std::move(m)};
  }
};

// Apparatus with a ready state |A0> and one pointer state |A_k> per system level.
struct ApparatusModel {
  Eigen::Index dim_A;
  ComplexVector ready;
  std::vector<ComplexVector> pointers;
};

// ---- probabilities ----

// |<phi_m| U |psi_n>|^2 — probability to reach level m given preparation in
// level n and evolution/transformation U.
double transition_probability(const BiorthogonalSystem& sys, const ComplexMatrix& u,
                              Eigen::Index n, Eigen::Index m);

// <phi_0| = sum_n c_n^* <phi_n| — the dual partner of |psi_0> = sum c_n |psi_n>.
// c must satisfy sum |c_n|^2 = 1 within tol.
ComplexRowVector left_partner(const ComplexVector& c, const BiorthogonalSystem& sys,
                              double tol = 1e-8);

// p_n = |(<psi_n|g)|psi>|^2; agrees with |<phi_n|psi>|^2 identically. psi must be
// normalized in the metric inner product within tol.
double probability_via_metric(const BiorthogonalSystem& sys, const MetricOperator& m,
                              Eigen::Index n, const QuantumState& psi, double tol = 1e-8);

// ---- recording map ----

// U_rec = sum_k |psi_k><phi_k| (x) R_k on system (x) apparatus, where R_k is the
// deterministic Householder-completed unitary with R_k|A0> = |A_k>. Composite
// index ordering is system-major. U_rec maps |psi_k>|A0> -> |psi_k>|A_k> and is
// unitary with respect to g (x) I.
ComplexMatrix build_recording_map(const BiorthogonalSystem& sys, const ApparatusModel& app);

// Unitary R on the apparatus with R|ready> = |target| (both unit vectors),
// completed deterministically via a Householder reflector pair.
ComplexMatrix pointer_unitary(const ComplexVector& ready, const ComplexVector& target);

// ---- repeatability ----

struct RepeatabilityReport {
  // || U^dagger (g x I) U - (g x I) || / || g x I ||
  double norm_residual;
  // entry (m,n): |<phi_m|psi_n> (1 - <A_m|A_n>)| — the repeatability identity
  RealMatrix identity_residuals;
  // entry (m,n): |<psi_m|psi_n> (1 - <A_m|A_n>)| — the naive right-state variant,
  // reported for contrast (non-orthogonal eigenstates make it non-zero)
  RealMatrix naive_residuals;
};

RepeatabilityReport repeatability_residual(const ComplexMatrix& u_rec,
                                           const BiorthogonalSystem& sys,
                                           const ApparatusModel& app, const MetricOperator& m);

}  // namespace nhqm
