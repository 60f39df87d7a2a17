#pragma once

#include <stdexcept>
#include <string>

namespace nhqm {

// ---- error hierarchy ----
// Every failure mode surfaced by the library derives from Error so callers can
// catch broadly or per condition.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// eigensolver iteration cap hit
struct NonConvergence : Error {
  using Error::Error;
};

// numerical rank of the eigenvector set < dim at tolerance (diagonalizability required)
struct Defective : Error {
  using Error::Error;
};

// pivot below threshold during inversion
struct Singular : Error {
  using Error::Error;
};

// input to a hermitian-only operation is not hermitian within tolerance
struct NotHermitian : Error {
  using Error::Error;
};

// sqrt/log of a hermitian matrix with a non-positive eigenvalue
struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// eigenvalue gap below the degeneracy tolerance
struct Degenerate : Error {
  using Error::Error;
};

// operation requires a real spectrum (hermitization refuses otherwise)
struct ComplexSpectrum : Error {
  using Error::Error;
};

// parity operator fails P^2 = I
struct NotInvolution : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

struct NotNormalized : Error {
  using Error::Error;
};

// apparatus pointer count does not match the system dimension
struct PointerCountMismatch : Error {
  using Error::Error;
};

// metric not invertible at the requested time
struct SingularMetric : Error {
  using Error::Error;
};

// integrator watchdog: norm drift beyond threshold, dt too coarse
struct StepTooLarge : Error {
  using Error::Error;
};

// non-hermitian state used without a metric
struct MissingMetric : Error {
  using Error::Error;
};

// invalid run configuration
struct ConfigInvalid : Error {
  using Error::Error;
};

}  // namespace nhqm
