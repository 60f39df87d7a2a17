#include <cmath>
#include <complex>

#include "doctest.h"
#include "nhqm/errors.hpp"
#include "nhqm/matrixcore.hpp"

using namespace nhqm;

namespace {

ComplexMatrix upper2() {
  ComplexMatrix h(2, 2);
  h << Complex(1, 0), Complex(1, 0), Complex(0, 0), Complex(2, 0);
  return h;
}

}  // namespace

TEST_CASE("eig_general: 2x2 upper-triangular oracle") {
  const auto [spec, v] = eig_general(upper2());
  REQUIRE(spec.size() == 2);
  CHECK(std::abs(spec[0] - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(spec[1] - Complex(2, 0)) < 1e-14);

  // columns unit-norm, largest component real positive
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(v(0, 0) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(v(1, 0)) < 1e-14);
  CHECK(std::abs(v(0, 1) - Complex(s, 0)) < 1e-14);
  CHECK(std::abs(v(1, 1) - Complex(s, 0)) < 1e-14);
}

TEST_CASE("eig_general: canonical ordering ascending Re then Im") {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = Complex(2, 0);
  m(1, 1) = Complex(1, 1);
  m(2, 2) = Complex(1, -1);
  m(3, 3) = Complex(1, 0);
  const auto [spec, v] = eig_general(m);
  CHECK(std::abs(spec[0] - Complex(1, -1)) < 1e-14);
  CHECK(std::abs(spec[1] - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(spec[2] - Complex(1, 1)) < 1e-14);
  CHECK(std::abs(spec[3] - Complex(2, 0)) < 1e-14);
}

TEST_CASE("eig_general: Jordan block is rejected as defective") {
  ComplexMatrix j(2, 2);
  j << Complex(1, 0), Complex(1, 0), Complex(0, 0), Complex(1, 0);
  CHECK_THROWS_AS(eig_general(j), Defective);
}

TEST_CASE("eig_general: argument validation") {
  CHECK_THROWS_AS(eig_general(ComplexMatrix::Zero(2, 3)), DimensionMismatch);
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 0) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(eig_general(bad), Error);
  CHECK_THROWS_AS(eig_general(ComplexMatrix::Identity(2, 2), -1.0), ConfigInvalid);
}

TEST_CASE("eigenvalues_only: sorted, no defectiveness gate") {
  ComplexMatrix j(2, 2);
  j << Complex(3, 0), Complex(1, 0), Complex(0, 0), Complex(3, 0);
  const Spectrum s = eigenvalues_only(j);  // defective yet fine here
  CHECK(std::abs(s[0] - Complex(3, 0)) < 1e-7);
  CHECK(std::abs(s[1] - Complex(3, 0)) < 1e-7);
}

TEST_CASE("invert: round-trip and singularity") {
  const ComplexMatrix h = upper2();
  const ComplexMatrix hinv = invert(h);
  CHECK((h * hinv - ComplexMatrix::Identity(2, 2)).norm() < 1e-14);
  CHECK(std::abs(hinv(0, 1) - Complex(-0.5, 0)) < 1e-14);

  ComplexMatrix rank1(2, 2);
  rank1 << Complex(1, 0), Complex(1, 0), Complex(1, 0), Complex(1, 0);
  CHECK_THROWS_AS(invert(rank1), Singular);
}

TEST_CASE("herm_matrix_function: square root and friends") {
  ComplexMatrix a(2, 2);
  a << Complex(2, 0), Complex(1, 0), Complex(1, 0), Complex(2, 0);

  const ComplexMatrix r = herm_matrix_function(a, HermFn::Sqrt);
  CHECK((r * r - a).norm() < 1e-13);
  CHECK(hermiticity_residual(r) < 1e-14);

  const ComplexMatrix rinv = herm_matrix_function(a, HermFn::InvSqrt);
  CHECK((r * rinv - ComplexMatrix::Identity(2, 2)).norm() < 1e-13);

  const ComplexMatrix lg = herm_matrix_function(a, HermFn::Log);
  CHECK((herm_matrix_function(lg, HermFn::Exp) - a).norm() < 1e-13);
}

TEST_CASE("herm_matrix_function: input validation") {
  CHECK_THROWS_AS(herm_matrix_function(upper2(), HermFn::Exp), NotHermitian);

  ComplexMatrix indef = ComplexMatrix::Identity(2, 2);
  indef(1, 1) = Complex(-1, 0);
  CHECK_THROWS_AS(herm_matrix_function(indef, HermFn::Sqrt), NotPositiveDefinite);
  CHECK_NOTHROW(herm_matrix_function(indef, HermFn::Exp));  // Exp needs no PD
}

TEST_CASE("commutator algebra: Pauli relations") {
  ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
  sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  sz << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);

  CHECK((commutator(sx, sy) - Complex(0, 2) * sz).norm() < 1e-15);
  CHECK(anticommutator(sx, sy).norm() < 1e-15);
  CHECK((anticommutator(sx, sx) - 2.0 * ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
  CHECK_THROWS_AS(commutator(sx, ComplexMatrix::Zero(3, 3)), DimensionMismatch);
}

TEST_CASE("bch_transform: order 0 is the identity map") {
  const ComplexMatrix h = upper2();
  const ComplexMatrix g = ComplexMatrix::Identity(2, 2) * Complex(0.7, 0);
  CHECK((bch_transform(h, g, 0) - h).norm() == 0.0);
  // G proportional to I commutes: every order gives H back
  CHECK((bch_transform(h, g, 10) - h).norm() < 1e-15);
}

TEST_CASE("bch_transform: converges to the exact hermitian-generator transform") {
  ComplexMatrix g(3, 3);
  g << Complex(0.2, 0), Complex(0.1, 0.3), Complex(0, 0),
       Complex(0.1, -0.3), Complex(-0.4, 0), Complex(0.2, 0.1),
       Complex(0, 0), Complex(0.2, -0.1), Complex(0.1, 0);
  g /= frobenius(g);
  ComplexMatrix h(3, 3);
  h << Complex(1, 0), Complex(2, 1), Complex(0, -1),
       Complex(0, 0), Complex(3, 0), Complex(1, 1),
       Complex(1, 0), Complex(0, 0), Complex(-2, 0);

  const ComplexMatrix ehalf = herm_matrix_function(0.5 * g, HermFn::Exp);
  const ComplexMatrix ehalf_inv = herm_matrix_function(-0.5 * g, HermFn::Exp);
  const ComplexMatrix exact = ehalf * h * ehalf_inv;
  const double rel = (bch_transform(h, g, 20) - exact).norm() / exact.norm();
  CHECK(rel < 1e-12);
}

TEST_CASE("bch_transform: order validation") {
  const ComplexMatrix h = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(bch_transform(h, h, -1), ConfigInvalid);
  CHECK_THROWS_AS(bch_transform(h, h, 33), ConfigInvalid);
  CHECK_NOTHROW(bch_transform(h, h, 40, 64));  // raised cap
}
