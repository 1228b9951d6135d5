#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmetric/errors.hpp"
#include "qmetric/fock.hpp"
#include "qmetric/lee.hpp"

using namespace qmetric;
using fock::Basis;
using fock::Mode;

TEST_CASE("basis dimension is 4(n_max+1)") {
  CHECK(Basis(1).dim() == 8);
  CHECK(Basis(8).dim() == 36);
}

TEST_CASE("basis rejects n_max = 0") {
  CHECK_THROWS_AS(Basis(0), ValidationError);
  CHECK_THROWS_AS(Basis(-3), ValidationError);
}

TEST_CASE("index_of is a bijection onto 0..dim-1") {
  Basis basis(3);
  for (int k = 0; k < basis.dim(); ++k) {
    CHECK(basis.index_of(basis.state(k)) == k);
  }
}

TEST_CASE("ordering is lexicographic in (n, n_V, n_N)") {
  Basis basis(2);
  CHECK(basis.state(0) == fock::Occupation{0, 0, 0});
  CHECK(basis.state(1) == fock::Occupation{0, 0, 1});
  CHECK(basis.state(2) == fock::Occupation{0, 1, 0});
  CHECK(basis.state(4) == fock::Occupation{1, 0, 0});
}

TEST_CASE("boson ladder matrix elements") {
  Basis basis(4);
  ComplexMatrix th = fock::ladder(basis, Mode::Theta);
  const int i0 = basis.index_of({0, 0, 0});
  const int i1 = basis.index_of({1, 0, 0});
  const int i2 = basis.index_of({2, 0, 0});
  CHECK(th(i0, i1) == Complex(1.0));
  CHECK(th(i1, i2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("V annihilates its empty mode") {
  Basis basis(3);
  ComplexMatrix v = fock::ladder(basis, Mode::V);
  for (int n = 0; n <= 3; ++n) {
    for (int nn = 0; nn <= 1; ++nn) {
      CHECK((v * fock::basis_vector(basis, {n, 0, nn})).norm() == 0.0);
    }
  }
}

TEST_CASE("truncation: theta^dag annihilates the top level") {
  Basis basis(3);
  ComplexMatrix thd = fock::ladder(basis, Mode::Theta, true);
  ComplexMatrix nth = thd * fock::ladder(basis, Mode::Theta);
  for (int nv = 0; nv <= 1; ++nv) {
    for (int nn = 0; nn <= 1; ++nn) {
      ComplexVector top = fock::basis_vector(basis, {3, nv, nn});
      CHECK((thd * top).norm() == 0.0);
      CHECK((nth * top - 3.0 * top).norm() <= 1e-14);
    }
  }
}

TEST_CASE("commutator algebra of the truncated modes") {
  Basis basis(5);
  const int d = basis.dim();
  ComplexMatrix th = fock::ladder(basis, Mode::Theta);
  ComplexMatrix thd = fock::ladder(basis, Mode::Theta, true);
  ComplexMatrix v = fock::ladder(basis, Mode::V);
  ComplexMatrix vd = fock::ladder(basis, Mode::V, true);
  ComplexMatrix nl = fock::ladder(basis, Mode::N);
  ComplexMatrix nd = fock::ladder(basis, Mode::N, true);
  ComplexMatrix id = ComplexMatrix::Identity(d, d);

  // [theta, theta^dag] = 1 below the cutoff.
  ComplexMatrix comm = th * thd - thd * th;
  for (int k = 0; k < d; ++k) {
    if (basis.state(k).n < basis.n_max()) {
      ComplexVector e = fock::basis_vector(basis, basis.state(k));
      CHECK((comm * e - e).norm() < 1e-14);
    }
  }

  CHECK((v * v).norm() == 0.0);
  CHECK((nl * nl).norm() == 0.0);
  CHECK((v * vd + vd * v - id).norm() < 1e-14);
  CHECK((nl * nd + nd * nl - id).norm() < 1e-14);
  // Different fermion species anticommute.
  CHECK((v * nd + nd * v).norm() < 1e-14);
}

TEST_CASE("number operator diagonal values") {
  Basis basis(4);
  ComplexMatrix nth = fock::number_op(basis, Mode::Theta);
  ComplexVector e = fock::basis_vector(basis, {3, 1, 0});
  CHECK((nth * e - 3.0 * e).norm() == 0.0);
}

TEST_CASE("number combinations conserved by the interacting Hamiltonian") {
  lee::Params p{1.0, 1.5, 1.0, 0.1, 6};
  Basis basis(p.n_max);
  ComplexMatrix h = lee::hamiltonian(p, basis);
  ComplexMatrix nth = fock::number_op(basis, Mode::Theta);
  ComplexMatrix nv = fock::number_op(basis, Mode::V);
  ComplexMatrix nn = fock::number_op(basis, Mode::N);
  CHECK(((nv + nn) * h - h * (nv + nn)).norm() <= 1e-12);
  CHECK(((nv + nth) * h - h * (nv + nth)).norm() <= 1e-12);
}

TEST_CASE("parity action and algebra") {
  Basis basis(4);
  ComplexMatrix par = fock::parity_op(basis);
  ComplexVector vac = fock::basis_vector(basis, {0, 0, 0});
  ComplexVector odd = fock::basis_vector(basis, {2, 1, 0});
  CHECK((par * vac - vac).norm() == 0.0);
  CHECK((par * odd + odd).norm() == 0.0);
  CHECK((par * par - ComplexMatrix::Identity(basis.dim(), basis.dim())).norm() == 0.0);
  CHECK(hermiticity_residual(par) == 0.0);

  for (Mode m : {Mode::Theta, Mode::V, Mode::N}) {
    ComplexMatrix num = fock::number_op(basis, m);
    CHECK((par * num - num * par).norm() == 0.0);
    ComplexMatrix lad = fock::ladder(basis, m);
    CHECK((par * lad + lad * par).norm() == 0.0);
  }
}

TEST_CASE("truncated Hamiltonian is exactly parity pseudo-Hermitian") {
  Basis basis(8);
  ComplexMatrix par = fock::parity_op(basis);
  for (double g : {0.05, 0.1, 0.3, 1.7}) {
    lee::Params p{1.0, 1.5, 1.0, g, 8};
    ComplexMatrix h = lee::hamiltonian(p, basis);
    CHECK((par * h.adjoint() * par - h).norm() <= 1e-12);
  }
}
