#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "qmetric/errors.hpp"
#include "qmetric/fock.hpp"
#include "qmetric/generator.hpp"
#include "qmetric/lee.hpp"
#include "qmetric/rng.hpp"
#include "qmetric/spectral.hpp"
#include "qmetric/verify.hpp"

using namespace qmetric;

namespace {

struct LeeSetup {
  lee::Params p;
  fock::Basis basis;
  PseudoHermitianSystem sys;
  SpectralData sd;

  explicit LeeSetup(double g, int n_max = 8)
      : p{1.0, 1.5, 1.0, g, n_max},
        basis(n_max),
        sys{lee::hamiltonian(p, basis), fock::parity_op(basis), 1e-10},
        sd(decompose(sys)) {
    phase_coefficients(sd, sys.S);
  }
};

// Hermitian test system with rank-one generators sigma_E = |v_E><psi|.
struct HermitianSetup {
  ComplexMatrix h;
  PseudoHermitianSystem sys;
  SpectralData sd;
  generator::Family family;

  HermitianSetup() {
    SplitMix64 rng(42);
    ComplexMatrix m(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) m(i, j) = rng.gaussian();
    }
    h = 0.5 * (m + ComplexMatrix(m.adjoint()));
    sys = {h, ComplexMatrix::Identity(4, 4), 1e-10};
    sd = decompose(sys);
    phase_coefficients(sd, sys.S);

    ComplexVector psi = ComplexVector::Zero(4);
    for (int k = 0; k < 4; ++k) psi += sd.right_vectors.col(k);
    psi /= psi.norm();
    family.psi_ref = psi;
    family.phi_ref = psi;
    family.q0 = ComplexMatrix::Identity(4, 4);
    for (int k = 0; k < 4; ++k) {
      family.entries.push_back(
          {sd.eigenvalues[k], sd.right_vectors.col(k) * psi.adjoint()});
    }
    generator::normalize_references(family);
  }
};

}  // namespace

TEST_CASE("condition (i): projector-style generator of a known eigenvector") {
  HermitianSetup s;
  for (const auto& e : s.family.entries) {
    CHECK(generator::check_condition_i(s.h, e, s.family.psi_ref) <= 1e-12);
  }
}

TEST_CASE("condition (i): Lee sector generators produce eigenvectors") {
  LeeSetup s(0.05);
  ComplexVector vac = fock::basis_vector(s.basis, {0, 0, 0});
  for (int n = 0; n < s.p.n_max; ++n) {
    auto sol = lee::solve_sector(s.p, n);
    auto [sm, sp] = lee::sector_generators(s.p, s.basis, n);
    CHECK(generator::check_condition_i(s.sys.H, {sol.e_minus, sm}, vac) <= 1e-10);
    CHECK(generator::check_condition_i(s.sys.H, {sol.e_plus, sp}, vac) <= 1e-10);
  }
}

TEST_CASE("condition (i): identity sigma on a non-scalar H is a negative control") {
  LeeSetup s(0.1, 4);
  ComplexVector psi = ComplexVector::Ones(s.sd.dim()).cast<Complex>();
  psi /= psi.norm();
  generator::Entry e{Complex(1.0), ComplexMatrix::Identity(s.sd.dim(), s.sd.dim())};
  CHECK(generator::check_condition_i(s.sys.H, e, psi) > 0.1);
}

TEST_CASE("condition (i): vanishing sigma psi is an error") {
  fock::Basis basis(2);
  ComplexVector vac = fock::basis_vector(basis, {0, 0, 0});
  generator::Entry e{Complex(1.0), fock::ladder(basis, fock::Mode::V)};  // annihilates vacuum
  ComplexMatrix h = ComplexMatrix::Identity(basis.dim(), basis.dim());
  CHECK_THROWS_AS(generator::check_condition_i(h, e, vac), ValidationError);
}

TEST_CASE("adjoint_inverse_apply: unitary sigma") {
  SplitMix64 rng(5);
  ComplexMatrix m(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = rng.gaussian();
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(m);
  ComplexMatrix u = qr.householderQ();
  ComplexVector phi(3);
  phi << Complex(1, 0.5), Complex(0, -1), Complex(0.2, 0);
  // (sigma^dag)^-1 = sigma for unitary sigma.
  CHECK((generator::adjoint_inverse_apply(u, phi) - u * phi).norm() <= 1e-12);
}

TEST_CASE("adjoint_inverse_apply: minimum norm on a singular diagonal") {
  ComplexMatrix sigma = ComplexMatrix::Zero(2, 2);
  sigma(0, 0) = 2.0;
  ComplexVector phi(2);
  phi << 1.0, 0.0;
  ComplexVector y = generator::adjoint_inverse_apply(sigma, phi);
  CHECK(std::abs(y[0] - Complex(0.5)) <= 1e-14);
  CHECK(std::abs(y[1]) <= 1e-14);

  // phi outside the range of sigma^dag.
  ComplexVector bad(2);
  bad << 0.0, 1.0;
  CHECK_THROWS_AS(generator::adjoint_inverse_apply(sigma, bad), ValidationError);
}

TEST_CASE("kernel-corrected adjoint inverse recovers the dual eigenvector") {
  LeeSetup s(0.1);
  ComplexVector vac = fock::basis_vector(s.basis, {0, 0, 0});
  auto sol = lee::solve_sector(s.p, 0);
  auto [sm, sp] = lee::sector_generators(s.p, s.basis, 0);

  // Plain minimum norm: solves the system but is not an eigenvector of H^dag.
  ComplexVector y_min = generator::adjoint_inverse_apply(sm, vac);
  CHECK((sm.adjoint() * y_min - vac).norm() <= 1e-12);
  const Complex e_bar = std::conj(sol.e_minus);
  CHECK((s.sys.H.adjoint() * y_min - e_bar * y_min).norm() / y_min.norm() > 1e-3);

  // Kernel-corrected: still solves the system and is the H^dag eigenvector,
  // i.e. proportional to the biorthogonal dual at that eigenvalue.
  ComplexVector y = generator::adjoint_inverse_apply(sm, vac, s.sys.H, e_bar);
  CHECK((sm.adjoint() * y - vac).norm() <= 1e-12);
  CHECK((s.sys.H.adjoint() * y - e_bar * y).norm() / y.norm() <= 1e-12);
  for (int k = 0; k < s.sd.dim(); ++k) {
    if (std::abs(s.sd.eigenvalues[k] - sol.e_minus) <= 1e-9) {
      const ComplexVector chi = s.sd.dual(k).normalized();
      CHECK(std::abs(std::abs(chi.dot(y.normalized())) - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("condition (ii) residuals") {
  SUBCASE("Hermitian system") {
    HermitianSetup s;
    for (const auto& e : s.family.entries) {
      CHECK(generator::check_condition_ii(s.h, e, s.family.phi_ref) <= 1e-12);
    }
  }

  SUBCASE("Lee sector generators, all interior sectors") {
    LeeSetup s(0.05);
    ComplexVector vac = fock::basis_vector(s.basis, {0, 0, 0});
    for (int n = 0; n < s.p.n_max; ++n) {
      auto sol = lee::solve_sector(s.p, n);
      auto [sm, sp] = lee::sector_generators(s.p, s.basis, n);
      CHECK(generator::check_condition_ii(s.sys.H, {sol.e_minus, sm}, vac) <= 1e-10);
      CHECK(generator::check_condition_ii(s.sys.H, {sol.e_plus, sp}, vac) <= 1e-10);
    }
  }

  SUBCASE("negative control: wrong energy gives an order-one residual") {
    LeeSetup s(0.1, 4);
    ComplexVector vac = fock::basis_vector(s.basis, {0, 0, 0});
    auto [sm, sp] = lee::sector_generators(s.p, s.basis, 0);
    auto sol = lee::solve_sector(s.p, 0);
    generator::Entry wrong{sol.e_minus + 1.0, sm};
    CHECK(generator::check_condition_ii(s.sys.H, wrong, vac) > 0.1);
  }
}

TEST_CASE("cprime consistency") {
  SUBCASE("Lee family, all entries") {
    LeeSetup s(0.05);
    generator::Family fam = lee::generator_family(s.p, s.basis);
    CHECK(generator::cprime_consistency(s.sys.H, fam) <= 1e-8);
  }

  SUBCASE("single-entry family") {
    HermitianSetup s;
    generator::Family single = s.family;
    single.entries.resize(1);
    CHECK(generator::cprime_consistency(s.h, single) <= 1e-12);
  }

  SUBCASE("broken reference normalization is detected") {
    LeeSetup s(0.05);
    generator::Family fam = lee::generator_family(s.p, s.basis);
    fam.phi_ref *= 2.0;  // now <psi|phi> = 2, so t_E = 2
    CHECK(generator::cprime_consistency(s.sys.H, fam) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("build_q_generator on a Hermitian system gives the identity") {
  HermitianSetup s;
  ComplexMatrix q = generator::build_q_generator(s.h, s.family, s.sd);
  CHECK((q - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("build_q_generator on the Lee model") {
  LeeSetup s(0.05);
  generator::Family fam = lee::generator_family(s.p, s.basis);
  fam.tol = 1e-10;
  ComplexMatrix q_gen = generator::build_q_generator(s.sys.H, fam, s.sd);
  ComplexMatrix q_spec = build_q_spectral(s.sys, s.sd);

  SUBCASE("positive on the physical subspace") {
    auto report = verify::positivity_report(q_gen, s.sd);
    CHECK(report.positivity_status == verify::Positivity::Positive);
  }

  SUBCASE("generated eigenvectors map to their adjoint inverses") {
    ComplexVector vac = fock::basis_vector(s.basis, {0, 0, 0});
    auto [sm, sp] = lee::sector_generators(s.p, s.basis, 2);
    auto sol = lee::solve_sector(s.p, 2);
    ComplexVector psi = sm * vac;
    ComplexVector y =
        generator::adjoint_inverse_apply(sm, vac, s.sys.H, std::conj(sol.e_minus));
    // Raw family: q psi_E = sigma^dag-1 phi exactly as assembled.
    generator::Family raw = lee::generator_family(s.p, s.basis, /*normalized=*/false);
    ComplexMatrix q_raw = generator::build_q_generator(s.sys.H, raw, s.sd);
    CHECK((q_raw * psi - y).norm() <= 1e-9 * y.norm());
    // Main-result normalization in the raw convention.
    CHECK(std::abs(psi.dot(q_raw * psi) - Complex(1.0)) <= 1e-9);
  }

  SUBCASE("equivalent to the spectral metric up to a positive diagonal") {
    auto eq = verify::equivalence_up_to_positive_diagonal(q_spec, q_gen, s.sd, {}, 1e-8);
    CHECK(eq.is_equivalent);
    for (double d : eq.scalars) CHECK(d > 0.0);
  }

  SUBCASE("self-adjointness against H") {
    CHECK((q_gen * s.sys.H - s.sys.H.adjoint() * q_gen).norm() <=
          1e-9 * s.sys.H.norm() * q_gen.norm());
  }
}

TEST_CASE("scale covariance of the generator assembly") {
  LeeSetup s(0.05, 4);
  generator::Family fam = lee::generator_family(s.p, s.basis);
  ComplexMatrix q1 = generator::build_q_generator(s.sys.H, fam, s.sd);
  // Rescale one real-energy sector generator.
  fam.entries[0].sigma *= 2.0;
  ComplexMatrix q2 = generator::build_q_generator(s.sys.H, fam, s.sd);
  auto eq = verify::equivalence_up_to_positive_diagonal(q1, q2, s.sd, {}, 1e-8);
  CHECK(eq.is_equivalent);
  bool scaled = false;
  for (double d : eq.scalars) {
    CHECK(d > 0.0);
    if (std::abs(d - 0.25) < 1e-6) scaled = true;  // 1/|lambda|^2 on that level
  }
  CHECK(scaled);
}

TEST_CASE("missing generator for an in-spect eigenvalue is an error") {
  LeeSetup s(0.05, 4);
  generator::Family fam = lee::generator_family(s.p, s.basis);
  fam.entries.pop_back();  // drop the edge-state generator
  CHECK_THROWS_AS(generator::build_q_generator(s.sys.H, fam, s.sd), ValidationError);
}

TEST_CASE("reference normalization") {
  HermitianSetup s;
  generator::Family fam = s.family;
  fam.phi_ref *= Complex(0.0, 3.0);
  fam.q0 *= Complex(0.0, 3.0);
  generator::normalize_references(fam);
  CHECK(std::abs(fam.psi_ref.dot(fam.phi_ref) - Complex(1.0)) <= 1e-12);

  generator::Family bad = s.family;
  bad.phi_ref = ComplexVector::Zero(4);
  CHECK_THROWS_AS(generator::normalize_references(bad), ValidationError);
}

TEST_CASE("broken-regime family still satisfies the generator conditions") {
  LeeSetup s(0.2);
  generator::Family fam = lee::generator_family(s.p, s.basis);
  auto v = generator::validate_family(s.sys.H, fam);
  CHECK(v.max_residual_i <= 1e-10);
  CHECK(v.max_residual_ii <= 1e-10);
  CHECK(v.max_residual_iii <= 1e-10);
  CHECK(v.cprime_deviation <= 1e-8);
  ComplexMatrix q = generator::build_q_generator(s.sys.H, fam, s.sd);
  // Pairing Gram structure in the generated convention.
  ComplexVector vac = fock::basis_vector(s.basis, {0, 0, 0});
  for (const auto& e : fam.entries) {
    if (std::abs(e.energy.imag()) > 1e-6) {
      ComplexVector psi = e.sigma * vac;
      CHECK(std::abs(psi.dot(q * psi)) <= 1e-8);
    }
  }
}
