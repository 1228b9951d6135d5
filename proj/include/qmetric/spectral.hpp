#pragma once

#include <cmath>
#include <vector>

#include "qmetric/errors.hpp"
#include "qmetric/types.hpp"

namespace qmetric {

// A Hamiltonian H together with an invertible self-adjoint S satisfying
// S H = H^dag S within tolerance.
struct PseudoHermitianSystem {
  ComplexMatrix H;
  ComplexMatrix S;
  double tol = kDefaultTol;
};

// ||S - S^dag||_F / ||S||_F
double hermiticity_residual(const ComplexMatrix& S);

// ||S H - H^dag S||_F / (||S||_F ||H||_F)
double pseudo_hermiticity_residual(const ComplexMatrix& H, const ComplexMatrix& S);

// Checks all PseudoHermitianSystem invariants; throws ValidationError.
void validate(const PseudoHermitianSystem& sys);

// ||S^-1 H^dag S - H||_F / ||H||_F. Throws ValidationError when S is
// numerically singular.
double sharp_adjoint_residual(const PseudoHermitianSystem& sys);

// <phi|S|psi>: conjugate-linear in phi, linear in psi.
Complex s_form(const ComplexMatrix& S, const ComplexVector& phi, const ComplexVector& psi);

// Biorthogonal eigendecomposition of a pseudo-Hermitian system.
//
// right_vectors columns are Dirac-normalized right eigenvectors with a
// canonical phase (largest-magnitude component real positive); dual_vectors
// columns chi_k satisfy <chi_j|psi_k> = delta_jk. pairing is the involution
// k -> kbar with E_kbar = conj(E_k); real eigenvalues are self-paired.
// in_spect marks eigenvectors with a nonvanishing S-form against their
// conjugate partner; c holds the reciprocal phase coefficients once
// phase_coefficients has run (zero for out-of-spect states).
struct SpectralData {
  ComplexVector eigenvalues;
  ComplexMatrix right_vectors;
  ComplexMatrix dual_vectors;
  std::vector<int> pairing;
  std::vector<bool> in_spect;
  ComplexVector c;
  double tol = kDefaultTol;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  ComplexVector right(int k) const { return right_vectors.col(k); }
  ComplexVector dual(int k) const { return dual_vectors.col(k); }

  // Absolute tolerance used for conjugate pairing and eigenvalue clustering.
  double pairing_tolerance() const;
  bool spectrum_real() const;

  // P_{H'} = sum over in-spect k of |psi_k><chi_k|.
  ComplexMatrix completeness_projector() const;
};

// Eigendecomposition with cluster handling for degenerate eigenvalues:
// within each self-paired (real) cluster the eigenvectors are rotated so the
// S-Gram block is diagonal. Throws ValidationError for defective H (dual
// basis ill-conditioned), ambiguous conjugate pairing, or degenerate complex
// clusters.
SpectralData decompose(const PseudoHermitianSystem& sys);

// G_jk = <psi_j|S|psi_k>; vanishes off the pairing permutation.
ComplexMatrix s_gram(const SpectralData& sd, const ComplexMatrix& S);

// c_k = 1 / <psi_pair(k)|S|psi_k> for in-spect states; flags the state out
// of spect instead when the form underflows the spect threshold.
void phase_coefficients(SpectralData& sd, const ComplexMatrix& S);

// A = sum_k c_k |psi_k><chi_k|; commutes with H on H'.
ComplexMatrix build_A(const SpectralData& sd);

// q = S A. With Dirac-normalized eigenvectors the q-Gram of the
// eigenvector set is the identity under the pairing permutation.
ComplexMatrix build_q_spectral(const PseudoHermitianSystem& sys, const SpectralData& sd);

// sum over in-spect k of f(E_k) |psi_k><chi_k|.
template <typename F>
ComplexMatrix function_of_H(const SpectralData& sd, F&& f) {
  const int n = sd.dim();
  ComplexVector w = ComplexVector::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (!sd.in_spect[k]) continue;
    const Complex fk = f(sd.eigenvalues[k]);
    if (!std::isfinite(fk.real()) || !std::isfinite(fk.imag())) {
      throw ValidationError("function_of_H: non-finite value at an eigenvalue");
    }
    w[k] = fk;
  }
  return sd.right_vectors * w.asDiagonal() * sd.dual_vectors.adjoint();
}

// exp(-i t H) restricted to H'.
ComplexMatrix propagator(const SpectralData& sd, double t);

}  // namespace qmetric
