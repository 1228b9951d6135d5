#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmetric/spectral.hpp"
#include "qmetric/types.hpp"

namespace qmetric::verify {

enum class Positivity { Positive, Indefinite, Degenerate, NotApplicableComplexSpectrum };

std::string to_string(Positivity p);

struct MetricReport {
  double hermiticity_residual = 0.0;
  double min_q_eigenvalue_on_hprime = 0.0;
  double selfadjointness_residual = 0.0;
  double unitarity_drift = 0.0;
  Positivity positivity_status = Positivity::Positive;
  int hprime_kernel_dim = 0;
  std::vector<double> sector_scalars;  // empty when no comparison ran
};

// ||q H - H^dag q||_F / (||q||_F ||H||_F)
double selfadjointness_residual(const ComplexMatrix& q, const ComplexMatrix& H);

// Eigenvalues of the Hermitian part of q restricted to H'. Fills
// hermiticity_residual, min_q_eigenvalue_on_hprime, positivity_status and
// the kernel dimension of P_{H'}.
MetricReport positivity_report(const ComplexMatrix& q, const SpectralData& sd);

// Vectors with <v|S|v> of both signs. Throws ValidationError when S is
// semidefinite (no witness) or not self-adjoint.
std::pair<ComplexVector, ComplexVector> s_indefiniteness_witness(const ComplexMatrix& S,
                                                                 double tol = kDefaultTol);

// max_t |<psi(t)|q|psi(t)> - <psi(0)|q|psi(0)>| / |<psi(0)|q|psi(0)>| with
// psi(t) propagated through the spectral decomposition. Throws when the
// state is annihilated by P_{H'}.
double unitarity_check(const SpectralData& sd, const ComplexMatrix& q,
                       const ComplexVector& state, const std::vector<double>& t_grid);

struct Equivalence {
  bool is_equivalent = false;
  std::vector<double> scalars;   // per-eigenvector ratios (real parts)
  double max_off_pairing = 0.0;  // largest off-pairing q2-Gram magnitude
  double max_scalar_phase = 0.0; // largest relative imaginary part of a ratio
};

// Tests q2 = q1 * (positive diagonal in the eigenbasis) over the given
// eigenvector subset (all in-spect states when empty): every off-pairing
// q2-Gram entry below tol_off and every Gram-diagonal ratio real positive.
Equivalence equivalence_up_to_positive_diagonal(const ComplexMatrix& q1,
                                                const ComplexMatrix& q2,
                                                const SpectralData& sd,
                                                const std::vector<int>& subset = {},
                                                double tol_off = 1e-8);

// max over the given states v of ||(C^2 - 1) v|| / ||v||.
double involution_check(const ComplexMatrix& C, const std::vector<ComplexVector>& states);

}  // namespace qmetric::verify
