#pragma once

#include <vector>

#include "qmetric/spectral.hpp"
#include "qmetric/types.hpp"

namespace qmetric::generator {

// One eigenvector generator: H sigma = E sigma + sigma k with k psi_ref = 0,
// so sigma psi_ref is an eigenvector at E.
struct Entry {
  Complex energy;
  ComplexMatrix sigma;
};

struct Family {
  std::vector<Entry> entries;
  ComplexVector psi_ref;
  ComplexVector phi_ref;
  ComplexMatrix q0;  // seed map with q0 psi_ref = phi_ref
  double tol = kDefaultTol;
};

// Rescales phi_ref (and q0) so that <psi_ref|phi_ref> = 1.
// Throws ValidationError when the overlap vanishes or q0 psi_ref != phi_ref.
void normalize_references(Family& family);

// ||(H - E) sigma psi|| / ||sigma psi||. Throws when sigma psi = 0
// (condition (i) violated).
double check_condition_i(const ComplexMatrix& H, const Entry& entry,
                         const ComplexVector& psi_ref);

// Minimum-norm least-squares solution of sigma^dag y = phi.
// Throws ValidationError when the relative residual exceeds tol
// (condition (iii) violated: phi outside the range of sigma^dag).
ComplexVector adjoint_inverse_apply(const ComplexMatrix& sigma, const ComplexVector& phi,
                                    double tol = kDefaultTol);

// The adjoint-inverse singled out by the generator equations: among all
// solutions of sigma^dag y = phi, the one minimizing ||(H^dag - e_bar) y||.
// Any solution has (H^dag - e_bar) y in ker(sigma^dag); this removes the
// kernel contamination the plain minimum-norm solve picks up.
ComplexVector adjoint_inverse_apply(const ComplexMatrix& sigma, const ComplexVector& phi,
                                    const ComplexMatrix& H, Complex e_bar,
                                    double tol = kDefaultTol);

// ||(H^dag - conj(E)) y|| / ||y|| with y the kernel-corrected adjoint
// inverse of the entry's own sigma applied to phi_ref.
double check_condition_ii(const ComplexMatrix& H, const Entry& entry,
                          const ComplexVector& phi_ref);

// max over entries of |<sigma_Ebar psi | sigma_Ebar^dag-1 phi> - 1|; the
// overlap equals <psi|phi> = 1 for every eigenvalue when conditions (i)-(iii)
// hold. Entries with complex energy use the family entry at the conjugate
// energy; throws when it is missing.
double cprime_consistency(const ComplexMatrix& H, const Family& family);

// Per-entry validation results, cached for assembly.
struct ValidatedEntry {
  int entry_index;
  ComplexVector generated;          // sigma_E psi_ref
  ComplexVector adjoint_inverse;    // sigma_Ebar^dag-1 phi_ref (kernel-corrected)
  double residual_i;
  double residual_ii;
  double residual_iii;
};

struct Validation {
  std::vector<ValidatedEntry> entries;
  double max_residual_i = 0.0;
  double max_residual_ii = 0.0;
  double max_residual_iii = 0.0;
  double cprime_deviation = 0.0;
};

Validation validate_family(const ComplexMatrix& H, const Family& family);

// q = sum over in-spect eigenvalues of sigma_Ebar^dag-1 q0 sigma_E^-1 P_E,
// assembled cluster-wise from the generated eigenvectors, normalized so that
// q (sigma_E psi) = sigma_Ebar^dag-1 phi exactly. Throws ValidationError when
// an in-spect eigenvalue has no generator (degenerate levels require one per
// state) or a condition check fails beyond tolerance.
ComplexMatrix build_q_generator(const ComplexMatrix& H, const Family& family,
                                const SpectralData& sd);

}  // namespace qmetric::generator
