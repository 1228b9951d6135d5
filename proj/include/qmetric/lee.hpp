#pragma once

#include <utility>
#include <vector>

#include "qmetric/fock.hpp"
#include "qmetric/generator.hpp"
#include "qmetric/spectral.hpp"
#include "qmetric/types.hpp"

namespace qmetric::lee {

// One scalar theta and two fermions V, N with imaginary coupling:
// H = m_th N_th + m_V N_V + m_N N_N + i g (th^dag N^dag V + V^dag N th).
struct Params {
  double m_theta = 1.0;
  double m_v = 1.5;
  double m_n = 1.0;
  double g = 0.1;
  int n_max = 8;

  double mu() const { return m_theta + m_n - m_v; }
};

// Closed-form solution of the interacting sector spanned by |n,1,0> and
// |n+1,0,1>. alpha/beta are the raw-ket coefficients of the E_minus
// eigenvector; the E_plus eigenvector is ((n+1) conj(beta), conj(alpha))
// in the real-radicand regime.
struct SectorSolution {
  int n = 0;
  Complex e_minus;
  Complex e_plus;
  Complex alpha;
  Complex beta;
  double radicand = 0.0;  // mu^2 - 4 g^2 (n+1)
};

ComplexMatrix hamiltonian(const Params& p, const fock::Basis& basis);

// Indices of |n,1,0> and |n+1,0,1>. Throws for n outside 0..n_max-1
// (the edge sector is incomplete under truncation).
std::pair<int, int> sector_indices(const fock::Basis& basis, int n);

// Coupling at which sector n becomes exceptional: |mu| / (2 sqrt(n+1)).
// Throws ValidationError when mu = 0.
double critical_coupling(const Params& p, int n);

// Throws RegimeError at an exceptional point (radicand = 0).
SectorSolution solve_sector(const Params& p, int n);

// Generator matrices (sigma_minus, sigma_plus) for sector n:
//   sigma_minus = alpha (th^dag)^n V^dag + beta (th^dag)^{n+1} N^dag
//   sigma_plus  = (n+1) conj(beta) (th^dag)^n V^dag + conj(alpha) (th^dag)^{n+1} N^dag
// Real-radicand regime only (throws RegimeError otherwise).
std::pair<ComplexMatrix, ComplexMatrix> sector_generators(const Params& p,
                                                          const fock::Basis& basis, int n);

// Explicit partial inverses with sigma_i^-1 Psi_j = delta_ij |0>:
//   sigma_minus^-1 = (conj(alpha)/n!) th^n V - (conj(beta)/n!) th^{n+1} N
//   sigma_plus^-1  = -(beta/n!) th^n V + (alpha/(n+1)!) th^{n+1} N
std::pair<ComplexMatrix, ComplexMatrix> sector_generator_inverses(const Params& p,
                                                                  const fock::Basis& basis,
                                                                  int n);

// The closed-form metric, assembled by the substitution n -> N_theta with
// the operator ordering preserved:
//   q = (1-N_N)(1-N_V) + mu N_V (1-N_N) / sqrt(mu^2-4g^2(N_th+1))
//       + mu N_N (1-N_V) / sqrt(mu^2-4g^2 N_th) + T + T^dag,
//   T = th N V^dag (2ig / sqrt(mu^2-4g^2 N_th)).
// Requires mu^2 - 4 g^2 k > 0 for k = 1..n_max+1; throws RegimeError
// otherwise (negative radicand at a needed occupation).
ComplexMatrix closed_form_metric(const Params& p, const fock::Basis& basis);

// C = q P; an involution on the interacting-sector eigenstate span.
ComplexMatrix c_operator(const ComplexMatrix& q, const ComplexMatrix& parity);

// Deviations of the two sector identities from their closed forms:
//   |alpha|^2 + (n+1)|beta|^2 = mu / sqrt(radicand)
//   alpha conj(beta)          = i g / sqrt(radicand)
struct SectorIdentities {
  double norm_combination;
  double cross_term;
};
SectorIdentities sector_identities(const Params& p, int n);

// Generator family covering every eigenvalue of the truncated model:
// closed-form sector generators plus monomial generators for the trivial
// towers |n,0,0>, |n,1,1>, the sectorless |0,0,1> and the edge state
// |n_max,1,0>. With normalized = true each sigma is scaled to unit
// generated norm (q_generator then has a unit q-Gram); normalized = false
// keeps the raw closed-form scales.
generator::Family generator_family(const Params& p, const fock::Basis& basis,
                                   bool normalized = true);

// Classification of eigenvectors by invariant subspace. NGround is the
// sectorless single-fermion state |0,0,1>; Edge is the lone |n_max,1,0>
// whose sector partner lies beyond the cutoff.
enum class StateClass { VacuumTower, DoublyOccupied, NGround, Edge, SectorMinus, SectorPlus };

struct Classified {
  StateClass cls;
  int n;  // boson occupation (sector index for sector states)
};

std::vector<Classified> classify(const SpectralData& sd, const fock::Basis& basis,
                                 const Params& p);

// Eigenvector indices belonging to interacting sectors n <= max_n.
std::vector<int> sector_eigen_indices(const std::vector<Classified>& classes, int max_n);

}  // namespace qmetric::lee
