#pragma once

#include <vector>

#include "qmetric/types.hpp"

namespace qmetric::fock {

enum class Mode { Theta, V, N };

// Occupation triple |n, n_V, n_N>: one bosonic mode with a hard cutoff and
// two fermionic two-level modes.
struct Occupation {
  int n;
  int n_v;
  int n_n;

  friend bool operator==(const Occupation&, const Occupation&) = default;
};

// Truncated Fock basis, ordered lexicographically in (n, n_V, n_N).
class Basis {
 public:
  // Throws ValidationError for n_max < 1 (no interacting sector fits
  // below the cutoff).
  explicit Basis(int n_max);

  int n_max() const { return n_max_; }
  int dim() const { return static_cast<int>(states_.size()); }
  const Occupation& state(int index) const;
  const std::vector<Occupation>& states() const { return states_; }

  bool contains(const Occupation& s) const;
  int index_of(const Occupation& s) const;  // throws if not in the basis

 private:
  int n_max_;
  std::vector<Occupation> states_;
};

inline Basis build_basis(int n_max) { return Basis(n_max); }

// Annihilation matrix for the given mode (creation when dagger is set).
// Fermionic modes follow the Jordan-Wigner ordering theta (x) V (x) N:
// V carries no string, N picks up (-1)^{n_V}.
ComplexMatrix ladder(const Basis& basis, Mode mode, bool dagger = false);

// Diagonal occupation-number matrix of the given mode.
ComplexMatrix number_op(const Basis& basis, Mode mode);

// Parity: diagonal (-1)^{n + n_V + n_N}; self-adjoint, squares to one.
ComplexMatrix parity_op(const Basis& basis);

// Coordinate vector of a single occupation state.
ComplexVector basis_vector(const Basis& basis, const Occupation& s);

}  // namespace qmetric::fock
