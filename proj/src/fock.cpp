#include "qmetric/fock.hpp"

#include <cmath>
#include <string>

#include "qmetric/errors.hpp"

namespace qmetric::fock {

Basis::Basis(int n_max) : n_max_(n_max) {
  if (n_max < 1) {
    throw ValidationError("Basis: n_max must be at least 1, got " + std::to_string(n_max));
  }
  states_.reserve(4 * (n_max + 1));
  for (int n = 0; n <= n_max; ++n) {
    for (int n_v = 0; n_v <= 1; ++n_v) {
      for (int n_n = 0; n_n <= 1; ++n_n) {
        states_.push_back({n, n_v, n_n});
      }
    }
  }
}

const Occupation& Basis::state(int index) const {
  if (index < 0 || index >= dim()) {
    throw ValidationError("Basis: state index out of range");
  }
  return states_[index];
}

bool Basis::contains(const Occupation& s) const {
  return s.n >= 0 && s.n <= n_max_ && (s.n_v == 0 || s.n_v == 1) && (s.n_n == 0 || s.n_n == 1);
}

int Basis::index_of(const Occupation& s) const {
  if (!contains(s)) {
    throw ValidationError("Basis: occupation outside the truncated basis");
  }
  return 4 * s.n + 2 * s.n_v + s.n_n;
}

ComplexMatrix ladder(const Basis& basis, Mode mode, bool dagger) {
  const int d = basis.dim();
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const Occupation& s = basis.state(k);
    switch (mode) {
      case Mode::Theta:
        if (s.n >= 1) {
          m(basis.index_of({s.n - 1, s.n_v, s.n_n}), k) = std::sqrt(double(s.n));
        }
        break;
      case Mode::V:
        if (s.n_v == 1) {
          m(basis.index_of({s.n, 0, s.n_n}), k) = 1.0;
        }
        break;
      case Mode::N:
        if (s.n_n == 1) {
          // Jordan-Wigner string over the V mode.
          m(basis.index_of({s.n, s.n_v, 0}), k) = (s.n_v == 1) ? -1.0 : 1.0;
        }
        break;
    }
  }
  return dagger ? ComplexMatrix(m.adjoint()) : m;
}

ComplexMatrix number_op(const Basis& basis, Mode mode) {
  const int d = basis.dim();
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const Occupation& s = basis.state(k);
    switch (mode) {
      case Mode::Theta: m(k, k) = double(s.n); break;
      case Mode::V:     m(k, k) = double(s.n_v); break;
      case Mode::N:     m(k, k) = double(s.n_n); break;
    }
  }
  return m;
}

ComplexMatrix parity_op(const Basis& basis) {
  const int d = basis.dim();
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const Occupation& s = basis.state(k);
    m(k, k) = ((s.n + s.n_v + s.n_n) % 2 == 0) ? 1.0 : -1.0;
  }
  return m;
}

ComplexVector basis_vector(const Basis& basis, const Occupation& s) {
  ComplexVector v = ComplexVector::Zero(basis.dim());
  v[basis.index_of(s)] = 1.0;
  return v;
}

}  // namespace qmetric::fock
