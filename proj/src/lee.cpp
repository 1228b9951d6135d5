#include "qmetric/lee.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmetric/errors.hpp"

namespace qmetric::lee {

namespace {

using fock::Basis;
using fock::Mode;
using fock::Occupation;

ComplexMatrix matrix_power(const ComplexMatrix& m, int p) {
  ComplexMatrix out = ComplexMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < p; ++i) out = out * m;
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_sector_index(const Params& p, int n, const char* what) {
  if (n < 0 || n >= p.n_max) {
    throw ValidationError(std::string(what) + ": sector index " + std::to_string(n) +
                          " outside 0.." + std::to_string(p.n_max - 1));
  }
}

double radicand_of(const Params& p, int n) {
  const double mu = p.mu();
  return mu * mu - 4.0 * p.g * p.g * (n + 1);
}

bool at_exceptional_point(const Params& p, int n) {
  const double mu = p.mu();
  const double scale = std::max(mu * mu + 4.0 * p.g * p.g * (n + 1), 1e-300);
  return std::abs(radicand_of(p, n)) <= 1e-12 * scale;
}

}  // namespace

ComplexMatrix hamiltonian(const Params& p, const Basis& basis) {
  if (basis.n_max() != p.n_max) {
    throw ValidationError("lee::hamiltonian: basis cutoff disagrees with parameters");
  }
  const ComplexMatrix n_th = fock::number_op(basis, Mode::Theta);
  const ComplexMatrix n_v = fock::number_op(basis, Mode::V);
  const ComplexMatrix n_n = fock::number_op(basis, Mode::N);
  const ComplexMatrix x = fock::ladder(basis, Mode::Theta, true) *
                          fock::ladder(basis, Mode::N, true) * fock::ladder(basis, Mode::V);
  return p.m_theta * n_th + p.m_v * n_v + p.m_n * n_n +
         kI * p.g * (x + ComplexMatrix(x.adjoint()));
}

std::pair<int, int> sector_indices(const Basis& basis, int n) {
  if (n < 0 || n >= basis.n_max()) {
    throw ValidationError("sector_indices: sector " + std::to_string(n) +
                          " incomplete under truncation");
  }
  return {basis.index_of({n, 1, 0}), basis.index_of({n + 1, 0, 1})};
}

double critical_coupling(const Params& p, int n) {
  if (n < 0) throw ValidationError("critical_coupling: negative sector index");
  const double mu = p.mu();
  if (mu == 0.0) {
    throw ValidationError("critical_coupling: mu = 0 (every coupling critical)");
  }
  return std::abs(mu) / (2.0 * std::sqrt(double(n + 1)));
}

SectorSolution solve_sector(const Params& p, int n) {
  check_sector_index(p, n, "solve_sector");
  if (at_exceptional_point(p, n)) {
    throw RegimeError("solve_sector: exceptional point in sector " + std::to_string(n) +
                      " (radicand vanishes)");
  }
  SectorSolution s;
  s.n = n;
  s.radicand = radicand_of(p, n);
  const double mu = p.mu();
  const Complex r = std::sqrt(Complex(s.radicand));
  const double trace = (2 * n + 1) * p.m_theta + p.m_n + p.m_v;
  s.e_minus = 0.5 * (trace - r);
  s.e_plus = 0.5 * (trace + r);
  if (p.g == 0.0) {
    // Decoupled limit: bare Fock eigenvectors, branch-ordered by sign(mu).
    s.alpha = mu > 0.0 ? 1.0 : 0.0;
    s.beta = mu > 0.0 ? 0.0 : 1.0;
  } else {
    s.beta = 2.0 * p.g / std::sqrt((mu + r) * (mu + r) - 4.0 * p.g * p.g * (n + 1));
    s.alpha = kI * (mu + r) / (2.0 * p.g) * s.beta;
  }
  return s;
}

std::pair<ComplexMatrix, ComplexMatrix> sector_generators(const Params& p, const Basis& basis,
                                                          int n) {
  check_sector_index(p, n, "sector_generators");
  const SectorSolution s = solve_sector(p, n);
  if (s.radicand < 0.0) {
    throw RegimeError("sector_generators: negative radicand in sector " + std::to_string(n) +
                      " (conjugate form is a real-regime identity)");
  }
  const ComplexMatrix thd = fock::ladder(basis, Mode::Theta, true);
  const ComplexMatrix vd = fock::ladder(basis, Mode::V, true);
  const ComplexMatrix nd = fock::ladder(basis, Mode::N, true);
  const ComplexMatrix thd_n = matrix_power(thd, n);
  const ComplexMatrix thd_n1 = thd_n * thd;
  ComplexMatrix sigma_minus = s.alpha * thd_n * vd + s.beta * thd_n1 * nd;
  ComplexMatrix sigma_plus =
      double(n + 1) * std::conj(s.beta) * thd_n * vd + std::conj(s.alpha) * thd_n1 * nd;
  return {std::move(sigma_minus), std::move(sigma_plus)};
}

std::pair<ComplexMatrix, ComplexMatrix> sector_generator_inverses(const Params& p,
                                                                  const Basis& basis, int n) {
  check_sector_index(p, n, "sector_generator_inverses");
  const SectorSolution s = solve_sector(p, n);
  if (s.radicand < 0.0) {
    throw RegimeError("sector_generator_inverses: negative radicand in sector " +
                      std::to_string(n));
  }
  const ComplexMatrix th = fock::ladder(basis, Mode::Theta);
  const ComplexMatrix v = fock::ladder(basis, Mode::V);
  const ComplexMatrix nl = fock::ladder(basis, Mode::N);
  const ComplexMatrix th_n = matrix_power(th, n);
  const ComplexMatrix th_n1 = th * th_n;
  const double fn = factorial(n);
  const double fn1 = factorial(n + 1);
  ComplexMatrix inv_minus =
      (std::conj(s.alpha) / fn) * th_n * v - (std::conj(s.beta) / fn) * th_n1 * nl;
  ComplexMatrix inv_plus = -(s.beta / fn) * th_n * v + (s.alpha / fn1) * th_n1 * nl;
  return {std::move(inv_minus), std::move(inv_plus)};
}

ComplexMatrix closed_form_metric(const Params& p, const Basis& basis) {
  if (basis.n_max() != p.n_max) {
    throw ValidationError("closed_form_metric: basis cutoff disagrees with parameters");
  }
  const double mu = p.mu();
  for (int k = 1; k <= p.n_max + 1; ++k) {
    const double rad = mu * mu - 4.0 * p.g * p.g * k;
    const double scale = std::max(mu * mu + 4.0 * p.g * p.g * k, 1e-300);
    if (std::abs(rad) <= 1e-12 * scale) {
      throw RegimeError("closed_form_metric: exceptional point at occupation " +
                        std::to_string(k));
    }
    if (rad < 0.0) {
      throw RegimeError("closed_form_metric: negative radicand at occupation " +
                        std::to_string(k) + " (complex-spectrum regime)");
    }
  }

  const int d = basis.dim();
  ComplexMatrix r0 = ComplexMatrix::Zero(d, d);   // 1/sqrt(mu^2 - 4g^2 N_th)
  ComplexMatrix r1 = ComplexMatrix::Zero(d, d);   // 1/sqrt(mu^2 - 4g^2 (N_th+1))
  for (int k = 0; k < d; ++k) {
    const int n = basis.state(k).n;
    r0(k, k) = 1.0 / std::sqrt(mu * mu - 4.0 * p.g * p.g * n);
    r1(k, k) = 1.0 / std::sqrt(mu * mu - 4.0 * p.g * p.g * (n + 1));
  }

  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix n_v = fock::number_op(basis, Mode::V);
  const ComplexMatrix n_n = fock::number_op(basis, Mode::N);
  const ComplexMatrix th = fock::ladder(basis, Mode::Theta);
  const ComplexMatrix nl = fock::ladder(basis, Mode::N);
  const ComplexMatrix vd = fock::ladder(basis, Mode::V, true);

  ComplexMatrix q = (id - n_n) * (id - n_v);
  q += mu * n_v * (id - n_n) * r1;
  q += mu * n_n * (id - n_v) * r0;
  const ComplexMatrix coupling = th * nl * vd * (2.0 * kI * p.g * r0);
  q += coupling + ComplexMatrix(coupling.adjoint());
  return q;
}

ComplexMatrix c_operator(const ComplexMatrix& q, const ComplexMatrix& parity) {
  if (q.rows() != parity.rows() || q.cols() != parity.cols()) {
    throw ValidationError("c_operator: dimension mismatch");
  }
  return q * parity;
}

SectorIdentities sector_identities(const Params& p, int n) {
  const SectorSolution s = solve_sector(p, n);
  if (s.radicand <= 0.0) {
    throw RegimeError("sector_identities: real-regime identities need a positive radicand");
  }
  const double r = std::sqrt(s.radicand);
  SectorIdentities out;
  out.norm_combination =
      std::abs(std::norm(s.alpha) + (n + 1) * std::norm(s.beta) - p.mu() / r);
  out.cross_term = std::abs(s.alpha * std::conj(s.beta) - kI * p.g / r);
  return out;
}

generator::Family generator_family(const Params& p, const Basis& basis, bool normalized) {
  if (basis.n_max() != p.n_max) {
    throw ValidationError("generator_family: basis cutoff disagrees with parameters");
  }
  generator::Family fam;
  fam.psi_ref = fock::basis_vector(basis, {0, 0, 0});
  fam.phi_ref = fam.psi_ref;
  fam.q0 = ComplexMatrix::Identity(basis.dim(), basis.dim());

  const ComplexMatrix thd = fock::ladder(basis, Mode::Theta, true);
  const ComplexMatrix vd = fock::ladder(basis, Mode::V, true);
  const ComplexMatrix nd = fock::ladder(basis, Mode::N, true);

  // Interacting sectors.
  for (int n = 0; n < p.n_max; ++n) {
    const SectorSolution s = solve_sector(p, n);
    if (s.radicand > 0.0) {
      auto [sig_minus, sig_plus] = sector_generators(p, basis, n);
      fam.entries.push_back({s.e_minus, std::move(sig_minus)});
      fam.entries.push_back({s.e_plus, std::move(sig_plus)});
    } else {
      // Broken regime: the conjugate form no longer solves the eigenvalue
      // equation; use the branch form for both roots of the radicand.
      const ComplexMatrix thd_n = matrix_power(thd, n);
      const ComplexMatrix thd_n1 = thd_n * thd;
      const Complex root = std::sqrt(Complex(s.radicand));
      const double trace = (2 * n + 1) * p.m_theta + p.m_n + p.m_v;
      for (const Complex r : {root, -root}) {
        const Complex b =
            2.0 * p.g / std::sqrt((p.mu() + r) * (p.mu() + r) - 4.0 * p.g * p.g * (n + 1));
        const Complex a = kI * (p.mu() + r) / (2.0 * p.g) * b;
        fam.entries.push_back({0.5 * (trace - r), a * thd_n * vd + b * thd_n1 * nd});
      }
    }
  }

  // Trivial towers, the sectorless |0,0,1>, and the truncation edge state.
  for (int n = 0; n <= p.n_max; ++n) {
    const ComplexMatrix thd_n = matrix_power(thd, n);
    fam.entries.push_back({Complex(n * p.m_theta), thd_n});
    fam.entries.push_back({Complex(n * p.m_theta + p.m_v + p.m_n), thd_n * vd * nd});
  }
  fam.entries.push_back({Complex(p.m_n), nd});
  fam.entries.push_back(
      {Complex(p.n_max * p.m_theta + p.m_v), matrix_power(thd, p.n_max) * vd});

  if (normalized) {
    for (auto& e : fam.entries) {
      const double nrm = (e.sigma * fam.psi_ref).norm();
      if (nrm > 0.0) e.sigma /= nrm;
    }
  }
  return fam;
}

std::vector<Classified> classify(const SpectralData& sd, const Basis& basis, const Params& p) {
  std::vector<Classified> out(sd.dim());
  for (int k = 0; k < sd.dim(); ++k) {
    int imax = 0;
    sd.right_vectors.col(k).cwiseAbs().maxCoeff(&imax);
    const Occupation& s = basis.state(imax);
    Classified c{};
    if (s.n_v == 0 && s.n_n == 0) {
      c = {StateClass::VacuumTower, s.n};
    } else if (s.n_v == 1 && s.n_n == 1) {
      c = {StateClass::DoublyOccupied, s.n};
    } else if (s.n_n == 1 && s.n == 0) {
      c = {StateClass::NGround, 0};
    } else if (s.n_v == 1 && s.n == basis.n_max()) {
      c = {StateClass::Edge, s.n};
    } else {
      const int n = (s.n_v == 1) ? s.n : s.n - 1;
      const auto [i_v, i_n] = sector_indices(basis, n);
      const double weight = std::norm(sd.right_vectors(i_v, k)) +
                            std::norm(sd.right_vectors(i_n, k));
      if (weight < 0.9) {
        throw ValidationError("classify: eigenvector " + std::to_string(k) +
                              " not supported on a single sector");
      }
      const SectorSolution sol = solve_sector(p, n);
      const bool minus = std::abs(sd.eigenvalues[k] - sol.e_minus) <=
                         std::abs(sd.eigenvalues[k] - sol.e_plus);
      c = {minus ? StateClass::SectorMinus : StateClass::SectorPlus, n};
    }
    out[k] = c;
  }
  return out;
}

std::vector<int> sector_eigen_indices(const std::vector<Classified>& classes, int max_n) {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(classes.size()); ++k) {
    if ((classes[k].cls == StateClass::SectorMinus || classes[k].cls == StateClass::SectorPlus) &&
        classes[k].n <= max_n) {
      out.push_back(k);
    }
  }
  return out;
}

}  // namespace qmetric::lee
