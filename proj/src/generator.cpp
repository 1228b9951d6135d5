#include "qmetric/generator.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qmetric/errors.hpp"

namespace qmetric::generator {

namespace {

// Full SVD of sigma^dag, reused for the min-norm solve and for the kernel
// basis needed by the corrected solve.
struct AdjointSolve {
  ComplexVector min_norm;
  ComplexMatrix kernel;  // orthonormal basis of ker(sigma^dag), possibly empty
  double residual;       // ||sigma^dag y - phi|| / ||phi||
};

AdjointSolve solve_adjoint(const ComplexMatrix& sigma, const ComplexVector& phi) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != phi.size()) {
    throw ValidationError("adjoint_inverse_apply: dimension mismatch");
  }
  const ComplexMatrix a = sigma.adjoint();
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(Eigen::Default);
  const int rank = static_cast<int>(svd.rank());
  AdjointSolve out;
  out.min_norm = svd.solve(phi);
  out.kernel = svd.matrixV().rightCols(a.cols() - rank);
  const double scale = phi.norm();
  out.residual = scale > 0.0 ? (a * out.min_norm - phi).norm() / scale : 0.0;
  return out;
}

}  // namespace

void normalize_references(Family& family) {
  const Complex overlap = family.psi_ref.dot(family.phi_ref);
  if (std::abs(overlap) <= family.tol * family.psi_ref.norm() * family.phi_ref.norm()) {
    throw ValidationError("generator family: <psi|phi> vanishes");
  }
  family.phi_ref /= overlap;
  if (family.q0.size() > 0) {
    family.q0 /= overlap;
    const double res = (family.q0 * family.psi_ref - family.phi_ref).norm();
    if (res > family.tol * std::max(1.0, family.phi_ref.norm())) {
      throw ValidationError("generator family: q0 psi_ref != phi_ref");
    }
  }
}

double check_condition_i(const ComplexMatrix& H, const Entry& entry,
                         const ComplexVector& psi_ref) {
  const ComplexVector generated = entry.sigma * psi_ref;
  const double nrm = generated.norm();
  if (nrm <= 1e-14 * std::max(1.0, entry.sigma.norm() * psi_ref.norm())) {
    throw ValidationError("condition (i): sigma psi vanishes");
  }
  return (H * generated - entry.energy * generated).norm() / nrm;
}

ComplexVector adjoint_inverse_apply(const ComplexMatrix& sigma, const ComplexVector& phi,
                                    double tol) {
  const AdjointSolve solve = solve_adjoint(sigma, phi);
  if (solve.residual > tol) {
    throw ValidationError("condition (iii): phi outside range of sigma^dag, residual " +
                          std::to_string(solve.residual));
  }
  return solve.min_norm;
}

ComplexVector adjoint_inverse_apply(const ComplexMatrix& sigma, const ComplexVector& phi,
                                    const ComplexMatrix& H, Complex e_bar, double tol) {
  const AdjointSolve solve = solve_adjoint(sigma, phi);
  if (solve.residual > tol) {
    throw ValidationError("condition (iii): phi outside range of sigma^dag, residual " +
                          std::to_string(solve.residual));
  }
  if (solve.kernel.cols() == 0) return solve.min_norm;
  const ComplexMatrix b =
      H.adjoint() - e_bar * ComplexMatrix::Identity(H.rows(), H.cols());
  // Shift the solution along ker(sigma^dag) to minimize the eigen-residual.
  const ComplexVector t = (b * solve.kernel)
                              .completeOrthogonalDecomposition()
                              .solve(ComplexVector(-b * solve.min_norm));
  return solve.min_norm + solve.kernel * t;
}

double check_condition_ii(const ComplexMatrix& H, const Entry& entry,
                          const ComplexVector& phi_ref) {
  const Complex e_bar = std::conj(entry.energy);
  const ComplexVector y = adjoint_inverse_apply(entry.sigma, phi_ref, H, e_bar);
  const double nrm = y.norm();
  if (nrm <= 1e-14 * std::max(1.0, phi_ref.norm())) {
    throw ValidationError("condition (ii): sigma^dag-1 phi vanishes");
  }
  return (H.adjoint() * y - e_bar * y).norm() / nrm;
}

namespace {

int conjugate_entry(const Family& family, int i, double match_tol) {
  const Complex target = std::conj(family.entries[i].energy);
  if (std::abs(family.entries[i].energy.imag()) <= match_tol) return i;
  int match = -1;
  for (int j = 0; j < static_cast<int>(family.entries.size()); ++j) {
    if (std::abs(family.entries[j].energy - target) <= match_tol) {
      if (match >= 0) {
        throw ValidationError("generator family: ambiguous conjugate entry");
      }
      match = j;
    }
  }
  if (match < 0) {
    throw ValidationError("generator family: missing entry at conjugate energy");
  }
  return match;
}

double family_match_tol(const Family& family) {
  double scale = 1.0;
  for (const auto& e : family.entries) scale = std::max(scale, std::abs(e.energy));
  return std::max(1e3 * family.tol * scale, 1e-9);
}

}  // namespace

double cprime_consistency(const ComplexMatrix& H, const Family& family) {
  const double match_tol = family_match_tol(family);
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(family.entries.size()); ++i) {
    const int j = conjugate_entry(family, i, match_tol);
    const Entry& conj_entry = family.entries[j];
    const ComplexVector generated = conj_entry.sigma * family.psi_ref;
    const ComplexVector y = adjoint_inverse_apply(conj_entry.sigma, family.phi_ref, H,
                                                  std::conj(conj_entry.energy), family.tol);
    worst = std::max(worst, std::abs(generated.dot(y) - Complex(1.0)));
  }
  return worst;
}

Validation validate_family(const ComplexMatrix& H, const Family& family) {
  if (family.entries.empty()) {
    throw ValidationError("generator family: no entries");
  }
  const double match_tol = family_match_tol(family);
  Validation v;
  v.entries.reserve(family.entries.size());
  for (int i = 0; i < static_cast<int>(family.entries.size()); ++i) {
    const Entry& entry = family.entries[i];
    ValidatedEntry ve;
    ve.entry_index = i;
    ve.generated = entry.sigma * family.psi_ref;
    ve.residual_i = check_condition_i(H, entry, family.psi_ref);

    const int j = conjugate_entry(family, i, match_tol);
    const Entry& conj_entry = family.entries[j];
    // residual_iii reports the raw solvability of sigma^dag y = phi.
    ve.residual_iii = solve_adjoint(conj_entry.sigma, family.phi_ref).residual;
    ve.adjoint_inverse = adjoint_inverse_apply(conj_entry.sigma, family.phi_ref, H,
                                               std::conj(conj_entry.energy), family.tol);
    ve.residual_ii = check_condition_ii(H, entry, family.phi_ref);

    v.max_residual_i = std::max(v.max_residual_i, ve.residual_i);
    v.max_residual_ii = std::max(v.max_residual_ii, ve.residual_ii);
    v.max_residual_iii = std::max(v.max_residual_iii, ve.residual_iii);
    v.entries.push_back(std::move(ve));
  }
  v.cprime_deviation = cprime_consistency(H, family);
  return v;
}

ComplexMatrix build_q_generator(const ComplexMatrix& H, const Family& family,
                                const SpectralData& sd) {
  const Validation v = validate_family(H, family);
  const double gate = 1e3 * family.tol;
  if (v.max_residual_i > gate || v.max_residual_ii > gate || v.max_residual_iii > gate) {
    throw ValidationError("build_q_generator: generator conditions violated beyond tolerance");
  }

  const int n = sd.dim();
  const double ptol = sd.pairing_tolerance();

  // Group in-spect eigenvalues into clusters and claim one generator per
  // member; degenerate levels must be fully supplied.
  std::vector<bool> entry_used(family.entries.size(), false);
  std::vector<bool> eigen_done(n, false);
  ComplexMatrix q = ComplexMatrix::Zero(n, n);

  for (int k0 = 0; k0 < n; ++k0) {
    if (!sd.in_spect[k0] || eigen_done[k0]) continue;
    std::vector<int> cluster;
    for (int k = 0; k < n; ++k) {
      if (sd.in_spect[k] && std::abs(sd.eigenvalues[k] - sd.eigenvalues[k0]) <= ptol) {
        cluster.push_back(k);
        eigen_done[k] = true;
      }
    }

    std::vector<int> matched;
    for (int i = 0; i < static_cast<int>(family.entries.size()); ++i) {
      if (!entry_used[i] &&
          std::abs(family.entries[i].energy - sd.eigenvalues[k0]) <= ptol) {
        matched.push_back(i);
      }
    }
    if (matched.size() != cluster.size()) {
      throw ValidationError(
          "build_q_generator: missing generator for in-spect eigenvalue near (" +
          std::to_string(sd.eigenvalues[k0].real()) + ", " +
          std::to_string(sd.eigenvalues[k0].imag()) + "): need " +
          std::to_string(cluster.size()) + ", have " + std::to_string(matched.size()));
    }
    for (int i : matched) entry_used[i] = true;

    const int m = static_cast<int>(cluster.size());
    ComplexMatrix generated(n, m);
    ComplexMatrix images(n, m);
    for (int j = 0; j < m; ++j) {
      const ValidatedEntry& ve = v.entries[matched[j]];
      generated.col(j) = ve.generated;
      images.col(j) = ve.adjoint_inverse;
    }

    // P_cluster projects onto the eigenspace; express its output in the
    // generated basis and map through the adjoint inverses.
    ComplexMatrix p_cluster = ComplexMatrix::Zero(n, n);
    for (int k : cluster) {
      p_cluster += sd.right_vectors.col(k) * sd.dual_vectors.col(k).adjoint();
    }
    const ComplexMatrix coords =
        (generated.adjoint() * generated).ldlt().solve(generated.adjoint() * p_cluster);
    q += images * coords;
  }
  return q;
}

}  // namespace qmetric::generator
