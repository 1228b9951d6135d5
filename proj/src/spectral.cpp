#include "qmetric/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace qmetric {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double pairing_tol(double tol, double h_scale) {
  return std::max(1e3 * tol * std::max(h_scale, 1.0), 64.0 * kEps * std::max(h_scale, 1.0));
}

double spect_threshold(double tol, const ComplexMatrix& S) {
  return tol * std::max(1.0, S.norm());
}

// Union-find clustering of eigenvalues within the pairing tolerance.
std::vector<std::vector<int>> cluster_eigenvalues(const ComplexVector& evals, double radius) {
  const int n = static_cast<int>(evals.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(evals[i] - evals[j]) <= radius) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::vector<std::vector<int>> clusters(n);
  for (int i = 0; i < n; ++i) clusters[find(i)].push_back(i);
  std::erase_if(clusters, [](const auto& c) { return c.empty(); });
  return clusters;
}

void canonicalize_column(Eigen::Ref<ComplexVector> v) {
  int imax = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best > 0.0) {
    v *= std::conj(v[imax]) / best;
  }
  const double nrm = v.norm();
  if (nrm > 0.0) v /= nrm;
}

}  // namespace

double hermiticity_residual(const ComplexMatrix& S) {
  const double s = S.norm();
  if (s == 0.0) return 0.0;
  return (S - ComplexMatrix(S.adjoint())).norm() / s;
}

double pseudo_hermiticity_residual(const ComplexMatrix& H, const ComplexMatrix& S) {
  const double scale = S.norm() * H.norm();
  if (scale == 0.0) return 0.0;
  return (S * H - H.adjoint() * S).norm() / scale;
}

void validate(const PseudoHermitianSystem& sys) {
  if (sys.H.rows() != sys.H.cols() || sys.S.rows() != sys.S.cols()) {
    throw ValidationError("system: H and S must be square");
  }
  if (sys.H.rows() != sys.S.rows()) {
    throw ValidationError("system: H and S dimensions disagree");
  }
  if (!(sys.tol > 0.0)) {
    throw ValidationError("system: tolerance must be positive");
  }
  if (!sys.H.allFinite() || !sys.S.allFinite()) {
    throw ValidationError("system: non-finite matrix entries");
  }
  const double rs = hermiticity_residual(sys.S);
  if (rs > sys.tol) {
    throw ValidationError("system: S not self-adjoint, residual " + std::to_string(rs));
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(sys.S);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > sys.tol * smax)) {
    throw ValidationError("system: S numerically singular");
  }
  const double rp = pseudo_hermiticity_residual(sys.H, sys.S);
  if (rp > sys.tol) {
    throw ValidationError("system: pseudo-Hermiticity residual " + std::to_string(rp) +
                          " exceeds tolerance");
  }
}

double sharp_adjoint_residual(const PseudoHermitianSystem& sys) {
  Eigen::JacobiSVD<ComplexMatrix> svd(sys.S);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > sys.tol * smax)) {
    throw ValidationError("sharp_adjoint_residual: S numerically singular");
  }
  const ComplexMatrix sharp =
      sys.S.partialPivLu().solve(ComplexMatrix(sys.H.adjoint() * sys.S));
  const double h = sys.H.norm();
  if (h == 0.0) return (sharp).norm();
  return (sharp - sys.H).norm() / h;
}

Complex s_form(const ComplexMatrix& S, const ComplexVector& phi, const ComplexVector& psi) {
  if (phi.size() != S.rows() || psi.size() != S.cols()) {
    throw ValidationError("s_form: dimension mismatch");
  }
  return phi.dot(S * psi);  // Eigen's dot conjugates the left argument
}

double SpectralData::pairing_tolerance() const {
  const double scale = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return pairing_tol(tol, std::max(scale, 1.0));
}

bool SpectralData::spectrum_real() const {
  const double pt = pairing_tolerance();
  for (int k = 0; k < dim(); ++k) {
    if (in_spect[k] && std::abs(eigenvalues[k].imag()) > pt) return false;
  }
  return true;
}

ComplexMatrix SpectralData::completeness_projector() const {
  ComplexVector w = ComplexVector::Zero(dim());
  for (int k = 0; k < dim(); ++k) w[k] = in_spect[k] ? 1.0 : 0.0;
  return right_vectors * w.asDiagonal() * dual_vectors.adjoint();
}

SpectralData decompose(const PseudoHermitianSystem& sys) {
  validate(sys);
  const int n = static_cast<int>(sys.H.rows());
  const double h_scale = sys.H.norm();
  const double ptol = pairing_tol(sys.tol, h_scale);

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(sys.H);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("decompose: eigendecomposition failed");
  }

  // Deterministic ordering by (Re, Im).
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const ComplexVector raw_evals = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (raw_evals[a].real() != raw_evals[b].real())
      return raw_evals[a].real() < raw_evals[b].real();
    return raw_evals[a].imag() < raw_evals[b].imag();
  });

  SpectralData sd;
  sd.tol = sys.tol;
  sd.eigenvalues.resize(n);
  sd.right_vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    sd.eigenvalues[k] = raw_evals[order[k]];
    sd.right_vectors.col(k) = solver.eigenvectors().col(order[k]);
  }

  // Degenerate clusters: rotate self-paired (real) clusters so the S-Gram
  // block is diagonal; one coefficient per rotated vector.
  const auto clusters = cluster_eigenvalues(sd.eigenvalues, ptol);
  for (const auto& cluster : clusters) {
    if (cluster.size() < 2) continue;
    const bool self_paired = std::all_of(cluster.begin(), cluster.end(), [&](int k) {
      return std::abs(sd.eigenvalues[k].imag()) <= ptol;
    });
    if (!self_paired) {
      throw ValidationError("decompose: degenerate complex eigenvalue cluster not supported");
    }
    const int m = static_cast<int>(cluster.size());
    ComplexMatrix block(n, m);
    for (int j = 0; j < m; ++j) block.col(j) = sd.right_vectors.col(cluster[j]);
    ComplexMatrix gram = block.adjoint() * sys.S * block;
    gram = 0.5 * (gram + ComplexMatrix(gram.adjoint()));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ses(gram);
    const ComplexMatrix rotated = block * ses.eigenvectors();
    for (int j = 0; j < m; ++j) sd.right_vectors.col(cluster[j]) = rotated.col(j);
  }

  for (int k = 0; k < n; ++k) canonicalize_column(sd.right_vectors.col(k));

  // Eigen-residual gate; cluster rotation may mix members separated by up
  // to the cluster radius.
  const double eig_gate = std::max(10.0 * ptol, 1e3 * kEps * std::max(h_scale, 1.0));
  for (int k = 0; k < n; ++k) {
    const double res =
        (sys.H * sd.right_vectors.col(k) - sd.eigenvalues[k] * sd.right_vectors.col(k)).norm();
    if (res > eig_gate) {
      throw ValidationError("decompose: eigenpair residual " + std::to_string(res) +
                            " beyond tolerance at index " + std::to_string(k));
    }
  }

  // Dual-basis conditioning gate: near an exceptional point eigenvectors
  // coalesce and the eigenbasis becomes numerically singular.
  {
    Eigen::JacobiSVD<ComplexMatrix> vsvd(sd.right_vectors);
    const double smax = vsvd.singularValues()(0);
    const double smin = vsvd.singularValues()(n - 1);
    if (!(smin > 1e3 * sys.tol * smax)) {
      throw ValidationError(
          "decompose: H defective within tolerance (eigenbasis condition " +
          std::to_string(smax / std::max(smin, 1e-300)) + "), likely an exceptional point");
    }
  }

  // Biorthogonal duals from the inverse of the eigenvector matrix.
  Eigen::PartialPivLU<ComplexMatrix> lu(sd.right_vectors);
  const ComplexMatrix inv = lu.inverse();
  if (!inv.allFinite()) {
    throw ValidationError("decompose: H defective within tolerance (singular eigenbasis)");
  }
  const double bi_res = (inv * sd.right_vectors - ComplexMatrix::Identity(n, n))
                            .cwiseAbs()
                            .maxCoeff();
  if (bi_res > 1e3 * sys.tol) {
    throw ValidationError(
        "decompose: dual basis ill-conditioned (defective H or exceptional point), "
        "biorthogonality defect " +
        std::to_string(bi_res));
  }
  sd.dual_vectors = inv.adjoint();

  // Conjugation pairing: real eigenvalues are self-paired, complex ones are
  // greedily matched to their conjugates; ambiguity is an error.
  sd.pairing.assign(n, -1);
  for (int k = 0; k < n; ++k) {
    if (std::abs(sd.eigenvalues[k].imag()) <= ptol) {
      sd.pairing[k] = k;
      continue;
    }
    const Complex target = std::conj(sd.eigenvalues[k]);
    int match = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(sd.eigenvalues[j] - target) <= ptol) {
        if (match >= 0) {
          throw ValidationError("decompose: ambiguous conjugate pairing");
        }
        match = j;
      }
    }
    if (match < 0) {
      throw ValidationError("decompose: complex eigenvalue without conjugate partner");
    }
    sd.pairing[k] = match;
  }
  for (int k = 0; k < n; ++k) {
    if (sd.pairing[sd.pairing[k]] != k) {
      throw ValidationError("decompose: conjugate pairing is not an involution");
    }
  }

  // spect membership through the S-form against the conjugate partner.
  const double st = spect_threshold(sys.tol, sys.S);
  sd.in_spect.assign(n, false);
  sd.c = ComplexVector::Zero(n);
  for (int k = 0; k < n; ++k) {
    const Complex g = s_form(sys.S, sd.right_vectors.col(sd.pairing[k]), sd.right_vectors.col(k));
    sd.in_spect[k] = std::abs(g) > st;
  }
  return sd;
}

ComplexMatrix s_gram(const SpectralData& sd, const ComplexMatrix& S) {
  return sd.right_vectors.adjoint() * S * sd.right_vectors;
}

void phase_coefficients(SpectralData& sd, const ComplexMatrix& S) {
  const double st = spect_threshold(sd.tol, S);
  for (int k = 0; k < sd.dim(); ++k) {
    if (!sd.in_spect[k]) {
      sd.c[k] = 0.0;
      continue;
    }
    const Complex g = s_form(S, sd.right_vectors.col(sd.pairing[k]), sd.right_vectors.col(k));
    if (std::abs(g) <= st) {
      sd.in_spect[k] = false;
      sd.c[k] = 0.0;
    } else {
      sd.c[k] = 1.0 / g;
    }
  }
}

ComplexMatrix build_A(const SpectralData& sd) {
  return sd.right_vectors * sd.c.asDiagonal() * sd.dual_vectors.adjoint();
}

ComplexMatrix build_q_spectral(const PseudoHermitianSystem& sys, const SpectralData& sd) {
  return sys.S * build_A(sd);
}

ComplexMatrix propagator(const SpectralData& sd, double t) {
  return function_of_H(sd, [t](Complex e) { return std::exp(-kI * e * t); });
}

}  // namespace qmetric
