#include "qmetric/verify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <string>

#include "qmetric/errors.hpp"

namespace qmetric::verify {

std::string to_string(Positivity p) {
  switch (p) {
    case Positivity::Positive: return "positive";
    case Positivity::Indefinite: return "indefinite";
    case Positivity::Degenerate: return "degenerate";
    case Positivity::NotApplicableComplexSpectrum: return "not-applicable-complex-spectrum";
  }
  return "unknown";
}

double selfadjointness_residual(const ComplexMatrix& q, const ComplexMatrix& H) {
  const double scale = q.norm() * H.norm();
  if (scale == 0.0) return 0.0;
  return (q * H - H.adjoint() * q).norm() / scale;
}

MetricReport positivity_report(const ComplexMatrix& q, const SpectralData& sd) {
  if (q.rows() != sd.dim() || q.cols() != sd.dim()) {
    throw ValidationError("positivity_report: dimension mismatch");
  }
  MetricReport report;
  report.hermiticity_residual = hermiticity_residual(q);

  // Orthonormal basis of H' from the in-spect eigenvectors.
  int m = 0;
  for (bool b : sd.in_spect) m += b ? 1 : 0;
  report.hprime_kernel_dim = sd.dim() - m;
  if (m == 0) {
    report.positivity_status = Positivity::Degenerate;
    report.min_q_eigenvalue_on_hprime = 0.0;
    return report;
  }
  ComplexMatrix span(sd.dim(), m);
  int col = 0;
  for (int k = 0; k < sd.dim(); ++k) {
    if (sd.in_spect[k]) span.col(col++) = sd.right_vectors.col(k);
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(span);
  const ComplexMatrix basis =
      qr.householderQ() * ComplexMatrix::Identity(sd.dim(), m);

  const ComplexMatrix herm = 0.5 * (q + ComplexMatrix(q.adjoint()));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ses(basis.adjoint() * herm * basis);
  report.min_q_eigenvalue_on_hprime = ses.eigenvalues().minCoeff();

  if (!sd.spectrum_real()) {
    report.positivity_status = Positivity::NotApplicableComplexSpectrum;
    return report;
  }
  const double thr = sd.tol * std::max(1.0, q.norm());
  if (report.min_q_eigenvalue_on_hprime > thr) {
    report.positivity_status = Positivity::Positive;
  } else if (report.min_q_eigenvalue_on_hprime < -thr) {
    report.positivity_status = Positivity::Indefinite;
  } else {
    report.positivity_status = Positivity::Degenerate;
  }
  return report;
}

std::pair<ComplexVector, ComplexVector> s_indefiniteness_witness(const ComplexMatrix& S,
                                                                 double tol) {
  if (hermiticity_residual(S) > tol) {
    throw ValidationError("s_indefiniteness_witness: S not self-adjoint");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ses(0.5 * (S + ComplexMatrix(S.adjoint())));
  const double lo = ses.eigenvalues().minCoeff();
  const double hi = ses.eigenvalues().maxCoeff();
  const double thr = tol * std::max(1.0, S.norm());
  if (lo > -thr || hi < thr) {
    throw ValidationError("s_indefiniteness_witness: S is semidefinite, no witness pair");
  }
  int ilo = 0, ihi = 0;
  ses.eigenvalues().minCoeff(&ilo);
  ses.eigenvalues().maxCoeff(&ihi);
  return {ses.eigenvectors().col(ihi), ses.eigenvectors().col(ilo)};
}

double unitarity_check(const SpectralData& sd, const ComplexMatrix& q,
                       const ComplexVector& state, const std::vector<double>& t_grid) {
  if (state.size() != sd.dim()) {
    throw ValidationError("unitarity_check: state dimension mismatch");
  }
  const ComplexVector projected = sd.completeness_projector() * state;
  if (projected.norm() <= sd.tol * std::max(1.0, state.norm())) {
    throw ValidationError("unitarity_check: state annihilated by the completeness projector");
  }
  // Propagate through the spectral decomposition, in eigenbasis coordinates.
  const ComplexVector coords = sd.dual_vectors.adjoint() * state;
  auto norm_at = [&](double t) {
    ComplexVector amp = ComplexVector::Zero(sd.dim());
    for (int k = 0; k < sd.dim(); ++k) {
      if (sd.in_spect[k]) amp[k] = std::exp(-kI * sd.eigenvalues[k] * t) * coords[k];
    }
    const ComplexVector psi_t = sd.right_vectors * amp;
    return psi_t.dot(q * psi_t);
  };
  const Complex p0 = norm_at(t_grid.empty() ? 0.0 : t_grid.front());
  if (std::abs(p0) == 0.0) {
    throw ValidationError("unitarity_check: vanishing initial q-norm");
  }
  double drift = 0.0;
  for (double t : t_grid) {
    drift = std::max(drift, std::abs(norm_at(t) - p0) / std::abs(p0));
  }
  return drift;
}

Equivalence equivalence_up_to_positive_diagonal(const ComplexMatrix& q1,
                                                const ComplexMatrix& q2,
                                                const SpectralData& sd,
                                                const std::vector<int>& subset,
                                                double tol_off) {
  std::vector<int> idx = subset;
  if (idx.empty()) {
    for (int k = 0; k < sd.dim(); ++k) {
      if (sd.in_spect[k]) idx.push_back(k);
    }
  }
  const int m = static_cast<int>(idx.size());
  std::vector<int> pos(sd.dim(), -1);
  for (int j = 0; j < m; ++j) pos[idx[j]] = j;
  for (int k : idx) {
    if (pos[sd.pairing[k]] < 0) {
      throw ValidationError("equivalence: subset not closed under conjugate pairing");
    }
  }

  ComplexMatrix span(sd.dim(), m);
  for (int j = 0; j < m; ++j) span.col(j) = sd.right_vectors.col(idx[j]);
  const ComplexMatrix g1 = span.adjoint() * q1 * span;
  const ComplexMatrix g2 = span.adjoint() * q2 * span;

  Equivalence out;
  out.is_equivalent = true;
  out.scalars.reserve(m);
  for (int j = 0; j < m; ++j) {
    const int jp = pos[sd.pairing[idx[j]]];
    for (int i = 0; i < m; ++i) {
      if (i == jp) continue;
      out.max_off_pairing = std::max(out.max_off_pairing, std::abs(g2(i, j)));
    }
    const Complex d1 = g1(jp, j);
    const Complex d2 = g2(jp, j);
    if (std::abs(d1) == 0.0) {
      out.is_equivalent = false;
      out.scalars.push_back(0.0);
      continue;
    }
    const Complex ratio = d2 / d1;
    const double phase = std::abs(ratio) > 0.0 ? std::abs(ratio.imag()) / std::abs(ratio) : 1.0;
    out.max_scalar_phase = std::max(out.max_scalar_phase, phase);
    if (!(ratio.real() > 0.0) || phase > 1e-8) {
      out.is_equivalent = false;
    }
    out.scalars.push_back(ratio.real());
  }
  if (out.max_off_pairing > tol_off) out.is_equivalent = false;
  return out;
}

double involution_check(const ComplexMatrix& C, const std::vector<ComplexVector>& states) {
  const ComplexMatrix defect =
      C * C - ComplexMatrix::Identity(C.rows(), C.cols());
  double worst = 0.0;
  for (const auto& v : states) {
    const double nrm = v.norm();
    if (nrm == 0.0) continue;
    worst = std::max(worst, (defect * v).norm() / nrm);
  }
  return worst;
}

}  // namespace qmetric::verify
