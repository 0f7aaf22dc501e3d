// SPDX-License-Identifier: Apache-2.0
#include "cogmimo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cogmimo/error.hpp"

namespace cogmimo {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorKind::ZeroChannel: return "ZeroChannel";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SingularDirectChannel: return "SingularDirectChannel";
    case ErrorKind::InvalidChannel: return "InvalidChannel";
    case ErrorKind::InvalidConstraint: return "InvalidConstraint";
    case ErrorKind::InfeasibleInit: return "InfeasibleInit";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

double max_abs_entry(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (!m.allFinite()) return false;
  const double scale = max_abs_entry(m);
  if (scale == 0.0) return true;
  return max_abs_entry(m - m.adjoint()) <= tol * scale;
}

void require_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "matrix is " << m.rows() << "x" << m.cols() << ", expected square";
    throw Error(ErrorKind::NotHermitian, os.str());
  }
  if (!is_hermitian(m, tol)) {
    throw Error(ErrorKind::NotHermitian, "matrix differs from its conjugate transpose");
  }
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianEig hermitian_eig(const CMatrix& m) {
  require_hermitian(m);
  const Eigen::Index n = m.rows();
  HermitianEig out;
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  // Eigen sorts ascending; flip to descending.
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    auto col = out.vectors.col(j);
    const double cmax = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(col(i));
      if (a > 1e-8 * cmax) {
        col *= std::conj(col(i)) / a;
        col(i) = Complex(a, 0.0);
        break;
      }
    }
  }
  return out;
}

CMatrix pseudoinverse(const CMatrix& g, double tol_rank) {
  if (g.size() == 0) return CMatrix(g.cols(), g.rows());
  Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  CMatrix out = CMatrix::Zero(g.cols(), g.rows());
  if (smax == 0.0) return out;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > tol_rank * smax) {
      out += (svd.matrixV().col(k) / s(k)) * svd.matrixU().col(k).adjoint();
    }
  }
  return out;
}

Eigen::Index numerical_rank(const CMatrix& m, double tol_rank) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return (s.array() > tol_rank * s(0)).count();
}

bool has_full_column_rank(const CMatrix& m, double tol_rank) {
  return m.cols() <= m.rows() && numerical_rank(m, tol_rank) == m.cols();
}

bool has_full_row_rank(const CMatrix& m, double tol_rank) {
  return m.rows() <= m.cols() && numerical_rank(m, tol_rank) == m.rows();
}

namespace {

// Left singular vectors spanning R(U), after the full-column-rank check.
Eigen::JacobiSVD<CMatrix> checked_full_svd(const CMatrix& u, double tol_rank) {
  if (u.cols() == 0) return Eigen::JacobiSVD<CMatrix>();
  if (!has_full_column_rank(u, tol_rank)) {
    std::ostringstream os;
    os << u.rows() << "x" << u.cols() << " matrix is not full column rank";
    throw Error(ErrorKind::RankDeficient, os.str());
  }
  return Eigen::JacobiSVD<CMatrix>(u, Eigen::ComputeFullU);
}

}  // namespace

CMatrix orth_complement_projector(const CMatrix& u, double tol_rank) {
  const Eigen::Index n = u.rows();
  if (u.cols() == 0) return CMatrix::Identity(n, n);
  auto svd = checked_full_svd(u, tol_rank);
  const CMatrix range = svd.matrixU().leftCols(u.cols());
  CMatrix p = CMatrix::Identity(n, n) - range * range.adjoint();
  return hermitian_part(p);
}

CMatrix orth_complement_basis(const CMatrix& u, double tol_rank) {
  const Eigen::Index n = u.rows();
  if (u.cols() == 0) return CMatrix::Identity(n, n);
  auto svd = checked_full_svd(u, tol_rank);
  return svd.matrixU().rightCols(n - u.cols());
}

double spectral_radius(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "spectral_radius needs a square matrix");
  }
  if (m.size() == 0) return 0.0;
  if (is_hermitian(m)) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double log2_det_hpd(const CMatrix& m) {
  Eigen::LLT<CMatrix> llt(hermitian_part(m));
  if (llt.info() == Eigen::Success) {
    const auto diag = llt.matrixLLT().diagonal().real();
    return 2.0 * diag.array().log().sum() / std::log(2.0);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (double v : es.eigenvalues()) acc += std::log2(std::max(v, 1e-300));
  return acc;
}

}  // namespace cogmimo
