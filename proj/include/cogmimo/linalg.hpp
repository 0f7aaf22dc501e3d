// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra used throughout the library. Everything here is
// a pure function of its inputs.
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cogmimo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Relative tolerance for Hermitian symmetry, measured against max |entry|.
inline constexpr double kTolHerm = 1e-12;
/// Singular values / eigenvalues below kTolRank * max are treated as zero.
inline constexpr double kTolRank = 1e-10;

struct HermitianEig {
  RVector values;   // descending
  CMatrix vectors;  // columns match values
};

/// Throws NotHermitian when m deviates from m^H by more than kTolHerm (relative).
void require_hermitian(const CMatrix& m, double tol = kTolHerm);
bool is_hermitian(const CMatrix& m, double tol = kTolHerm);

/// (m + m^H) / 2
CMatrix hermitian_part(const CMatrix& m);

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Each eigenvector is phase-normalized so that its first entry of
/// non-negligible modulus is real and positive.
HermitianEig hermitian_eig(const CMatrix& m);

CMatrix pseudoinverse(const CMatrix& g, double tol_rank = kTolRank);

/// I - U (U^H U)^{-1} U^H. Throws RankDeficient if U lacks full column rank.
CMatrix orth_complement_projector(const CMatrix& u, double tol_rank = kTolRank);

/// Orthonormal basis of R(U)^perp (n x (n - rank U)). Throws RankDeficient if
/// U lacks full column rank.
CMatrix orth_complement_basis(const CMatrix& u, double tol_rank = kTolRank);

/// Numerical rank from singular values.
Eigen::Index numerical_rank(const CMatrix& m, double tol_rank = kTolRank);

bool has_full_column_rank(const CMatrix& m, double tol_rank = kTolRank);
bool has_full_row_rank(const CMatrix& m, double tol_rank = kTolRank);

/// max |eigenvalue| of a square matrix.
double spectral_radius(const CMatrix& m);

/// log2 det of a Hermitian positive definite matrix.
double log2_det_hpd(const CMatrix& m);

double max_abs_entry(const CMatrix& m);

}  // namespace cogmimo
