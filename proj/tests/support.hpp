// SPDX-License-Identifier: Apache-2.0
//
// Random instance generators and independent reference solvers shared by the
// unit and acceptance tests. Nothing here calls the library's solvers.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cogmimo/linalg.hpp"

namespace testkit {

using cogmimo::CMatrix;
using cogmimo::Complex;
using cogmimo::CVector;
using cogmimo::RVector;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return uniform() < p; }

  CMatrix complex(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        m(i, j) = Complex(normal(), normal()) * (scale / std::sqrt(2.0));
      }
    }
    return m;
  }

  /// Hermitian PSD with eigenvalues drawn in [lo, hi].
  CMatrix psd(Eigen::Index n, double lo = 0.1, double hi = 2.0) {
    const CMatrix v = unitary(n);
    RVector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = uniform(lo, hi);
    return v * d.cast<Complex>().asDiagonal() * v.adjoint();
  }

  CMatrix unitary(Eigen::Index n) {
    Eigen::HouseholderQR<CMatrix> qr(complex(n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
  }

  /// Well-conditioned square matrix (singular values in [0.5, 2]).
  CMatrix well_conditioned(Eigen::Index n) {
    RVector s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = uniform(0.5, 2.0);
    return unitary(n) * s.cast<Complex>().asDiagonal() * unitary(n);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline double rel_frobenius(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

/// Orthogonal projector onto range(M), computed with a full SVD.
inline CMatrix range_projector(const CMatrix& m, double tol = 1e-10) {
  if (m.cols() == 0) return CMatrix::Zero(m.rows(), m.rows());
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU);
  const RVector& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol * s(0)) ++r;
  const CMatrix u = svd.matrixU().leftCols(r);
  return u * u.adjoint();
}

/// Orthonormal basis of the range of a Hermitian projector-like matrix.
inline CMatrix basis_of(const CMatrix& projector) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(projector);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
  }
  CMatrix b(projector.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    b.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(keep[i]);
  }
  return b;
}

inline double log2det_hpd(const CMatrix& m) {
  Eigen::LLT<CMatrix> llt(m);
  const auto d = llt.matrixLLT().diagonal().real();
  return 2.0 * d.array().log().sum() / std::log(2.0);
}

/// Euclidean projection of x onto {0 <= x_i <= cap, sum x <= budget}.
inline RVector project_capped_simplex(const RVector& x, double budget, double cap) {
  auto clipped = [&](double shift) {
    return (x.array() - shift).max(0.0).min(cap).matrix().eval();
  };
  RVector y = clipped(0.0);
  if (y.sum() <= budget) return y;
  double lo = 0.0, hi = x.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (clipped(mid).sum() > budget ? lo : hi) = mid;
  }
  return clipped(hi);
}

/// Projected-gradient ascent of f(Y) = log2 det(I + A Y) over Hermitian Y >= 0
/// with eigenvalues <= cap and Tr(Y) <= budget. A must be Hermitian PSD.
/// Returns the best objective reached and the maximizer.
struct PgaResult {
  double objective = 0.0;
  CMatrix argmax;
};

inline PgaResult projected_gradient_ascent(const CMatrix& a, double budget, double cap,
                                           int iterations = 6000) {
  const Eigen::Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<CMatrix> ea(a);
  const CMatrix half = ea.eigenvectors() *
                       ea.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>().asDiagonal() *
                       ea.eigenvectors().adjoint();
  // det(I + A Y) = det(I + A^{1/2} Y A^{1/2}), evaluated symmetrically.
  auto objective = [&](const CMatrix& y) { return log2det_hpd(id + half * y * half); };
  auto project = [&](const CMatrix& y) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (y + y.adjoint()));
    const RVector p = project_capped_simplex(es.eigenvalues(), budget, cap);
    return CMatrix(es.eigenvectors() * p.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
  };
  const double lipschitz = std::max(1e-12, std::pow(a.norm(), 2)) / std::log(2.0);
  const double step = 1.0 / lipschitz;
  const double start = std::isfinite(cap) ? std::min(budget / static_cast<double>(n), cap)
                                          : budget / static_cast<double>(n);
  CMatrix y = start * id;
  CMatrix z = y;
  double t = 1.0;
  PgaResult best{objective(y), y};
  for (int it = 0; it < iterations; ++it) {
    const CMatrix grad = (id + a * z).inverse() * a / std::log(2.0);
    const CMatrix next = project(z + step * 0.5 * (grad + grad.adjoint()));
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / tn) * (next - y);
    y = next;
    t = tn;
    const double val = objective(y);
    if (val > best.objective) {
      best = {val, y};
    } else if (it % 200 == 0) {
      // Restart momentum when progress stalls.
      z = y;
      t = 1.0;
    }
  }
  return best;
}

/// Scalar rate sum_k log2(1 + g_k p_k).
inline double scalar_rate(const RVector& gains, const RVector& p) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < gains.size(); ++k) s += std::log2(1.0 + gains(k) * p(k));
  return s;
}

/// Exact maximizer of sum_k log2(1 + g_k p_k) over allocations of `units`
/// quanta of size budget/units, each bin holding at most floor(mask_k/quantum)
/// quanta. Greedy marginal allocation is exact on the grid because the
/// objective is separable and concave.
inline RVector grid_search_greedy(const RVector& gains, double budget, const RVector& masks,
                                  int units = 400) {
  const double quantum = budget / units;
  const Eigen::Index n = gains.size();
  std::vector<int> count(static_cast<std::size_t>(n), 0);
  auto limit = [&](Eigen::Index k) {
    return masks.size() && std::isfinite(masks(k))
               ? static_cast<int>(std::floor(masks(k) / quantum + 1e-9))
               : units;
  };
  for (int u = 0; u < units; ++u) {
    Eigen::Index best = -1;
    double best_gain = -1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const int c = count[static_cast<std::size_t>(k)];
      if (c >= limit(k)) continue;
      const double inc = std::log2(1.0 + gains(k) * (c + 1) * quantum) -
                         std::log2(1.0 + gains(k) * c * quantum);
      if (inc > best_gain) {
        best_gain = inc;
        best = k;
      }
    }
    if (best < 0) break;
    ++count[static_cast<std::size_t>(best)];
  }
  RVector p(n);
  for (Eigen::Index k = 0; k < n; ++k) p(k) = count[static_cast<std::size_t>(k)] * quantum;
  return p;
}

/// Literal exhaustive enumeration over the same grid (small N only).
inline double grid_search_exhaustive(const RVector& gains, double budget, const RVector& masks,
                                     int units = 400) {
  const double quantum = budget / units;
  const Eigen::Index n = gains.size();
  RVector p = RVector::Zero(n);
  double best = -1.0;
  std::function<void(Eigen::Index, int)> rec = [&](Eigen::Index k, int left) {
    if (k == n - 1) {
      p(k) = left * quantum;
      if (masks.size() && p(k) > masks(k) + 1e-12) return;
      best = std::max(best, scalar_rate(gains, p));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      p(k) = c * quantum;
      if (masks.size() && p(k) > masks(k) + 1e-12) break;
      rec(k + 1, left - c);
    }
  };
  rec(0, units);
  return best;
}

/// Upper bound on the rate lost by rounding an allocation to the grid.
inline double grid_resolution(const RVector& gains, double budget, int units = 400) {
  return static_cast<double>(gains.size()) * gains.maxCoeff() * (budget / units) / std::log(2.0);
}

/// Inverse Gaussian tail by bisection on std::erfc.
inline double tail_inverse_bisect(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace testkit
