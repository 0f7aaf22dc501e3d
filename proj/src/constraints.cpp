// SPDX-License-Identifier: Apache-2.0
#include "cogmimo/constraints.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cogmimo/error.hpp"

namespace cogmimo {

namespace {

std::string user_tag(std::size_t q) { return "user " + std::to_string(q) + ": "; }

}  // namespace

void validate_constraints(const ConstraintSpec& cs, const std::vector<Eigen::Index>& tx_dims) {
  if (cs.size() != tx_dims.size()) {
    throw Error(ErrorKind::DimensionMismatch, "constraint list has " + std::to_string(cs.size()) +
                                                  " users, expected " +
                                                  std::to_string(tx_dims.size()));
  }
  for (std::size_t q = 0; q < cs.size(); ++q) {
    const UserConstraints& uc = cs[q];
    const Eigen::Index n = tx_dims[q];
    if (!uc.power_budget && !uc.soft) {
      throw Error(ErrorKind::InvalidConstraint, user_tag(q) + "needs a power budget or a soft pair");
    }
    if (uc.power_budget && !(*uc.power_budget >= 0.0 && std::isfinite(*uc.power_budget))) {
      throw Error(ErrorKind::InvalidConstraint, user_tag(q) + "power budget must be finite >= 0");
    }
    if (uc.null_matrix) {
      const CMatrix& u = *uc.null_matrix;
      if (u.rows() != n) {
        throw Error(ErrorKind::DimensionMismatch, user_tag(q) + "null matrix has wrong row count");
      }
      if (u.cols() >= u.rows()) {
        throw Error(ErrorKind::InvalidConstraint, user_tag(q) + "null matrix must be strictly tall");
      }
      if (!has_full_column_rank(u)) {
        throw Error(ErrorKind::RankDeficient, user_tag(q) + "null matrix is not full column rank");
      }
    }
    if (uc.soft) {
      const CMatrix& g = uc.soft->shaping;
      if (g.rows() != n) {
        throw Error(ErrorKind::DimensionMismatch, user_tag(q) + "shaping matrix has wrong row count");
      }
      if (!has_full_row_rank(g)) {
        throw Error(ErrorKind::RankDeficient, user_tag(q) + "shaping matrix is not full row rank");
      }
      if (!(uc.soft->average_limit >= 0.0)) {
        throw Error(ErrorKind::InvalidConstraint, user_tag(q) + "average limit must be >= 0");
      }
    }
    if (uc.peak && !(*uc.peak > 0.0)) {
      throw Error(ErrorKind::InvalidConstraint, user_tag(q) + "peak limit must be > 0");
    }
    if (uc.gap && !(*uc.gap >= 1.0 && std::isfinite(*uc.gap))) {
      throw Error(ErrorKind::InvalidConstraint, user_tag(q) + "gap must be >= 1");
    }
    if (uc.masks) {
      const RVector& m = *uc.masks;
      if (m.size() != n) {
        throw Error(ErrorKind::DimensionMismatch, user_tag(q) + "mask length != bin count");
      }
      if ((m.array() < 0.0).any() || m.hasNaN()) {
        throw Error(ErrorKind::InvalidConstraint, user_tag(q) + "masks must be >= 0");
      }
      if (uc.power_budget && m.sum() < *uc.power_budget - 1e-12) {
        throw Error(ErrorKind::InfeasibleBudget,
                    user_tag(q) + "sum of masks is below the power budget");
      }
    }
  }
}

ModifiedChannels modified_channels_g1(const ChannelSet& ch, const ConstraintSpec& cs) {
  const std::size_t users = ch.user_count();
  if (cs.size() != users) throw Error(ErrorKind::DimensionMismatch, "constraint count != users");
  ModifiedChannels out;
  out.projectors.resize(users);
  for (std::size_t r = 0; r < users; ++r) {
    const Eigen::Index n = ch.tx_dim(r);
    out.projectors[r] = cs[r].null_matrix ? orth_complement_projector(*cs[r].null_matrix)
                                          : CMatrix(CMatrix::Identity(n, n));
  }
  out.links.assign(users, std::vector<CMatrix>(users));
  for (std::size_t r = 0; r < users; ++r) {
    for (std::size_t q = 0; q < users; ++q) {
      out.links[r][q] = ch.link(r, q) * out.projectors[r];
    }
  }
  return out;
}

ModifiedChannels modified_channels_g2(const ChannelSet& ch, const ConstraintSpec& cs) {
  const std::size_t users = ch.user_count();
  if (cs.size() != users) throw Error(ErrorKind::DimensionMismatch, "constraint count != users");
  ModifiedChannels out;
  out.projectors.resize(users);
  out.shaping_pinv.resize(users);
  for (std::size_t r = 0; r < users; ++r) {
    if (!cs[r].soft) {
      throw Error(ErrorKind::InvalidConstraint, user_tag(r) + "G2 needs a soft shaping pair");
    }
    const CMatrix& g = cs[r].soft->shaping;
    if (!has_full_row_rank(g)) {
      throw Error(ErrorKind::RankDeficient, user_tag(r) + "shaping matrix is not full row rank");
    }
    out.shaping_pinv[r] = pseudoinverse(g);
    const Eigen::Index m = g.cols();
    out.projectors[r] = cs[r].null_matrix
                            ? orth_complement_projector(out.shaping_pinv[r] * *cs[r].null_matrix)
                            : CMatrix(CMatrix::Identity(m, m));
  }
  out.links.assign(users, std::vector<CMatrix>(users));
  for (std::size_t r = 0; r < users; ++r) {
    const CMatrix right = out.shaping_pinv[r].adjoint() * out.projectors[r];
    for (std::size_t q = 0; q < users; ++q) out.links[r][q] = ch.link(r, q) * right;
  }
  return out;
}

CMatrix virtual_noise_covariance(const CMatrix& u_hat, double alpha) {
  if (alpha < 0.0) throw Error(ErrorKind::DomainError, "alpha must be >= 0");
  return hermitian_part(alpha * u_hat * u_hat.adjoint());
}

ModifiedChannels hat_channels(const ChannelSet& ch, const std::vector<CMatrix>& u_hat) {
  const std::size_t users = ch.user_count();
  if (u_hat.size() != users) throw Error(ErrorKind::DimensionMismatch, "one U_hat per user");
  ModifiedChannels out;
  out.complement_basis.resize(users);
  out.reduced_noise.resize(users);
  for (std::size_t q = 0; q < users; ++q) {
    const Eigen::Index n = ch.rx_dim(q);
    if (u_hat[q].cols() == 0) {
      out.complement_basis[q] = CMatrix::Identity(n, n);
    } else {
      if (u_hat[q].rows() != n) {
        throw Error(ErrorKind::DimensionMismatch, user_tag(q) + "U_hat has wrong row count");
      }
      out.complement_basis[q] = orth_complement_basis(u_hat[q]);
    }
    const CMatrix& b = out.complement_basis[q];
    out.reduced_noise[q] = hermitian_part(b.adjoint() * ch.noise(q) * b);
  }
  out.links.assign(users, std::vector<CMatrix>(users));
  for (std::size_t r = 0; r < users; ++r) {
    for (std::size_t q = 0; q < users; ++q) {
      out.links[r][q] = out.complement_basis[q].adjoint() * ch.link(r, q);
    }
  }
  return out;
}

CMatrix virtual_noise_direction(const CMatrix& direct, const CMatrix& null_matrix) {
  if (direct.cols() != null_matrix.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "H_qq and U_q are incompatible");
  }
  CMatrix u_hat = direct * null_matrix;
  if (!has_full_column_rank(u_hat)) {
    throw Error(ErrorKind::RankDeficient, "H_qq U_q is not full column rank");
  }
  return u_hat;
}

CVector steering_vector(double angle, Eigen::Index antennas, double spacing) {
  if (antennas < 1) throw Error(ErrorKind::BadParams, "antenna count must be >= 1");
  if (!(spacing > 0.0)) throw Error(ErrorKind::BadParams, "spacing must be > 0");
  CVector v(antennas);
  const double phase = -2.0 * std::numbers::pi * spacing * std::sin(angle);
  for (Eigen::Index m = 0; m < antennas; ++m) v(m) = std::polar(1.0, phase * double(m));
  return v;
}

CMatrix steering_matrix(const std::vector<double>& angles, Eigen::Index antennas,
                        double spacing) {
  CMatrix u(antennas, static_cast<Eigen::Index>(angles.size()));
  for (std::size_t i = 0; i < angles.size(); ++i) {
    u.col(static_cast<Eigen::Index>(i)) = steering_vector(angles[i], antennas, spacing);
  }
  return u;
}

bool FeasibilityReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

const ConstraintCheck* FeasibilityReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

void add_check(FeasibilityReport& rep, std::string name, double residual, double scale) {
  scale = std::max(1.0, scale);
  rep.checks.push_back({std::move(name), residual, scale, residual <= kFeasTol * scale});
}

void add_mask_checks(FeasibilityReport& rep, const RVector& powers, const RVector& masks) {
  double worst = -std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (Eigen::Index k = 0; k < powers.size(); ++k) {
    if (!std::isfinite(masks(k))) continue;
    worst = std::max(worst, powers(k) - masks(k));
    scale = std::max(scale, masks(k));
  }
  if (std::isfinite(worst)) add_check(rep, "mask", worst, scale);
}

}  // namespace

FeasibilityReport check_feasible(const CMatrix& covariance, const UserConstraints& uc) {
  FeasibilityReport rep;
  const CMatrix q = hermitian_part(covariance);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(q, Eigen::EigenvaluesOnly);
  const double lmax = q.size() ? es.eigenvalues().maxCoeff() : 0.0;
  const double lmin = q.size() ? es.eigenvalues().minCoeff() : 0.0;
  add_check(rep, "hermitian", max_abs_entry(covariance - covariance.adjoint()),
            max_abs_entry(covariance));
  add_check(rep, "psd", -lmin, lmax);
  if (uc.power_budget) {
    add_check(rep, "power", q.trace().real() - *uc.power_budget, *uc.power_budget);
  }
  if (uc.null_matrix) {
    add_check(rep, "null", max_abs_entry(uc.null_matrix->adjoint() * q), q.norm());
  }
  if (uc.soft) {
    const CMatrix& g = uc.soft->shaping;
    const CMatrix shaped = hermitian_part(g.adjoint() * q * g);
    add_check(rep, "soft", shaped.trace().real() - uc.soft->average_limit,
              uc.soft->average_limit);
    if (uc.peak) {
      Eigen::SelfAdjointEigenSolver<CMatrix> ps(shaped, Eigen::EigenvaluesOnly);
      add_check(rep, "peak", ps.eigenvalues().maxCoeff() - *uc.peak, *uc.peak);
    }
  } else if (uc.peak) {
    add_check(rep, "peak", lmax - *uc.peak, *uc.peak);
  }
  if (uc.masks) {
    const CMatrix w = idft_matrix(static_cast<std::size_t>(q.rows()));
    const RVector diag = (w.adjoint() * q * w).diagonal().real();
    add_mask_checks(rep, diag, *uc.masks);
  }
  return rep;
}

FeasibilityReport check_feasible_powers(const RVector& powers, const UserConstraints& uc) {
  FeasibilityReport rep;
  const double pmax = powers.size() ? powers.maxCoeff() : 0.0;
  const double pmin = powers.size() ? powers.minCoeff() : 0.0;
  add_check(rep, "psd", -pmin, pmax);
  if (uc.power_budget) add_check(rep, "power", powers.sum() - *uc.power_budget, *uc.power_budget);
  if (uc.masks) add_mask_checks(rep, powers, *uc.masks);
  return rep;
}

}  // namespace cogmimo
