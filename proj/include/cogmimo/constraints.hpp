// SPDX-License-Identifier: Apache-2.0
//
// Per-user constraint families and the modified channels each game variant
// waterfills over:
//   power     Tr(Q) <= P
//   null      U^H Q = 0                (U strictly tall, full column rank)
//   soft      Tr(G^H Q G) <= P_ave     (G full row rank)
//   peak      lambda_max(G^H Q G) <= P_peak
//   masks     [W^H Q W]_kk <= p_max(k) (SISO)
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cogmimo/channel.hpp"

namespace cogmimo {

struct SoftShaping {
  CMatrix shaping;  // G, tx_dim x m with m >= tx_dim
  double average_limit = 0.0;
  friend bool operator==(const SoftShaping&, const SoftShaping&) = default;
};

struct UserConstraints {
  std::optional<double> power_budget;
  std::optional<CMatrix> null_matrix;
  std::optional<SoftShaping> soft;
  std::optional<double> peak;
  std::optional<RVector> masks;  // +inf entries mean unconstrained bins
  std::optional<double> gap;     // >= 1

  friend bool operator==(const UserConstraints&, const UserConstraints&) = default;
};

using ConstraintSpec = std::vector<UserConstraints>;

/// Checks the structural invariants of every user's bundle against the given
/// transmit dimensions (or bin count for masks). Throws InvalidConstraint,
/// RankDeficient or InfeasibleBudget.
void validate_constraints(const ConstraintSpec& cs, const std::vector<Eigen::Index>& tx_dims);

struct ModifiedChannels {
  std::vector<std::vector<CMatrix>> links;  // links[r][q]
  std::vector<CMatrix> projectors;          // per transmitter r
  std::vector<CMatrix> shaping_pinv;        // G_r^# (G2 only)
  std::vector<CMatrix> complement_basis;    // U_hat_q^perp (G_inf only)
  std::vector<CMatrix> reduced_noise;       // U_hat^perpH R_nq U_hat^perp (G_inf only)

  const CMatrix& link(std::size_t r, std::size_t q) const { return links.at(r).at(q); }
};

/// H~_rq = H_rq P_{R(U_r)^perp}; identity projector where U_r is absent.
ModifiedChannels modified_channels_g1(const ChannelSet& ch, const ConstraintSpec& cs);

/// H-_rq = H_rq G_r^{#H} P_{R(U-_r)^perp} with U-_r = G_r^# U_r.
ModifiedChannels modified_channels_g2(const ChannelSet& ch, const ConstraintSpec& cs);

/// alpha * U_hat U_hat^H
CMatrix virtual_noise_covariance(const CMatrix& u_hat, double alpha);

/// H^_rq = U_hat_q^perpH H_rq and the reduced noise U_hat_q^perpH R_nq U_hat_q^perp.
/// An empty (zero-column) U_hat leaves that receiver unchanged.
ModifiedChannels hat_channels(const ChannelSet& ch, const std::vector<CMatrix>& u_hat);

/// U_hat = H_qq U, the receive-side direction that nulls U at the transmitter.
CMatrix virtual_noise_direction(const CMatrix& direct, const CMatrix& null_matrix);

/// Uniform linear array response: entry m is exp(-j 2 pi m spacing sin(angle)).
CVector steering_vector(double angle, Eigen::Index antennas, double spacing = 0.5);

/// Columns are steering vectors for each angle.
CMatrix steering_matrix(const std::vector<double>& angles, Eigen::Index antennas,
                        double spacing = 0.5);

struct ConstraintCheck {
  std::string name;
  double residual = 0.0;  // > 0 means violated by that amount
  double scale = 1.0;
  bool pass = true;
};

struct FeasibilityReport {
  std::vector<ConstraintCheck> checks;
  bool all_pass() const;
  const ConstraintCheck* find(const std::string& name) const;
};

/// Relative threshold: a check passes when residual <= kFeasTol * scale.
inline constexpr double kFeasTol = 1e-8;

/// Evaluates every constraint present in `uc` (plus PSD-ness) for covariance Q.
/// Masks are compared against diag(W^H Q W).
FeasibilityReport check_feasible(const CMatrix& covariance, const UserConstraints& uc);

/// SISO form: per-bin powers against power budget and masks.
FeasibilityReport check_feasible_powers(const RVector& powers, const UserConstraints& uc);

}  // namespace cogmimo
