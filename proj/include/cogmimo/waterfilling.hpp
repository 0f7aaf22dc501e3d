// SPDX-License-Identifier: Apache-2.0
//
// Best-response solvers. All of them reduce to finding a water level mu with
//   sum_k clip(mu - 1/lambda_k, 0, cap_k) = budget
// over the positive eigenvalues (or per-bin gains) lambda_k.
#pragma once

#include <limits>
#include <optional>

#include "cogmimo/channel.hpp"
#include "cogmimo/constraints.hpp"

namespace cogmimo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
/// Budget equality tolerance, relative to the budget.
inline constexpr double kTolBudget = 1e-10;

/// Water level for positive gains `lambda`. `caps` may be empty (no caps) or
/// hold one upper bound per entry (+inf allowed). Throws InfeasibleBudget when
/// the caps cannot absorb the budget.
double water_level(const RVector& lambda, double budget, const RVector& caps = {});

/// clip(mu - 1/lambda_k, 0, cap_k); modes sitting exactly on a breakpoint get
/// exactly 0 or exactly the cap.
RVector waterfill_powers(const RVector& lambda, double mu, const RVector& caps = {});

struct WaterfillResult {
  CMatrix covariance;   // Q (for G2, already mapped back through G^#)
  CMatrix shaped;       // G2 only: the waterfilled matrix before the G^# mapping
  RVector powers;       // per active mode
  double water_level = 0.0;
  RVector eigenvalues;  // active eigenvalues, descending
  CMatrix eigenvectors; // matching columns
  double achieved = 0.0;
  bool all_capped = false;  // every active mode at the cap (Eq. "otherwise" branch)
};

/// Classical MIMO waterfilling on a PSD Gram matrix S (= H^H R^{-1} H):
/// maximizes log det(I + S Q) subject to Tr(Q) <= budget.
/// Throws ZeroChannel when S has no eigenvalue above the rank tolerance.
WaterfillResult mimo_waterfill(const CMatrix& gram, double budget);

/// Same with every mode power additionally capped at `cap`. When
/// cap * active_modes <= budget all active modes receive exactly `cap`.
WaterfillResult capped_mimo_waterfill(const CMatrix& gram, double budget, double cap);

/// H^H R^{-1} H computed through a Cholesky factor of R.
CMatrix whitened_gram(const CMatrix& channel, const CMatrix& interference_plus_noise);

/// G1 best response: waterfill over H~_qq^H R_{-q}^{-1} H~_qq, where R_{-q}
/// comes from the physical channels. The result lies in R(U_q)^perp.
WaterfillResult projected_waterfill(std::size_t q, const StrategyProfile& profile,
                                    const ChannelSet& ch, const ModifiedChannels& mods,
                                    double budget);

/// G2 best response: capped waterfill over H-_qq^H R_{-q}^{-1} H-_qq with
/// budget P_ave and cap P_peak, mapped back as Q = G^{#H} X G^#.
WaterfillResult capped_waterfill(std::size_t q, const StrategyProfile& profile,
                                 const ChannelSet& ch, const ModifiedChannels& mods,
                                 double average_limit, double peak_limit);

struct PowerAllocation {
  RVector powers;
  double water_level = 0.0;
  RVector gains;  // |H_qq(k)|^2 / (gap * (noise(k) + MUI(k)))
};

/// Effective per-bin gains seen by user q given everyone's powers.
RVector siso_gains(std::size_t q, const std::vector<RVector>& powers, const SisoScenario& s,
                   double gap);

/// SISO best response with spectral masks and gap. `powers` holds the current
/// allocation of every user; entry q is ignored.
PowerAllocation siso_masked_waterfill(std::size_t q, const std::vector<RVector>& powers,
                                      const SisoScenario& s, double budget,
                                      const std::optional<RVector>& masks, double gap = 1.0);

enum class Constellation { Qam };

struct GapFactor {
  double value = 1.0;
  bool clamped = false;  // formula gave < 1 and was raised to 1
};

/// SNR gap for a target symbol error probability; for M-QAM
/// Gamma = (Qinv(Pe / 4))^2 / 3 with Qinv the inverse Gaussian tail.
GapFactor gap_factor(Constellation family, double error_probability);

/// Inverse of the standard Gaussian tail Q(x) = P(N(0,1) > x).
double inverse_gaussian_tail(double p);

}  // namespace cogmimo
