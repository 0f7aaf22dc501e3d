// SPDX-License-Identifier: Apache-2.0
//
// Game variants over the interference channel and their best-response maps.
//
//   G1        max R_q  s.t. Tr(Q) <= P, U^H Q = 0         (projected waterfill)
//   G2        max R_q  s.t. soft/peak shaping, U^H Q = 0   (capped waterfill)
//   G_alpha   max R_q with R_{-q} + alpha U^ U^^H, Tr(Q) <= P
//   G_inf     max over the hat channels, Tr(Q) <= P
//   SISO      per-bin powers with masks and gap            (scalar waterfill)
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogmimo/channel.hpp"
#include "cogmimo/constraints.hpp"
#include "cogmimo/waterfilling.hpp"

namespace cogmimo {

enum class Variant { G1, G2, GAlpha, GInfinity, SisoMasked };

std::string_view to_string(Variant v) noexcept;
/// Accepts "G1", "G2", "G_alpha", "G_infinity", "SISO_masked". Throws BadParams.
Variant parse_variant(std::string_view name);

class GameSpec {
 public:
  /// MIMO variants. alpha is only used by GAlpha (alpha >= 0).
  static GameSpec mimo(ChannelSet channels, ConstraintSpec constraints, Variant variant,
                       double alpha = 0.0);
  static GameSpec siso(SisoScenario scenario, ConstraintSpec constraints);

  Variant variant() const noexcept { return variant_; }
  std::size_t user_count() const noexcept { return constraints_.size(); }
  bool is_siso() const noexcept { return variant_ == Variant::SisoMasked; }
  double alpha() const noexcept { return alpha_; }

  const ChannelSet& channels() const;
  const SisoScenario& scenario() const;
  const ConstraintSpec& constraints() const noexcept { return constraints_; }
  const UserConstraints& user(std::size_t q) const { return constraints_.at(q); }
  const ModifiedChannels& modified() const noexcept { return mods_; }
  /// U^_q (receive-side virtual-noise directions); zero columns when absent.
  const CMatrix& virtual_direction(std::size_t q) const { return virtual_dirs_.at(q); }

  /// Strategy shape of user q: tx_dim x tx_dim, or bins x 1 for SISO.
  Eigen::Index strategy_rows(std::size_t q) const;
  Eigen::Index strategy_cols(std::size_t q) const;

  /// Budget that the best response fills (P_q, or P_ave for G2).
  double budget(std::size_t q) const;
  double gap(std::size_t q) const;

 private:
  GameSpec() = default;

  Variant variant_ = Variant::G1;
  std::optional<ChannelSet> channels_;
  std::optional<SisoScenario> scenario_;
  ConstraintSpec constraints_;
  double alpha_ = 0.0;
  ModifiedChannels mods_;
  std::vector<CMatrix> virtual_dirs_;
};

/// Per-bin powers of every user for a SISO profile.
std::vector<RVector> siso_powers(const StrategyProfile& profile);
StrategyProfile siso_profile(const std::vector<RVector>& powers);

/// Interference-plus-noise covariance that the variant's best response of user
/// q sees (R_{-q}, R_{-q,alpha} or R^_{-q}). MIMO variants only.
CMatrix effective_interference(std::size_t q, const StrategyProfile& profile,
                               const GameSpec& spec);

/// T_q(Q_{-q}) for the spec's variant.
CMatrix best_response(std::size_t q, const StrategyProfile& profile, const GameSpec& spec);

/// The variant's payoff for user q when it plays `own` against `profile`.
double payoff(std::size_t q, const CMatrix& own, const StrategyProfile& profile,
              const GameSpec& spec);

/// Payoff of every user at the profile.
std::vector<double> payoffs(const StrategyProfile& profile, const GameSpec& spec);

/// Checks only the constraints that the variant's game imposes.
FeasibilityReport check_strategy(std::size_t q, const CMatrix& strategy, const GameSpec& spec);

void require_profile_shape(const StrategyProfile& profile, const GameSpec& spec);

inline constexpr double kDefaultNashTol = 1e-7;

struct NEReport {
  std::vector<double> residuals;  // ||Q_q - T_q|| / max(1, ||Q_q||)
  std::vector<double> rates;      // variant payoffs, bits
  double tolerance = kDefaultNashTol;
  bool is_nash = false;
  double max_residual() const;
};

NEReport is_nash(const StrategyProfile& profile, const GameSpec& spec,
                 double tolerance = kDefaultNashTol);

/// terms[r][q] is the (r -> q) interference term; the two sums are
///   received(q)  = sum_{r != q} terms[r][q]   (low MUI received)
///   generated(r) = sum_{q != r} terms[r][q]   (low MUI generated)
/// Margins are 1 - LHS, positive when the condition holds.
struct UniquenessReport {
  std::vector<std::vector<double>> terms;
  std::vector<double> received_lhs;
  std::vector<double> generated_lhs;
  bool received_holds = false;
  bool generated_holds = false;
  bool heuristic = false;  // evaluated on modified channels; not a proven gate

  bool any_holds() const { return received_holds || generated_holds; }
  double received_margin() const;   // min over users of 1 - LHS
  double generated_margin() const;
  double best_margin() const { return std::max(received_margin(), generated_margin()); }
};

/// MIMO conditions with terms rho(H_rq^H H_qq^{-H} H_qq^{-1} H_rq).
/// Throws SingularDirectChannel when some H_qq is not invertible.
UniquenessReport uniqueness_mimo(const ChannelSet& ch);

/// SISO conditions with terms max_k |H_rq(k)|^2 d_qq^2 / (|H_qq(k)|^2 d_rq^2),
/// where the scenario's responses play the role of the unnormalized channels.
/// Without distances every d is taken as 1.
UniquenessReport uniqueness_siso(
    const SisoScenario& s,
    const std::optional<std::vector<std::vector<double>>>& distances = std::nullopt);

/// The MIMO conditions evaluated on the variant's modified direct/cross
/// channels, with a pseudoinverse in place of H_qq^{-1}. Flagged heuristic
/// whenever a null constraint or shaping matrix is involved.
UniquenessReport uniqueness_for_game(const GameSpec& spec);

/// Solves a game to equilibrium; used to keep this module independent of the
/// iteration engine.
using EquilibriumSolver = std::function<StrategyProfile(const GameSpec&)>;

struct LimitCheckPoint {
  double alpha = 0.0;
  double null_residual = 0.0;       // max_q ||U_q^H Q_q|| / ||Q_q||
  double distance_to_limit = 0.0;   // max_q ||Q_q(alpha) - Q_q,inf||
};

struct LimitCheckReport {
  std::vector<LimitCheckPoint> points;
  double limit_null_residual = 0.0;  // same residual at the G_inf equilibrium
  bool uniqueness_gate = false;      // received or generated condition holds
  UniquenessReport uniqueness;
};

/// Solves G_alpha over `alphas` and G_inf once, with U^_q = H_qq U_q built from
/// each user's null matrix, and records how fast the null constraint emerges.
LimitCheckReport virtual_noise_limit_check(const ChannelSet& ch, const ConstraintSpec& cs,
                                           const std::vector<double>& alphas,
                                           const EquilibriumSolver& solve);

}  // namespace cogmimo
