// SPDX-License-Identifier: Apache-2.0
#include "cogmimo/game.hpp"

#include <algorithm>
#include <cmath>

#include "cogmimo/error.hpp"

namespace cogmimo {

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::G1: return "G1";
    case Variant::G2: return "G2";
    case Variant::GAlpha: return "G_alpha";
    case Variant::GInfinity: return "G_infinity";
    case Variant::SisoMasked: return "SISO_masked";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::G1, Variant::G2, Variant::GAlpha, Variant::GInfinity,
                    Variant::SisoMasked}) {
    if (name == to_string(v)) return v;
  }
  throw Error(ErrorKind::BadParams, "unknown game variant '" + std::string(name) + "'");
}

namespace {

void require_budgets(const ConstraintSpec& cs, Variant v) {
  for (std::size_t q = 0; q < cs.size(); ++q) {
    if (!cs[q].power_budget) {
      throw Error(ErrorKind::InvalidConstraint, "variant " + std::string(to_string(v)) +
                                                    " needs a power budget for user " +
                                                    std::to_string(q));
    }
  }
}

}  // namespace

GameSpec GameSpec::mimo(ChannelSet channels, ConstraintSpec constraints, Variant variant,
                        double alpha) {
  if (variant == Variant::SisoMasked) {
    throw Error(ErrorKind::BadParams, "use GameSpec::siso for the SISO game");
  }
  std::vector<Eigen::Index> dims;
  for (std::size_t q = 0; q < channels.user_count(); ++q) dims.push_back(channels.tx_dim(q));
  validate_constraints(constraints, dims);

  GameSpec spec;
  spec.variant_ = variant;
  spec.alpha_ = alpha;
  const std::size_t users = channels.user_count();
  spec.virtual_dirs_.resize(users);
  for (std::size_t q = 0; q < users; ++q) spec.virtual_dirs_[q] = CMatrix(channels.rx_dim(q), 0);

  switch (variant) {
    case Variant::G1:
      require_budgets(constraints, variant);
      spec.mods_ = modified_channels_g1(channels, constraints);
      break;
    case Variant::G2:
      spec.mods_ = modified_channels_g2(channels, constraints);
      break;
    case Variant::GAlpha:
    case Variant::GInfinity:
      require_budgets(constraints, variant);
      if (variant == Variant::GAlpha && !(alpha >= 0.0 && std::isfinite(alpha))) {
        throw Error(ErrorKind::BadParams, "alpha must be finite and >= 0");
      }
      for (std::size_t q = 0; q < users; ++q) {
        if (constraints[q].null_matrix) {
          spec.virtual_dirs_[q] =
              virtual_noise_direction(channels.direct(q), *constraints[q].null_matrix);
        }
      }
      if (variant == Variant::GInfinity) spec.mods_ = hat_channels(channels, spec.virtual_dirs_);
      break;
    case Variant::SisoMasked:
      break;
  }
  spec.channels_ = std::move(channels);
  spec.constraints_ = std::move(constraints);
  return spec;
}

GameSpec GameSpec::siso(SisoScenario scenario, ConstraintSpec constraints) {
  const std::vector<Eigen::Index> dims(scenario.user_count(),
                                       static_cast<Eigen::Index>(scenario.bin_count()));
  validate_constraints(constraints, dims);
  require_budgets(constraints, Variant::SisoMasked);
  for (std::size_t q = 0; q < constraints.size(); ++q) {
    if (constraints[q].null_matrix || constraints[q].soft) {
      throw Error(ErrorKind::InvalidConstraint,
                  "SISO game takes nulls as zero masks; user " + std::to_string(q) +
                      " has a null or shaping matrix");
    }
  }
  GameSpec spec;
  spec.variant_ = Variant::SisoMasked;
  spec.scenario_ = std::move(scenario);
  spec.constraints_ = std::move(constraints);
  return spec;
}

const ChannelSet& GameSpec::channels() const {
  if (!channels_) throw Error(ErrorKind::BadParams, "SISO game has no MIMO channel set");
  return *channels_;
}

const SisoScenario& GameSpec::scenario() const {
  if (!scenario_) throw Error(ErrorKind::BadParams, "MIMO game has no SISO scenario");
  return *scenario_;
}

Eigen::Index GameSpec::strategy_rows(std::size_t q) const {
  return is_siso() ? static_cast<Eigen::Index>(scenario().bin_count()) : channels().tx_dim(q);
}

Eigen::Index GameSpec::strategy_cols(std::size_t q) const {
  return is_siso() ? 1 : channels().tx_dim(q);
}

double GameSpec::budget(std::size_t q) const {
  const UserConstraints& uc = user(q);
  if (variant_ == Variant::G2) return uc.soft->average_limit;
  return *uc.power_budget;
}

double GameSpec::gap(std::size_t q) const { return user(q).gap.value_or(1.0); }

std::vector<RVector> siso_powers(const StrategyProfile& profile) {
  std::vector<RVector> out;
  out.reserve(profile.size());
  for (const auto& c : profile.covariances) out.push_back(c.col(0).real());
  return out;
}

StrategyProfile siso_profile(const std::vector<RVector>& powers) {
  StrategyProfile out;
  for (const auto& p : powers) out.covariances.push_back(p.cast<Complex>());
  return out;
}

void require_profile_shape(const StrategyProfile& profile, const GameSpec& spec) {
  if (profile.size() != spec.user_count()) {
    throw Error(ErrorKind::DimensionMismatch, "profile has the wrong number of users");
  }
  for (std::size_t q = 0; q < profile.size(); ++q) {
    if (profile[q].rows() != spec.strategy_rows(q) || profile[q].cols() != spec.strategy_cols(q)) {
      throw Error(ErrorKind::DimensionMismatch,
                  "strategy of user " + std::to_string(q) + " has the wrong shape");
    }
  }
}

CMatrix effective_interference(std::size_t q, const StrategyProfile& profile,
                               const GameSpec& spec) {
  const ChannelSet& ch = spec.channels();
  switch (spec.variant()) {
    case Variant::G1:
    case Variant::G2:
      return mui_covariance(q, profile, ch);
    case Variant::GAlpha:
      return mui_covariance(q, profile, ch) +
             virtual_noise_covariance(spec.virtual_direction(q), spec.alpha());
    case Variant::GInfinity: {
      require_profile_matches(profile, ch);
      const ModifiedChannels& m = spec.modified();
      CMatrix r = m.reduced_noise.at(q);
      for (std::size_t s = 0; s < ch.user_count(); ++s) {
        if (s == q) continue;
        r.noalias() += m.link(s, q) * profile[s] * m.link(s, q).adjoint();
      }
      return hermitian_part(r);
    }
    case Variant::SisoMasked:
      break;
  }
  throw Error(ErrorKind::BadParams, "SISO game has no interference covariance");
}

namespace {

const CMatrix& effective_direct(std::size_t q, const GameSpec& spec) {
  return spec.variant() == Variant::GInfinity ? spec.modified().link(q, q)
                                              : spec.channels().direct(q);
}

}  // namespace

CMatrix best_response(std::size_t q, const StrategyProfile& profile, const GameSpec& spec) {
  require_profile_shape(profile, spec);
  const UserConstraints& uc = spec.user(q);
  switch (spec.variant()) {
    case Variant::G1:
      return projected_waterfill(q, profile, spec.channels(), spec.modified(), *uc.power_budget)
          .covariance;
    case Variant::G2:
      return capped_waterfill(q, profile, spec.channels(), spec.modified(),
                              uc.soft->average_limit, uc.peak.value_or(kInf))
          .covariance;
    case Variant::GAlpha:
    case Variant::GInfinity: {
      const CMatrix r = effective_interference(q, profile, spec);
      return mimo_waterfill(whitened_gram(effective_direct(q, spec), r), *uc.power_budget)
          .covariance;
    }
    case Variant::SisoMasked: {
      const auto powers = siso_powers(profile);
      const auto alloc = siso_masked_waterfill(q, powers, spec.scenario(), *uc.power_budget,
                                               uc.masks, spec.gap(q));
      return alloc.powers.cast<Complex>();
    }
  }
  throw Error(ErrorKind::BadParams, "unknown variant");
}

double payoff(std::size_t q, const CMatrix& own, const StrategyProfile& profile,
              const GameSpec& spec) {
  require_profile_shape(profile, spec);
  if (spec.is_siso()) {
    const RVector gains = siso_gains(q, siso_powers(profile), spec.scenario(), spec.gap(q));
    const RVector p = own.col(0).real();
    return ((gains.array() * p.array()).log1p() / std::log(2.0)).sum();
  }
  return rate_against(effective_direct(q, spec), effective_interference(q, profile, spec), own);
}

std::vector<double> payoffs(const StrategyProfile& profile, const GameSpec& spec) {
  std::vector<double> out(profile.size());
  for (std::size_t q = 0; q < profile.size(); ++q) out[q] = payoff(q, profile[q], profile, spec);
  return out;
}

FeasibilityReport check_strategy(std::size_t q, const CMatrix& strategy, const GameSpec& spec) {
  const UserConstraints& uc = spec.user(q);
  UserConstraints active;
  switch (spec.variant()) {
    case Variant::G1:
      active.power_budget = uc.power_budget;
      active.null_matrix = uc.null_matrix;
      break;
    case Variant::G2:
      active.soft = uc.soft;
      active.peak = uc.peak;
      active.null_matrix = uc.null_matrix;
      break;
    case Variant::GAlpha:
    case Variant::GInfinity:
      active.power_budget = uc.power_budget;
      break;
    case Variant::SisoMasked:
      active.power_budget = uc.power_budget;
      active.masks = uc.masks;
      return check_feasible_powers(strategy.col(0).real(), active);
  }
  return check_feasible(strategy, active);
}

double NEReport::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

NEReport is_nash(const StrategyProfile& profile, const GameSpec& spec, double tolerance) {
  NEReport rep;
  rep.tolerance = tolerance;
  rep.residuals.resize(profile.size());
  for (std::size_t q = 0; q < profile.size(); ++q) {
    const CMatrix br = best_response(q, profile, spec);
    rep.residuals[q] = (profile[q] - br).norm() / std::max(1.0, profile[q].norm());
  }
  rep.rates = payoffs(profile, spec);
  rep.is_nash = rep.max_residual() <= tolerance;
  return rep;
}

double UniquenessReport::received_margin() const {
  double m = kInf;
  for (double v : received_lhs) m = std::min(m, 1.0 - v);
  return m;
}

double UniquenessReport::generated_margin() const {
  double m = kInf;
  for (double v : generated_lhs) m = std::min(m, 1.0 - v);
  return m;
}

namespace {

UniquenessReport summarize(std::vector<std::vector<double>> terms) {
  UniquenessReport rep;
  const std::size_t users = terms.size();
  rep.received_lhs.assign(users, 0.0);
  rep.generated_lhs.assign(users, 0.0);
  for (std::size_t r = 0; r < users; ++r) {
    for (std::size_t q = 0; q < users; ++q) {
      if (r == q) continue;
      rep.received_lhs[q] += terms[r][q];
      rep.generated_lhs[r] += terms[r][q];
    }
  }
  rep.received_holds = std::all_of(rep.received_lhs.begin(), rep.received_lhs.end(),
                                   [](double v) { return v < 1.0; });
  rep.generated_holds = std::all_of(rep.generated_lhs.begin(), rep.generated_lhs.end(),
                                    [](double v) { return v < 1.0; });
  rep.terms = std::move(terms);
  return rep;
}

// rho(H_rq^H Hinv^H Hinv H_rq) for every pair, given per-receiver inverses.
std::vector<std::vector<double>> mimo_terms(const std::vector<std::vector<CMatrix>>& links,
                                            const std::vector<CMatrix>& inverses) {
  const std::size_t users = inverses.size();
  std::vector<std::vector<double>> terms(users, std::vector<double>(users, 0.0));
  for (std::size_t r = 0; r < users; ++r) {
    for (std::size_t q = 0; q < users; ++q) {
      if (r == q) continue;
      const CMatrix a = inverses[q] * links[r][q];
      terms[r][q] = spectral_radius(a.adjoint() * a);
    }
  }
  return terms;
}

}  // namespace

UniquenessReport uniqueness_mimo(const ChannelSet& ch) {
  const std::size_t users = ch.user_count();
  std::vector<CMatrix> inverses(users);
  std::vector<std::vector<CMatrix>> links(users, std::vector<CMatrix>(users));
  for (std::size_t q = 0; q < users; ++q) {
    Eigen::FullPivLU<CMatrix> lu(ch.direct(q));
    if (!lu.isInvertible() || lu.rcond() < 1.0 / kMaxDirectCondition) {
      throw Error(ErrorKind::SingularDirectChannel,
                  "direct channel of user " + std::to_string(q) + " is not invertible");
    }
    inverses[q] = lu.inverse();
  }
  for (std::size_t r = 0; r < users; ++r) {
    for (std::size_t q = 0; q < users; ++q) links[r][q] = ch.link(r, q);
  }
  return summarize(mimo_terms(links, inverses));
}

UniquenessReport uniqueness_siso(const SisoScenario& s,
                                 const std::optional<std::vector<std::vector<double>>>& distances) {
  const std::size_t users = s.user_count();
  if (distances) {
    if (distances->size() != users) {
      throw Error(ErrorKind::DimensionMismatch, "distance grid must be user_count x user_count");
    }
    for (const auto& row : *distances) {
      if (row.size() != users) {
        throw Error(ErrorKind::DimensionMismatch, "distance grid must be user_count x user_count");
      }
    }
  }
  auto dist = [&](std::size_t r, std::size_t q) { return distances ? (*distances)[r][q] : 1.0; };
  std::vector<std::vector<double>> terms(users, std::vector<double>(users, 0.0));
  for (std::size_t r = 0; r < users; ++r) {
    for (std::size_t q = 0; q < users; ++q) {
      if (r == q) continue;
      const RVector ratio = s.gain(r, q).array() / s.gain(q, q).array();
      const double dq = dist(q, q);
      const double dr = dist(r, q);
      terms[r][q] = ratio.maxCoeff() * (dq * dq) / (dr * dr);
    }
  }
  return summarize(std::move(terms));
}

UniquenessReport uniqueness_for_game(const GameSpec& spec) {
  if (spec.is_siso()) return uniqueness_siso(spec.scenario());
  const ChannelSet& ch = spec.channels();
  const std::size_t users = ch.user_count();
  bool modified = false;
  for (std::size_t q = 0; q < users; ++q) {
    const UserConstraints& uc = spec.user(q);
    if (uc.null_matrix || (spec.variant() == Variant::G2)) modified = true;
  }
  if (spec.variant() == Variant::GAlpha || !modified) return uniqueness_mimo(ch);
  const ModifiedChannels& m = spec.modified();
  std::vector<CMatrix> inverses(users);
  for (std::size_t q = 0; q < users; ++q) inverses[q] = pseudoinverse(m.link(q, q));
  UniquenessReport rep = summarize(mimo_terms(m.links, inverses));
  rep.heuristic = true;
  return rep;
}

LimitCheckReport virtual_noise_limit_check(const ChannelSet& ch, const ConstraintSpec& cs,
                                           const std::vector<double>& alphas,
                                           const EquilibriumSolver& solve) {
  LimitCheckReport rep;
  rep.uniqueness = uniqueness_mimo(ch);
  rep.uniqueness_gate = rep.uniqueness.any_holds();

  auto null_residual = [&](const StrategyProfile& profile) {
    double worst = 0.0;
    for (std::size_t q = 0; q < cs.size(); ++q) {
      if (!cs[q].null_matrix) continue;
      const double qn = profile[q].norm();
      if (qn == 0.0) continue;
      worst = std::max(worst, (cs[q].null_matrix->adjoint() * profile[q]).norm() / qn);
    }
    return worst;
  };

  const StrategyProfile limit = solve(GameSpec::mimo(ch, cs, Variant::GInfinity));
  rep.limit_null_residual = null_residual(limit);
  for (double alpha : alphas) {
    const StrategyProfile sol = solve(GameSpec::mimo(ch, cs, Variant::GAlpha, alpha));
    LimitCheckPoint pt;
    pt.alpha = alpha;
    pt.null_residual = null_residual(sol);
    for (std::size_t q = 0; q < sol.size(); ++q) {
      pt.distance_to_limit = std::max(pt.distance_to_limit, (sol[q] - limit[q]).norm());
    }
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace cogmimo
