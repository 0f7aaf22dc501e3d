// SPDX-License-Identifier: Apache-2.0
#include "cogmimo/waterfilling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "cogmimo/error.hpp"

namespace cogmimo {

namespace {

double cap_at(const RVector& caps, Eigen::Index k) { return caps.size() ? caps(k) : kInf; }

double filled(const RVector& lambda, double mu, const RVector& caps) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    acc += std::clamp(mu - 1.0 / lambda(k), 0.0, cap_at(caps, k));
  }
  return acc;
}

// Closed-form level for the active set implied by mu. Returns nullopt when no
// mode is strictly interior.
std::optional<double> refine_level(const RVector& lambda, double mu, double budget,
                                   const RVector& caps) {
  double capped = 0.0;
  double inv_sum = 0.0;
  int interior = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    const double floor = 1.0 / lambda(k);
    const double cap = cap_at(caps, k);
    if (mu <= floor) continue;
    if (mu - floor >= cap) {
      capped += cap;
    } else {
      inv_sum += floor;
      ++interior;
    }
  }
  if (interior == 0) return std::nullopt;
  return (budget - capped + inv_sum) / interior;
}

}  // namespace

double water_level(const RVector& lambda, double budget, const RVector& caps) {
  if (lambda.size() == 0) throw Error(ErrorKind::ZeroChannel, "no positive gains to fill");
  if (!(lambda.array() > 0.0).all() || !lambda.allFinite()) {
    throw Error(ErrorKind::DomainError, "gains must be positive and finite");
  }
  if (caps.size() && caps.size() != lambda.size()) {
    throw Error(ErrorKind::DimensionMismatch, "caps length != gains length");
  }
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw Error(ErrorKind::DomainError, "budget must be finite and >= 0");
  }
  if (caps.size() && ((caps.array() < 0.0).any() || caps.hasNaN())) {
    throw Error(ErrorKind::DomainError, "caps must be >= 0");
  }
  const double floor_min = (1.0 / lambda.array()).minCoeff();
  const double floor_max = (1.0 / lambda.array()).maxCoeff();
  if (budget == 0.0) return floor_min;

  const double tol = kTolBudget * budget;
  double cap_sum = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) cap_sum += cap_at(caps, k);
  if (cap_sum < budget - tol) {
    throw Error(ErrorKind::InfeasibleBudget, "caps sum below the budget");
  }
  if (cap_sum <= budget + tol) {
    // Every mode sits at its cap; report the lowest level that reaches all caps.
    double mu = floor_min;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      mu = std::max(mu, 1.0 / lambda(k) + cap_at(caps, k));
    }
    return mu;
  }

  double lo = floor_min;
  double hi = floor_max + budget;
  for (int it = 0; it < 400 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (filled(lambda, mid, caps) < budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double mu = 0.5 * (lo + hi);
  // Snap onto the exact level of the active set; repeat while the set moves.
  for (int it = 0; it < 8; ++it) {
    const auto next = refine_level(lambda, mu, budget, caps);
    if (!next || *next == mu) break;
    if (std::abs(filled(lambda, *next, caps) - budget) >
        std::abs(filled(lambda, mu, caps) - budget)) {
      break;
    }
    mu = *next;
  }
  return mu;
}

RVector waterfill_powers(const RVector& lambda, double mu, const RVector& caps) {
  RVector p(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    p(k) = std::clamp(mu - 1.0 / lambda(k), 0.0, cap_at(caps, k));
  }
  return p;
}

namespace {

WaterfillResult waterfill_gram(const CMatrix& gram, double budget, double cap) {
  if (!(budget >= 0.0)) throw Error(ErrorKind::DomainError, "budget must be >= 0");
  if (!(cap > 0.0)) throw Error(ErrorKind::DomainError, "cap must be > 0");
  const HermitianEig eig = hermitian_eig(gram);
  const Eigen::Index n = gram.rows();
  if (n == 0 || !(eig.values(0) > 0.0)) {
    throw Error(ErrorKind::ZeroChannel, "no direction with positive channel gain");
  }
  const double threshold = kTolRank * eig.values(0);
  const Eigen::Index active = (eig.values.array() > threshold).count();

  WaterfillResult out;
  out.eigenvalues = eig.values.head(active);
  out.eigenvectors = eig.vectors.leftCols(active);
  if (std::isfinite(cap) && cap * double(active) <= budget) {
    out.all_capped = true;
    out.powers = RVector::Constant(active, cap);
    out.water_level = (1.0 / out.eigenvalues.array()).maxCoeff() + cap;
  } else {
    RVector caps;
    if (std::isfinite(cap)) caps = RVector::Constant(active, cap);
    out.water_level = water_level(out.eigenvalues, budget, caps);
    out.powers = waterfill_powers(out.eigenvalues, out.water_level, caps);
  }
  out.achieved = out.powers.sum();
  out.covariance = hermitian_part(out.eigenvectors * out.powers.cast<Complex>().asDiagonal() *
                                  out.eigenvectors.adjoint());
  return out;
}

}  // namespace

WaterfillResult mimo_waterfill(const CMatrix& gram, double budget) {
  return waterfill_gram(gram, budget, kInf);
}

WaterfillResult capped_mimo_waterfill(const CMatrix& gram, double budget, double cap) {
  return waterfill_gram(gram, budget, cap);
}

CMatrix whitened_gram(const CMatrix& channel, const CMatrix& interference_plus_noise) {
  Eigen::LLT<CMatrix> llt(hermitian_part(interference_plus_noise));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidChannel, "interference-plus-noise covariance is singular");
  }
  const CMatrix a = llt.matrixL().solve(channel);
  return hermitian_part(a.adjoint() * a);
}

WaterfillResult projected_waterfill(std::size_t q, const StrategyProfile& profile,
                                    const ChannelSet& ch, const ModifiedChannels& mods,
                                    double budget) {
  const CMatrix r = mui_covariance(q, profile, ch);
  WaterfillResult out = mimo_waterfill(whitened_gram(mods.link(q, q), r), budget);
  const CMatrix& p = mods.projectors.at(q);
  // Q = P Q P holds exactly for the optimum; enforce it against rounding.
  out.covariance = hermitian_part(p * out.covariance * p);
  return out;
}

WaterfillResult capped_waterfill(std::size_t q, const StrategyProfile& profile,
                                 const ChannelSet& ch, const ModifiedChannels& mods,
                                 double average_limit, double peak_limit) {
  if (mods.shaping_pinv.size() <= q) {
    throw Error(ErrorKind::InvalidConstraint, "modified channels were not built for G2");
  }
  const CMatrix r = mui_covariance(q, profile, ch);
  WaterfillResult out =
      capped_mimo_waterfill(whitened_gram(mods.link(q, q), r), average_limit, peak_limit);
  const CMatrix& p = mods.projectors.at(q);
  const CMatrix& gp = mods.shaping_pinv.at(q);
  out.shaped = hermitian_part(p * out.covariance * p);
  out.covariance = hermitian_part(gp.adjoint() * out.shaped * gp);
  return out;
}

RVector siso_gains(std::size_t q, const std::vector<RVector>& powers, const SisoScenario& s,
                   double gap) {
  if (powers.size() != s.user_count()) {
    throw Error(ErrorKind::DimensionMismatch, "one power vector per user");
  }
  RVector denom = s.noise(q);
  for (std::size_t r = 0; r < s.user_count(); ++r) {
    if (r == q) continue;
    if (static_cast<std::size_t>(powers[r].size()) != s.bin_count()) {
      throw Error(ErrorKind::DimensionMismatch, "power vector length != bin count");
    }
    denom.array() += s.gain(r, q).array() * powers[r].array();
  }
  return s.gain(q, q).array() / (gap * denom.array());
}

PowerAllocation siso_masked_waterfill(std::size_t q, const std::vector<RVector>& powers,
                                      const SisoScenario& s, double budget,
                                      const std::optional<RVector>& masks, double gap) {
  if (!(gap >= 1.0)) throw Error(ErrorKind::DomainError, "gap must be >= 1");
  const auto n = static_cast<Eigen::Index>(s.bin_count());
  if (masks && masks->size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "mask length != bin count");
  }
  PowerAllocation out;
  out.gains = siso_gains(q, powers, s, gap);
  out.powers = RVector::Zero(n);

  // Bins with zero gain can never receive power.
  std::vector<Eigen::Index> usable;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (out.gains(k) > 0.0) usable.push_back(k);
  }
  const auto m = static_cast<Eigen::Index>(usable.size());
  RVector lambda(m);
  RVector caps;
  if (masks) caps.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    lambda(i) = out.gains(usable[i]);
    if (masks) caps(i) = (*masks)(usable[i]);
  }
  if (m == 0) {
    if (budget > 0.0) throw Error(ErrorKind::ZeroChannel, "no bin with positive gain");
    return out;
  }
  out.water_level = water_level(lambda, budget, caps);
  const RVector p = waterfill_powers(lambda, out.water_level, caps);
  for (Eigen::Index i = 0; i < m; ++i) out.powers(usable[i]) = p(i);
  return out;
}

double inverse_gaussian_tail(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::DomainError, "tail probability must be in (0,1)");
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

GapFactor gap_factor(Constellation family, double error_probability) {
  if (!(error_probability > 0.0 && error_probability < 1.0)) {
    throw Error(ErrorKind::DomainError, "error probability must be in (0,1)");
  }
  switch (family) {
    case Constellation::Qam: {
      const double x = inverse_gaussian_tail(error_probability / 4.0);
      const double g = x * x / 3.0;
      if (x < 0.0 || g < 1.0) return {1.0, true};
      return {g, false};
    }
  }
  throw Error(ErrorKind::DomainError, "unknown constellation family");
}

}  // namespace cogmimo
