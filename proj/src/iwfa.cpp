// SPDX-License-Identifier: Apache-2.0
#include "cogmimo/iwfa.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cogmimo/error.hpp"

namespace cogmimo {

std::string_view to_string(ScheduleKind k) noexcept {
  switch (k) {
    case ScheduleKind::Sequential: return "sequential";
    case ScheduleKind::Simultaneous: return "simultaneous";
    case ScheduleKind::Randomized: return "randomized";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  for (auto k : {ScheduleKind::Sequential, ScheduleKind::Simultaneous, ScheduleKind::Randomized}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::BadParams, "unknown schedule kind '" + std::string(name) + "'");
}

Schedule::Schedule(ScheduleKind kind, std::size_t users, ScheduleParams params,
                   std::uint64_t seed)
    : kind_(kind), users_(users), params_(params), seed_(seed), rng_(seed), idle_(users, 0) {
  if (users == 0) throw Error(ErrorKind::BadParams, "schedule needs at least one user");
  if (kind == ScheduleKind::Randomized &&
      !(params.update_probability > 0.0 && params.update_probability <= 1.0)) {
    throw Error(ErrorKind::BadParams, "update probability must be in (0, 1]");
  }
}

std::size_t Schedule::max_delay() const noexcept {
  return kind_ == ScheduleKind::Randomized ? params_.max_delay : 0;
}

Tick Schedule::next() {
  Tick t;
  t.index = tick_;
  t.updates.assign(users_, false);
  t.reads.assign(users_, {});
  switch (kind_) {
    case ScheduleKind::Sequential:
      t.updates[tick_ % users_] = true;
      break;
    case ScheduleKind::Simultaneous:
      std::fill(t.updates.begin(), t.updates.end(), true);
      break;
    case ScheduleKind::Randomized: {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      for (std::size_t q = 0; q < users_; ++q) {
        const bool draw = coin(rng_) < params_.update_probability;
        // Nobody stays idle for more than D consecutive ticks.
        t.updates[q] = draw || idle_[q] >= params_.max_delay;
      }
      break;
    }
  }
  const std::size_t oldest = tick_ >= max_delay() ? tick_ - max_delay() : 0;
  for (std::size_t q = 0; q < users_; ++q) {
    if (t.updates[q]) {
      idle_[q] = 0;
      t.reads[q].assign(users_, tick_);
      if (kind_ == ScheduleKind::Randomized && tick_ > oldest) {
        std::uniform_int_distribution<std::size_t> age(oldest, tick_);
        for (std::size_t r = 0; r < users_; ++r) {
          if (r != q) t.reads[q][r] = age(rng_);
        }
      }
    } else {
      ++idle_[q];
    }
  }
  ++tick_;
  return t;
}

Schedule make_schedule(ScheduleKind kind, std::size_t users, ScheduleParams params,
                       std::uint64_t seed) {
  return Schedule(kind, users, params, seed);
}

std::vector<std::size_t> update_times(Schedule schedule, std::size_t user, std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < horizon; ++n) {
    const Tick t = schedule.next();
    if (t.updates.at(user)) out.push_back(n);
  }
  return out;
}

std::string_view to_string(InitPreset p) noexcept {
  return p == InitPreset::Zero ? "zero" : "uniform_projected";
}

InitPreset parse_init_preset(std::string_view name) {
  if (name == "zero") return InitPreset::Zero;
  if (name == "uniform_projected") return InitPreset::UniformProjected;
  throw Error(ErrorKind::BadParams, "unknown init preset '" + std::string(name) + "'");
}

namespace {

CMatrix uniform_on_projector(const CMatrix& projector, double budget) {
  const double rank = std::round(projector.trace().real());
  if (rank <= 0.0 || budget <= 0.0) return CMatrix::Zero(projector.rows(), projector.cols());
  return (budget / rank) * projector;
}

CMatrix uniform_initial(std::size_t q, const GameSpec& spec) {
  const UserConstraints& uc = spec.user(q);
  if (spec.is_siso()) {
    const auto n = static_cast<Eigen::Index>(spec.scenario().bin_count());
    const double budget = *uc.power_budget;
    if (budget <= 0.0) return CMatrix::Zero(n, 1);
    const RVector flat = RVector::Ones(n);
    const RVector caps = uc.masks ? *uc.masks : RVector();
    const double mu = water_level(flat, budget, caps);
    return waterfill_powers(flat, mu, caps).cast<Complex>();
  }
  const Eigen::Index n = spec.channels().tx_dim(q);
  if (spec.variant() == Variant::G2) {
    const CMatrix& gp = spec.modified().shaping_pinv.at(q);
    const CMatrix& g = uc.soft->shaping;
    // Projector onto R(G^H) minus the R(U-) directions.
    const CMatrix range = hermitian_part(gp * g);
    const CMatrix allowed =
        hermitian_part(range - (CMatrix::Identity(g.cols(), g.cols()) - spec.modified().projectors[q]));
    const double rank = std::round(allowed.trace().real());
    if (rank <= 0.0) return CMatrix::Zero(n, n);
    const double level = std::min(uc.soft->average_limit / rank, uc.peak.value_or(kInf));
    return hermitian_part(gp.adjoint() * (level * allowed) * gp);
  }
  const CMatrix p = uc.null_matrix ? orth_complement_projector(*uc.null_matrix)
                                   : CMatrix(CMatrix::Identity(n, n));
  return uniform_on_projector(p, *uc.power_budget);
}

}  // namespace

StrategyProfile initial_profile(InitPreset preset, const GameSpec& spec) {
  StrategyProfile out;
  for (std::size_t q = 0; q < spec.user_count(); ++q) {
    if (preset == InitPreset::Zero) {
      out.covariances.push_back(CMatrix::Zero(spec.strategy_rows(q), spec.strategy_cols(q)));
    } else {
      out.covariances.push_back(uniform_initial(q, spec));
    }
  }
  return out;
}

namespace {

double relative_step(const StrategyProfile& next, const StrategyProfile& prev) {
  double worst = 0.0;
  for (std::size_t q = 0; q < next.size(); ++q) {
    worst = std::max(worst, (next[q] - prev[q]).norm() / std::max(1.0, prev[q].norm()));
  }
  return worst;
}

}  // namespace

RunResult run(const GameSpec& spec, Schedule schedule, const StrategyProfile& init,
              const RunOptions& options) {
  if (options.max_iter < 1) throw Error(ErrorKind::BadParams, "max_iter must be >= 1");
  if (!(options.tol > 0.0)) throw Error(ErrorKind::BadParams, "tol must be > 0");
  if (schedule.users() != spec.user_count()) {
    throw Error(ErrorKind::BadParams, "schedule and game disagree on the user count");
  }
  require_profile_shape(init, spec);
  for (std::size_t q = 0; q < init.size(); ++q) {
    const auto rep = check_strategy(q, init[q], spec);
    if (!rep.all_pass()) {
      std::string failed;
      for (const auto& c : rep.checks) {
        if (!c.pass) failed += " " + c.name;
      }
      throw Error(ErrorKind::InfeasibleInit,
                  "initial strategy of user " + std::to_string(q) + " violates:" + failed);
    }
  }

  const std::size_t window = schedule.max_delay() + 1;
  const double nash_tol = 10.0 * options.tol;
  RunResult res;
  res.profile = init;
  res.rates.push_back(payoffs(init, spec));

  // history[i] is the profile committed at tick base + i.
  std::deque<StrategyProfile> history{init};
  std::size_t base = 0;
  std::size_t quiet = 0;

  for (std::size_t n = 0; n < options.max_iter; ++n) {
    const Tick tick = schedule.next();
    StrategyProfile next = res.profile;
    for (std::size_t q = 0; q < spec.user_count(); ++q) {
      if (!tick.updates[q]) continue;
      StrategyProfile seen = res.profile;
      for (std::size_t r = 0; r < spec.user_count(); ++r) {
        if (r == q) continue;
        const std::size_t at = tick.reads[q][r];
        seen[r] = history.at(at - base)[r];
      }
      next[q] = best_response(q, seen, spec);
    }
    const double step = relative_step(next, res.profile);
    res.max_step.push_back(step);
    res.profile = std::move(next);
    res.iterations = n + 1;
    res.rates.push_back(payoffs(res.profile, spec));

    history.push_back(res.profile);
    while (history.size() > window) {
      history.pop_front();
      ++base;
    }

    quiet = step <= options.tol ? quiet + 1 : 0;
    if (quiet >= window) {
      NEReport rep = is_nash(res.profile, spec, nash_tol);
      if (rep.is_nash) {
        res.converged = true;
        res.report = std::move(rep);
        return res;
      }
    }
  }
  res.report = is_nash(res.profile, spec, nash_tol);
  return res;
}

RunResult solve_equilibrium(const GameSpec& spec, const RunOptions& options) {
  return run(spec, make_schedule(ScheduleKind::Simultaneous, spec.user_count()),
             initial_profile(InitPreset::Zero, spec), options);
}

}  // namespace cogmimo
