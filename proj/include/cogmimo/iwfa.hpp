// SPDX-License-Identifier: Apache-2.0
//
// Totally asynchronous iterative waterfilling:
//
//   Q_q(n+1) = T_q(Q_{-q}(tau^q(n)))   if user q updates at tick n
//            = Q_q(n)                  otherwise
//
// where user q reads user r's covariance as committed at tick tau_r^q(n) <= n.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "cogmimo/game.hpp"

namespace cogmimo {

enum class ScheduleKind { Sequential, Simultaneous, Randomized };

std::string_view to_string(ScheduleKind k) noexcept;
ScheduleKind parse_schedule_kind(std::string_view name);

struct ScheduleParams {
  double update_probability = 0.5;  // randomized only, in (0, 1]
  std::size_t max_delay = 0;        // D, randomized only
};

/// What happens at one tick.
struct Tick {
  std::size_t index = 0;
  std::vector<bool> updates;                     // per user
  std::vector<std::vector<std::size_t>> reads;   // reads[q][r] = tau_r^q(n); only for updaters
};

/// Stateful generator of ticks. Copies replay the same sequence.
class Schedule {
 public:
  Schedule(ScheduleKind kind, std::size_t users, ScheduleParams params, std::uint64_t seed);

  ScheduleKind kind() const noexcept { return kind_; }
  std::size_t users() const noexcept { return users_; }
  /// Oldest information a user may act on, in ticks. Zero for the
  /// deterministic schedules.
  std::size_t max_delay() const noexcept;
  const ScheduleParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }

  Tick next();

 private:
  ScheduleKind kind_;
  std::size_t users_;
  ScheduleParams params_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::size_t tick_ = 0;
  std::vector<std::size_t> idle_;
};

/// Throws BadParams on invalid kind/params.
Schedule make_schedule(ScheduleKind kind, std::size_t users, ScheduleParams params = {},
                       std::uint64_t seed = 0);

/// Ticks in [0, horizon) at which `user` updates.
std::vector<std::size_t> update_times(Schedule schedule, std::size_t user, std::size_t horizon);

enum class InitPreset { Zero, UniformProjected };

std::string_view to_string(InitPreset p) noexcept;
InitPreset parse_init_preset(std::string_view name);

/// A feasible starting point. UniformProjected spreads the budget evenly over
/// the admissible subspace (capped by masks / peak limits).
StrategyProfile initial_profile(InitPreset preset, const GameSpec& spec);

struct RunOptions {
  std::size_t max_iter = 1000;
  double tol = 1e-8;
};

struct RunResult {
  StrategyProfile profile;
  bool converged = false;
  std::size_t iterations = 0;              // ticks executed
  std::vector<std::vector<double>> rates;  // rates[n][q], n = 0..iterations
  std::vector<double> max_step;            // max_step[n] for tick n -> n+1
  NEReport report;                         // at the final profile, tolerance 10 * tol
};

/// Runs the iteration. Convergence needs max_delay+1 consecutive ticks with a
/// relative step <= tol followed by a passing NE check at 10 * tol. On
/// exhaustion the last iterate is returned with converged == false.
/// Throws InfeasibleInit if `init` violates the game's constraints.
RunResult run(const GameSpec& spec, Schedule schedule, const StrategyProfile& init,
              const RunOptions& options = {});

/// Simultaneous schedule from the zero profile; throws nothing on
/// non-convergence, check RunResult::converged.
RunResult solve_equilibrium(const GameSpec& spec, const RunOptions& options = {});

}  // namespace cogmimo
