// SPDX-License-Identifier: Apache-2.0
//
// Batch commands behind the command-line tool. Each command writes plot-ready
// CSV / JSON artifacts and returns a process exit code:
//   0 success, 1 uniqueness conditions fail or unexpected error,
//   2 parse / invalid input, 3 infeasible, 4 no convergence.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cogmimo/error.hpp"
#include "cogmimo/scenario.hpp"

namespace cogmimo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitNoConvergence = 4;

int exit_code(ErrorKind kind) noexcept;

struct CommonOptions {
  std::filesystem::path scenario;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iter;
  std::optional<double> tol;
};

/// Loads the scenario file and applies the command-line overrides.
Scenario load_with_overrides(const CommonOptions& opt);

/// rates.csv, residuals.csv, final_profile.json, ne_report.json
int cmd_run(const CommonOptions& opt, std::ostream& log);

/// Prints booleans and margins of every applicable condition.
int cmd_check_uniqueness(const CommonOptions& opt, std::ostream& out);

/// psd.csv with the equilibrium powers and normalized interference per bin.
int cmd_psd(const CommonOptions& opt, std::ostream& log);

struct BeampatternOptions {
  std::size_t points = 361;  // uniform grid over [-pi/2, pi/2]
  double spacing = 0.5;      // element spacing in wavelengths
};

/// beampattern.csv with per-mode gains |a(phi)^H v_i|^2 and the total pattern.
int cmd_beampattern(const CommonOptions& opt, const BeampatternOptions& bp, std::ostream& log);

struct SweepOptions {
  std::vector<double> ratios{1.0, 2.0, 4.0, 8.0};  // d_rq / d_qq
  std::vector<Eigen::Index> antennas{1, 2, 4};
  std::size_t seeds = 50;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

struct SweepPoint {
  Eigen::Index antennas = 0;
  double ratio = 0.0;
  std::size_t seed_index = 0;
  double sum_rate = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

struct SweepSummary {
  Eigen::Index antennas = 0;
  double ratio = 0.0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::size_t samples = 0;
  std::size_t nonconverged = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;      // sorted by (antennas, ratio, seed)
  std::vector<SweepSummary> summary;   // sorted by (antennas, ratio)
};

/// Runs every (antennas, ratio, seed) point of a random-MIMO template to
/// equilibrium. The channel seed of point s is base_seed + s for every ratio
/// and antenna count, so curves share their random draws.
SweepResult sweep_distance(const Scenario& templ, const SweepOptions& opt);

/// sweep.csv (summary) and sweep_points.csv (one row per run).
int cmd_sweep_distance(const CommonOptions& opt, const SweepOptions& sweep, std::ostream& log);

/// Equilibrium powers and normalized MUI-plus-noise of user q on every bin.
struct PsdRow {
  std::size_t bin = 0;
  std::size_t user = 0;
  double power = 0.0;
  double normalized_interference = 0.0;
};
std::vector<PsdRow> psd_table(const GameSpec& spec, const StrategyProfile& profile);

struct BeamRow {
  std::size_t user = 0;
  std::string mode;  // index in increasing eigenvalue order, or "total"
  double eigenvalue = 0.0;
  double angle = 0.0;
  double gain = 0.0;
};
std::vector<BeamRow> beampattern_table(const StrategyProfile& profile, std::size_t points,
                                       double spacing);

}  // namespace cogmimo
