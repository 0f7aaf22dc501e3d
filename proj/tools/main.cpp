// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include <CLI11.hpp>

#include "cogmimo/commands.hpp"

namespace {

void add_common(CLI::App* sub, cogmimo::CommonOptions& opt) {
  sub->add_option("--scenario", opt.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", opt.out, "Output directory");
  sub->add_option("--seed", opt.seed, "Override the schedule and channel seed");
  sub->add_option("--max-iter", opt.max_iter, "Override the tick budget")->check(CLI::PositiveNumber);
  sub->add_option("--tol", opt.tol, "Override the convergence tolerance")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-maximization games over Gaussian interference channels"};
  app.require_subcommand(1);

  cogmimo::CommonOptions run_opt, uniq_opt, psd_opt, beam_opt, sweep_opt;
  cogmimo::BeampatternOptions beam;
  cogmimo::SweepOptions sweep;

  auto* run = app.add_subcommand("run", "Iterate to equilibrium and write the trajectory");
  add_common(run, run_opt);

  auto* uniq = app.add_subcommand("check-uniqueness", "Evaluate the sufficient uniqueness conditions");
  add_common(uniq, uniq_opt);

  auto* psd = app.add_subcommand("psd", "Equilibrium power spectral densities of a SISO game");
  add_common(psd, psd_opt);

  auto* bp = app.add_subcommand("beampattern", "Transmit beampatterns of the equilibrium covariances");
  add_common(bp, beam_opt);
  bp->add_option("--angles", beam.points, "Number of angles over [-pi/2, pi/2]")->check(CLI::Range(2, 1000000));
  bp->add_option("--spacing", beam.spacing, "Element spacing in wavelengths")->check(CLI::PositiveNumber);

  auto* sw = app.add_subcommand("sweep-distance", "Mean sum rate versus cross distance and antennas");
  add_common(sw, sweep_opt);
  sw->add_option("--ratios", sweep.ratios, "Cross/direct distance ratios")->delimiter(',');
  sw->add_option("--antennas", sweep.antennas, "Antenna counts")->delimiter(',');
  sw->add_option("--seeds", sweep.seeds, "Realizations per point")->check(CLI::PositiveNumber);
  sw->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cogmimo::kExitParse;
  }

  if (*run) return cogmimo::cmd_run(run_opt, std::cerr);
  if (*uniq) return cogmimo::cmd_check_uniqueness(uniq_opt, std::cout);
  if (*psd) return cogmimo::cmd_psd(psd_opt, std::cerr);
  if (*bp) return cogmimo::cmd_beampattern(beam_opt, beam, std::cerr);
  return cogmimo::cmd_sweep_distance(sweep_opt, sweep, std::cerr);
}
