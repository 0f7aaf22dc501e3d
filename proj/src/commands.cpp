// SPDX-License-Identifier: Apache-2.0
#include "cogmimo/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace cogmimo {

namespace fs = std::filesystem;

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::BadParams:
    case ErrorKind::InvalidChannel:
    case ErrorKind::InvalidConstraint:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::RankDeficient:
    case ErrorKind::NotHermitian:
      return kExitParse;
    case ErrorKind::InfeasibleBudget:
    case ErrorKind::InfeasibleInit:
      return kExitInfeasible;
    default:
      return kExitFailed;
  }
}

Scenario load_with_overrides(const CommonOptions& opt) {
  Scenario s = load_scenario(opt.scenario);
  if (opt.seed) override_seed(s, *opt.seed);
  if (opt.max_iter) s.run.max_iter = *opt.max_iter;
  if (opt.tol) s.run.tol = *opt.tol;
  return s;
}

namespace {

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw Error(ErrorKind::BadParams, "cannot write " + (dir / name).string());
  return f;
}

std::string complex_text(Complex c) {
  return "{\"re\": " + format_double(c.real()) + ", \"im\": " + format_double(c.imag()) + "}";
}

std::string matrix_text(const CMatrix& m, const std::string& indent) {
  std::string s = "[\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += indent + "  [";
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (k) s += ", ";
      s += complex_text(m(i, k));
    }
    s += i + 1 < m.rows() ? "],\n" : "]\n";
  }
  return s + indent + "]";
}

std::string doubles_text(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

void write_profile(const fs::path& dir, const StrategyProfile& p, Variant v) {
  auto f = open_out(dir, "final_profile.json");
  f << "{\n  \"variant\": \"" << to_string(v) << "\",\n  \"covariances\": [\n";
  for (std::size_t q = 0; q < p.size(); ++q) {
    f << "    " << matrix_text(p[q], "    ") << (q + 1 < p.size() ? ",\n" : "\n");
  }
  f << "  ]\n}\n";
}

void write_report(const fs::path& dir, const RunResult& res) {
  auto f = open_out(dir, "ne_report.json");
  f << "{\n"
    << "  \"converged\": " << (res.converged ? "true" : "false") << ",\n"
    << "  \"iterations\": " << res.iterations << ",\n"
    << "  \"is_nash\": " << (res.report.is_nash ? "true" : "false") << ",\n"
    << "  \"tolerance\": " << format_double(res.report.tolerance) << ",\n"
    << "  \"max_residual\": " << format_double(res.report.max_residual()) << ",\n"
    << "  \"residuals\": " << doubles_text(res.report.residuals) << ",\n"
    << "  \"rates\": " << doubles_text(res.report.rates) << "\n"
    << "}\n";
}

void write_trajectory(const fs::path& dir, const RunResult& res) {
  auto rates = open_out(dir, "rates.csv");
  rates << "tick,user,rate_bits\n";
  for (std::size_t n = 0; n < res.rates.size(); ++n) {
    for (std::size_t q = 0; q < res.rates[n].size(); ++q) {
      rates << n << ',' << q << ',' << format_double(res.rates[n][q]) << '\n';
    }
  }
  auto steps = open_out(dir, "residuals.csv");
  steps << "tick,max_step\n";
  for (std::size_t n = 0; n < res.max_step.size(); ++n) {
    steps << n + 1 << ',' << format_double(res.max_step[n]) << '\n';
  }
}

RunResult run_built(const BuiltScenario& b) {
  return run(b.spec, b.schedule, initial_profile(b.init, b.spec), b.options);
}

int finish(const RunResult& res, std::ostream& log) {
  if (res.converged) {
    log << "converged after " << res.iterations << " ticks\n";
    return kExitOk;
  }
  log << "no convergence after " << res.iterations << " ticks (max residual "
      << format_double(res.report.max_residual()) << ")\n";
  return kExitNoConvergence;
}

template <typename F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    log << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace

int cmd_run(const CommonOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const BuiltScenario b = build_scenario(load_with_overrides(opt));
    const RunResult res = run_built(b);
    write_trajectory(opt.out, res);
    write_profile(opt.out, res.profile, b.spec.variant());
    write_report(opt.out, res);
    return finish(res, log);
  });
}

namespace {

void print_uniqueness(std::ostream& out, const std::string& label, const UniquenessReport& u) {
  out << label << (u.heuristic ? " (heuristic)" : "") << '\n';
  out << "  received:  " << (u.received_holds ? "PASS" : "FAIL")
      << " margin=" << format_double(u.received_margin()) << '\n';
  out << "  generated: " << (u.generated_holds ? "PASS" : "FAIL")
      << " margin=" << format_double(u.generated_margin()) << '\n';
}

}  // namespace

int cmd_check_uniqueness(const CommonOptions& opt, std::ostream& out) {
  return guarded(out, [&] {
    const BuiltScenario b = build_scenario(load_with_overrides(opt));
    bool holds = false;
    if (b.spec.is_siso()) {
      const UniquenessReport u = uniqueness_siso(b.spec.scenario(), b.siso_distances);
      print_uniqueness(out, "siso", u);
      holds = u.any_holds();
    } else {
      const UniquenessReport phys = uniqueness_mimo(b.spec.channels());
      print_uniqueness(out, "mimo", phys);
      const UniquenessReport game = uniqueness_for_game(b.spec);
      if (game.heuristic) {
        print_uniqueness(out, "game " + std::string(to_string(b.spec.variant())), game);
      }
      holds = phys.any_holds() || game.any_holds();
    }
    out << (holds ? "PASS" : "FAIL") << '\n';
    return holds ? kExitOk : kExitFailed;
  });
}

std::vector<PsdRow> psd_table(const GameSpec& spec, const StrategyProfile& profile) {
  const SisoScenario& s = spec.scenario();
  const std::vector<RVector> p = siso_powers(profile);
  std::vector<PsdRow> rows;
  for (std::size_t k = 0; k < s.bin_count(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    for (std::size_t q = 0; q < s.user_count(); ++q) {
      double mui = s.noise(q)(kk);
      for (std::size_t r = 0; r < s.user_count(); ++r) {
        if (r != q) mui += std::norm(s.response(r, q)(kk)) * p[r](kk);
      }
      const double direct = std::norm(s.response(q, q)(kk));
      rows.push_back({k, q, p[q](kk), direct > 0.0 ? mui / direct : kInf});
    }
  }
  return rows;
}

int cmd_psd(const CommonOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const BuiltScenario b = build_scenario(load_with_overrides(opt));
    if (!b.spec.is_siso()) throw Error(ErrorKind::BadParams, "psd needs a SISO scenario");
    const RunResult res = run_built(b);
    auto f = open_out(opt.out, "psd.csv");
    f << "bin,user,power,normalized_interference\n";
    for (const PsdRow& r : psd_table(b.spec, res.profile)) {
      f << r.bin << ',' << r.user << ',' << format_double(r.power) << ','
        << format_double(r.normalized_interference) << '\n';
    }
    write_report(opt.out, res);
    return finish(res, log);
  });
}

std::vector<BeamRow> beampattern_table(const StrategyProfile& profile, std::size_t points,
                                       double spacing) {
  if (points < 2) throw Error(ErrorKind::BadParams, "beampattern needs at least 2 angles");
  constexpr double half_pi = std::numbers::pi / 2.0;
  std::vector<BeamRow> rows;
  for (std::size_t q = 0; q < profile.size(); ++q) {
    const HermitianEig eig = hermitian_eig(hermitian_part(profile[q]));
    const double top = eig.values.size() ? std::max(eig.values(0), 0.0) : 0.0;
    // Retained modes in increasing eigenvalue order.
    std::vector<Eigen::Index> modes;
    for (Eigen::Index i = eig.values.size() - 1; i >= 0; --i) {
      if (top > 0.0 && eig.values(i) > kTolRank * top) modes.push_back(i);
    }
    double total_power = 0.0;
    for (auto i : modes) total_power += eig.values(i);
    const Eigen::Index n = profile[q].rows();
    std::vector<double> angles;
    std::vector<CVector> steer;
    for (std::size_t a = 0; a < points; ++a) {
      angles.push_back(-half_pi + static_cast<double>(a) * (2.0 * half_pi) /
                                      static_cast<double>(points - 1));
      steer.push_back(steering_vector(angles.back(), n, spacing));
    }
    std::vector<double> total(points, 0.0);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const double lambda = eig.values(modes[m]);
      for (std::size_t a = 0; a < points; ++a) {
        const double g = std::norm(steer[a].dot(eig.vectors.col(modes[m])));
        total[a] += lambda * g;
        rows.push_back({q, std::to_string(m), lambda, angles[a], g});
      }
    }
    for (std::size_t a = 0; a < points; ++a) {
      rows.push_back({q, "total", total_power, angles[a], total[a]});
    }
  }
  return rows;
}

int cmd_beampattern(const CommonOptions& opt, const BeampatternOptions& bp, std::ostream& log) {
  return guarded(log, [&] {
    const BuiltScenario b = build_scenario(load_with_overrides(opt));
    if (b.spec.is_siso()) throw Error(ErrorKind::BadParams, "beampattern needs a MIMO scenario");
    const RunResult res = run_built(b);
    const auto rows = beampattern_table(res.profile, bp.points, bp.spacing);
    auto f = open_out(opt.out, "beampattern.csv");
    f << "user,mode,eigenvalue,angle_rad,gain\n";
    for (const BeamRow& r : rows) {
      f << r.user << ',' << r.mode << ',' << format_double(r.eigenvalue) << ','
        << format_double(r.angle) << ',' << format_double(r.gain) << '\n';
    }
    write_profile(opt.out, res.profile, b.spec.variant());
    write_report(opt.out, res);
    return finish(res, log);
  });
}

namespace {

Scenario sweep_instance(const Scenario& templ, Eigen::Index antennas, double ratio,
                        std::uint64_t seed) {
  Scenario s = templ;
  auto& rnd = std::get<RandomMimoParams>(s.channels);
  const std::size_t users = s.users.size();
  const double direct = rnd.distances.empty() ? 1.0 : rnd.distances[0][0];
  rnd.seed = seed;
  rnd.antennas.assign(users, antennas);
  rnd.distances.assign(users, std::vector<double>(users, ratio * direct));
  for (std::size_t q = 0; q < users; ++q) rnd.distances[q][q] = direct;
  return s;
}

}  // namespace

SweepResult sweep_distance(const Scenario& templ, const SweepOptions& opt) {
  const auto* rnd = std::get_if<RandomMimoParams>(&templ.channels);
  if (!rnd) throw Error(ErrorKind::BadParams, "sweep-distance needs random MIMO channels");
  if (opt.ratios.empty() || opt.antennas.empty() || opt.seeds == 0) {
    throw Error(ErrorKind::BadParams, "sweep grid is empty");
  }
  for (const auto& u : templ.users) {
    if (u.null && std::holds_alternative<CMatrix>(*u.null)) {
      throw Error(ErrorKind::BadParams, "explicit null matrices cannot follow the antenna sweep");
    }
    if (u.soft && u.soft->shaping) {
      throw Error(ErrorKind::BadParams, "explicit shaping matrices cannot follow the antenna sweep");
    }
  }
  const std::uint64_t base = rnd->seed;

  std::vector<SweepPoint> jobs;
  for (auto a : opt.antennas) {
    for (double d : opt.ratios) {
      for (std::size_t s = 0; s < opt.seeds; ++s) jobs.push_back({a, d, s, 0.0, false, 0});
    }
  }

  // Every job is independent and deterministic; results land in their own slot.
  std::atomic<std::size_t> cursor{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  auto worker = [&] {
    for (std::size_t i = cursor++; i < jobs.size(); i = cursor++) {
      SweepPoint& job = jobs[i];
      try {
        const BuiltScenario b = build_scenario(
            sweep_instance(templ, job.antennas, job.ratio, base + job.seed_index));
        const RunResult res = run_built(b);
        job.sum_rate = sum_rate(res.profile, b.spec.channels());
        job.converged = res.converged;
        job.iterations = res.iterations;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = opt.threads ? opt.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepResult out;
  out.points = jobs;  // already in (antennas, ratio, seed) order
  for (std::size_t i = 0; i < jobs.size(); i += opt.seeds) {
    SweepSummary sum;
    sum.antennas = jobs[i].antennas;
    sum.ratio = jobs[i].ratio;
    sum.samples = opt.seeds;
    for (std::size_t s = 0; s < opt.seeds; ++s) {
      sum.mean += jobs[i + s].sum_rate;
      if (!jobs[i + s].converged) ++sum.nonconverged;
    }
    sum.mean /= static_cast<double>(opt.seeds);
    if (opt.seeds > 1) {
      double var = 0.0;
      for (std::size_t s = 0; s < opt.seeds; ++s) {
        var += std::pow(jobs[i + s].sum_rate - sum.mean, 2);
      }
      var /= static_cast<double>(opt.seeds - 1);
      sum.stderr_mean = std::sqrt(var / static_cast<double>(opt.seeds));
    }
    out.summary.push_back(sum);
  }
  return out;
}

int cmd_sweep_distance(const CommonOptions& opt, const SweepOptions& sweep, std::ostream& log) {
  return guarded(log, [&] {
    const SweepResult res = sweep_distance(load_with_overrides(opt), sweep);
    auto f = open_out(opt.out, "sweep.csv");
    f << "antennas,distance_ratio,mean_sum_rate,stderr,samples,nonconverged\n";
    for (const auto& s : res.summary) {
      f << s.antennas << ',' << format_double(s.ratio) << ',' << format_double(s.mean) << ','
        << format_double(s.stderr_mean) << ',' << s.samples << ',' << s.nonconverged << '\n';
    }
    auto p = open_out(opt.out, "sweep_points.csv");
    p << "antennas,distance_ratio,seed,sum_rate,converged,iterations\n";
    for (const auto& pt : res.points) {
      p << pt.antennas << ',' << format_double(pt.ratio) << ',' << pt.seed_index << ','
        << format_double(pt.sum_rate) << ',' << (pt.converged ? 1 : 0) << ',' << pt.iterations
        << '\n';
    }
    std::size_t bad = 0;
    for (const auto& s : res.summary) bad += s.nonconverged;
    log << res.points.size() << " runs, " << bad << " without convergence\n";
    return kExitOk;
  });
}

}  // namespace cogmimo
