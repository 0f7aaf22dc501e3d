// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <numbers>

#include "cogmimo/error.hpp"
#include "cogmimo/game.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cogmimo;
using testkit::Rng;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::BadParams;
}

// Gauss-Seidel best-response sweeps; independent of the iteration engine.
StrategyProfile sweep_to_fixed_point(const GameSpec& spec, int sweeps = 400) {
  StrategyProfile p;
  for (std::size_t q = 0; q < spec.user_count(); ++q) {
    p.covariances.push_back(CMatrix::Zero(spec.strategy_rows(q), spec.strategy_cols(q)));
  }
  for (int it = 0; it < sweeps; ++it) {
    double step = 0.0;
    for (std::size_t q = 0; q < spec.user_count(); ++q) {
      const CMatrix next = best_response(q, p, spec);
      step = std::max(step, (next - p[q]).norm());
      p[q] = next;
    }
    if (step < 1e-13) break;
  }
  return p;
}

ChannelSet decoupled_channels(Rng& rng, std::size_t users, Eigen::Index n) {
  return testkit::random_channels(rng, users, n, 0.0);
}

ConstraintSpec power_only(std::size_t users, double p) {
  ConstraintSpec cs(users);
  for (auto& uc : cs) uc.power_budget = p;
  return cs;
}

// A feasible random strategy for user q under the variant's own constraints.
CMatrix random_feasible(Rng& rng, std::size_t q, const GameSpec& spec) {
  const UserConstraints& uc = spec.user(q);
  const Eigen::Index n = spec.strategy_rows(q);
  CMatrix map = CMatrix::Identity(n, n);
  if (uc.null_matrix && spec.variant() == Variant::G1) map = testkit::complement_basis(*uc.null_matrix);
  CMatrix y = rng.psd(map.cols(), 0.0, 1.0);
  y *= rng.uniform(0.0, 1.0) * *uc.power_budget / std::max(1e-300, y.trace().real());
  return map * y * map.adjoint();
}

}  // namespace

TEST_CASE("variant names round-trip and unknown names are rejected") {
  for (Variant v : {Variant::G1, Variant::G2, Variant::GAlpha, Variant::GInfinity, Variant::SisoMasked}) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK(kind_of([] { parse_variant("G3"); }) == ErrorKind::BadParams);
}

TEST_CASE("GameSpec construction errors") {
  Rng rng(1);
  ChannelSet ch = testkit::random_channels(rng, 2, 2);
  CHECK(kind_of([&] { GameSpec::mimo(ch, power_only(2, 1.0), Variant::G2); }) ==
        ErrorKind::InvalidConstraint);
  CHECK(kind_of([&] { GameSpec::mimo(ch, power_only(2, 1.0), Variant::GAlpha, -1.0); }) ==
        ErrorKind::BadParams);
  CHECK(kind_of([&] { GameSpec::mimo(ch, power_only(3, 1.0), Variant::G1); }) ==
        ErrorKind::DimensionMismatch);

  const GameSpec siso = testkit::random_siso_game(rng, 2, 4);
  ConstraintSpec with_null = power_only(2, 1.0);
  with_null[0].null_matrix = CMatrix::Ones(4, 1);
  CHECK(kind_of([&] { GameSpec::siso(siso.scenario(), with_null); }) == ErrorKind::InvalidConstraint);
  ConstraintSpec with_soft = power_only(2, 1.0);
  with_soft[1].soft = SoftShaping{CMatrix::Identity(4, 4), 1.0};
  CHECK(kind_of([&] { GameSpec::siso(siso.scenario(), with_soft); }) == ErrorKind::InvalidConstraint);
}

TEST_CASE("single-user G1 best response is the classical waterfill") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = rng.integer(1, 4);
    ChannelSet ch = testkit::random_channels(rng, 1, n);
    const double p = rng.uniform(0.1, 5.0);
    const GameSpec spec = GameSpec::mimo(ch, power_only(1, p), Variant::G1);
    StrategyProfile prof{{CMatrix::Zero(n, n)}};
    const CMatrix br = best_response(0, prof, spec);

    const CMatrix h = ch.direct(0);
    const CMatrix gram = h.adjoint() * ch.noise(0).inverse() * h;
    const testkit::PgaResult oracle = testkit::projected_gradient_ascent(0.5 * (gram + gram.adjoint()), p, INFINITY);
    const double got = testkit::ReducedProblem{gram, CMatrix::Identity(n, n), p}.objective(br);
    CHECK(got >= oracle.objective - 1e-6);
    CHECK(got <= oracle.objective + 1e-4);
    CHECK(std::abs(br.trace().real() - p) <= 1e-10 * p);
  }
}

TEST_CASE("G_alpha with alpha = 0 equals G1 without nulls") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = rng.integer(2, 4);
    ChannelSet ch = testkit::random_channels(rng, 2, n);
    ConstraintSpec cs = power_only(2, rng.uniform(0.5, 3.0));
    const GameSpec plain = GameSpec::mimo(ch, cs, Variant::G1);
    cs[0].null_matrix = rng.complex(n, 1);
    const GameSpec ga = GameSpec::mimo(ch, cs, Variant::GAlpha, 0.0);
    const StrategyProfile prof = testkit::random_profile(rng, plain);
    for (std::size_t q = 0; q < 2; ++q) {
      CHECK(testkit::rel_frobenius(best_response(q, prof, ga), best_response(q, prof, plain)) <= 1e-12);
    }
  }
}

TEST_CASE("best responses are feasible for every variant") {
  Rng rng(4);
  for (Variant v : {Variant::G1, Variant::G2, Variant::GAlpha, Variant::GInfinity}) {
    for (int t = 0; t < 25; ++t) {
      const GameSpec spec = testkit::random_mimo_game(rng, v, rng.integer(1, 3), rng.integer(2, 4));
      const StrategyProfile prof = testkit::random_profile(rng, spec);
      for (std::size_t q = 0; q < spec.user_count(); ++q) {
        const CMatrix br = best_response(q, prof, spec);
        const FeasibilityReport rep = check_strategy(q, br, spec);
        INFO(to_string(v));
        CHECK(rep.all_pass());
      }
    }
  }
  for (int t = 0; t < 25; ++t) {
    const GameSpec spec = testkit::random_siso_game(rng, 3, 16);
    const StrategyProfile prof = testkit::random_profile(rng, spec);
    for (std::size_t q = 0; q < 3; ++q) CHECK(check_strategy(q, best_response(q, prof, spec), spec).all_pass());
  }
}

TEST_CASE("G_inf best response lies in the null space of U") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = rng.integer(2, 4);
    ChannelSet ch = testkit::random_channels(rng, 2, n);
    ConstraintSpec cs = power_only(2, 1.0);
    cs[0].null_matrix = rng.complex(n, rng.integer(1, static_cast<int>(n) - 1));
    const GameSpec spec = GameSpec::mimo(ch, cs, Variant::GInfinity);
    const StrategyProfile prof = testkit::random_profile(rng, spec);
    const CMatrix br = best_response(0, prof, spec);
    CHECK((cs[0].null_matrix->adjoint() * br).norm() <= 1e-10 * std::max(1.0, br.norm()));
  }
}

TEST_CASE("best responses match the projected-gradient oracle for every MIMO variant") {
  Rng rng(6);
  for (Variant v : {Variant::G1, Variant::G2, Variant::GAlpha, Variant::GInfinity}) {
    for (int t = 0; t < 8; ++t) {
      const GameSpec spec = testkit::random_mimo_game(rng, v, 2, rng.integer(2, 3));
      const StrategyProfile prof = testkit::random_profile(rng, spec);
      for (std::size_t q = 0; q < 2; ++q) {
        const testkit::ReducedProblem red = testkit::reduced_problem(q, prof, spec);
        const double got = red.objective(best_response(q, prof, spec));
        const double oracle = red.solve().objective;
        INFO(to_string(v), " got ", got, " oracle ", oracle);
        CHECK(got >= oracle - 1e-6);
        CHECK(got <= oracle + 1e-4);
      }
    }
  }
}

TEST_CASE("variant payoff equals the reduced objective of the strategy") {
  Rng rng(7);
  for (Variant v : {Variant::G1, Variant::G2, Variant::GAlpha, Variant::GInfinity}) {
    const GameSpec spec = testkit::random_mimo_game(rng, v, 2, 3);
    const StrategyProfile prof = testkit::random_profile(rng, spec);
    for (std::size_t q = 0; q < 2; ++q) {
      const CMatrix own = rng.psd(3, 0.0, 1.0);
      INFO(to_string(v));
      CHECK(payoff(q, own, prof, spec) ==
            doctest::Approx(testkit::reduced_problem(q, prof, spec).objective(own)).epsilon(1e-10));
    }
  }
}

TEST_CASE("two-user SISO best response matches a grid search on 4 bins") {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    GameSpec spec = testkit::random_siso_game(rng, 2, 4);
    const StrategyProfile prof = testkit::random_profile(rng, spec);
    for (std::size_t q = 0; q < 2; ++q) {
      const RVector gains = testkit::raw_siso_gains(q, prof, spec);
      const RVector masks = spec.user(q).masks.value_or(RVector());
      const double budget = *spec.user(q).power_budget;
      const RVector p = best_response(q, prof, spec).col(0).real();
      const double got = testkit::scalar_rate(gains, p);
      const double grid = testkit::grid_search_exhaustive(gains, budget, masks);
      CHECK(got >= grid - 1e-12);
      CHECK(got <= grid + testkit::grid_resolution(gains, budget) + 1e-12);
      CHECK(payoff(q, best_response(q, prof, spec), prof, spec) == doctest::Approx(got).epsilon(1e-12));
    }
  }
}

TEST_CASE("is_nash on a decoupled fixed point and on the zero profile") {
  Rng rng(9);
  const GameSpec spec = GameSpec::mimo(decoupled_channels(rng, 2, 3), power_only(2, 1.5), Variant::G1);
  StrategyProfile zero{{CMatrix::Zero(3, 3), CMatrix::Zero(3, 3)}};
  StrategyProfile ne{{best_response(0, zero, spec), best_response(1, zero, spec)}};
  const NEReport good = is_nash(ne, spec);
  CHECK(good.is_nash);
  CHECK(good.max_residual() <= 1e-12);

  const NEReport bad = is_nash(zero, spec);
  CHECK_FALSE(bad.is_nash);
  // Residual is ||Q - T(Q)|| / max(1, ||Q||); with Q = 0 this is ||T||.
  CHECK(bad.residuals[0] == doctest::Approx(ne[0].norm()).epsilon(1e-12));
  CHECK(bad.rates[0] == doctest::Approx(0.0));
  CHECK(good.rates[1] == doctest::Approx(payoff(1, ne[1], ne, spec)).epsilon(1e-14));
}

TEST_CASE("no feasible unilateral deviation improves a G1 equilibrium") {
  Rng rng(10);
  for (int t = 0; t < 5; ++t) {
    ChannelSet ch = testkit::random_channels(rng, 2, 3, 0.2);
    ConstraintSpec cs = power_only(2, 1.0);
    cs[1].null_matrix = rng.complex(3, 1);
    const GameSpec spec = GameSpec::mimo(ch, cs, Variant::G1);
    const StrategyProfile ne = sweep_to_fixed_point(spec);
    REQUIRE(is_nash(ne, spec).is_nash);
    for (std::size_t q = 0; q < 2; ++q) {
      const double base = payoff(q, ne[q], ne, spec);
      double worst_gain = -INFINITY;
      for (int d = 0; d < 100; ++d) {
        const CMatrix dev = random_feasible(rng, q, spec);
        REQUIRE(check_strategy(q, dev, spec).all_pass());
        worst_gain = std::max(worst_gain, payoff(q, dev, ne, spec) - base);
      }
      CHECK(worst_gain <= 1e-6);
    }
  }
}

TEST_CASE("uniqueness_mimo examples") {
  Rng rng(11);
  const ChannelSet zero = decoupled_channels(rng, 3, 2);
  const UniquenessReport z = uniqueness_mimo(zero);
  CHECK(z.received_holds);
  CHECK(z.generated_holds);
  CHECK(z.received_margin() == doctest::Approx(1.0));

  // H_rq = H_qq for two users makes each term exactly 1.
  const CMatrix h = rng.well_conditioned(2);
  ChannelSet same({{h, h}, {h, h}}, {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)});
  const UniquenessReport s = uniqueness_mimo(same);
  CHECK(s.terms[0][1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(s.received_holds);
  CHECK_FALSE(s.generated_holds);

  // Terms scale with |c|^2 when every cross channel is multiplied by c.
  for (int t = 0; t < 10; ++t) {
    const ChannelSet ch = testkit::random_channels(rng, 3, 3);
    const Complex c(rng.normal(), rng.normal());
    const UniquenessReport a = uniqueness_mimo(ch);
    const UniquenessReport b = uniqueness_mimo(ch.with_scaled_cross(c));
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t q = 0; q < 3; ++q) {
        CHECK(b.terms[r][q] == doctest::Approx(std::norm(c) * a.terms[r][q]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("uniqueness_mimo terms match a direct spectral-radius computation") {
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    const ChannelSet ch = testkit::random_channels(rng, 3, 3);
    const UniquenessReport rep = uniqueness_mimo(ch);
    std::vector<double> recv(3, 0.0), gen(3, 0.0);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t q = 0; q < 3; ++q) {
        if (r == q) continue;
        const CMatrix x = ch.direct(q).inverse() * ch.link(r, q);
        const double rho = Eigen::JacobiSVD<CMatrix>(x).singularValues()(0);
        CHECK(rep.terms[r][q] == doctest::Approx(rho * rho).epsilon(1e-10));
        recv[q] += rho * rho;
        gen[r] += rho * rho;
      }
    }
    for (std::size_t q = 0; q < 3; ++q) {
      CHECK(rep.received_lhs[q] == doctest::Approx(recv[q]).epsilon(1e-10));
      CHECK(rep.generated_lhs[q] == doctest::Approx(gen[q]).epsilon(1e-10));
    }
    CHECK(rep.received_holds == (*std::max_element(recv.begin(), recv.end()) < 1.0));
    CHECK(rep.generated_holds == (*std::max_element(gen.begin(), gen.end()) < 1.0));
  }
}

TEST_CASE("uniqueness_siso examples") {
  Rng rng(13);
  const std::size_t n = 8;
  std::vector<std::vector<CVector>> resp(2, std::vector<CVector>(2));
  resp[0][0] = rng.complex(n, 1);
  resp[1][1] = rng.complex(n, 1);
  resp[0][1] = CVector::Zero(n);
  resp[1][0] = CVector::Zero(n);
  std::vector<RVector> noise(2, RVector::Ones(n));
  const UniquenessReport z = uniqueness_siso(SisoScenario(n, resp, noise));
  CHECK(z.received_margin() == doctest::Approx(1.0));
  CHECK(z.any_holds());

  resp[0][1] = resp[1][1];
  resp[1][0] = resp[0][0];
  const UniquenessReport same = uniqueness_siso(SisoScenario(n, resp, noise));
  CHECK(same.received_lhs[0] == doctest::Approx(1.0));
  CHECK_FALSE(same.any_holds());

  const std::vector<std::vector<double>> d{{1.0, 2.0}, {3.0, 1.5}};
  const UniquenessReport far = uniqueness_siso(SisoScenario(n, resp, noise), d);
  CHECK(far.terms[1][0] == doctest::Approx(1.0 / 9.0));
  CHECK(far.terms[0][1] == doctest::Approx(1.5 * 1.5 / 4.0));
  CHECK(kind_of([&] { uniqueness_siso(SisoScenario(n, resp, noise), std::vector<std::vector<double>>{{1.0}}); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("uniqueness_siso matches a direct recomputation") {
  Rng rng(14);
  for (int t = 0; t < 10; ++t) {
    const GameSpec spec = testkit::random_siso_game(rng, 4, 32);
    const SisoScenario& s = spec.scenario();
    const UniquenessReport rep = uniqueness_siso(s);
    for (std::size_t q = 0; q < 4; ++q) {
      double lhs = 0.0;
      for (std::size_t r = 0; r < 4; ++r) {
        if (r == q) continue;
        double worst = 0.0;
        for (Eigen::Index k = 0; k < 32; ++k) {
          worst = std::max(worst, std::norm(s.response(r, q)(k)) / std::norm(s.response(q, q)(k)));
        }
        lhs += worst;
      }
      CHECK(rep.received_lhs[q] == doctest::Approx(lhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniqueness_for_game flags modified channels as heuristic") {
  Rng rng(15);
  const ChannelSet ch = testkit::random_channels(rng, 2, 3);
  ConstraintSpec cs = power_only(2, 1.0);
  const UniquenessReport plain = uniqueness_for_game(GameSpec::mimo(ch, cs, Variant::G1));
  CHECK_FALSE(plain.heuristic);
  CHECK(plain.terms == uniqueness_mimo(ch).terms);
  cs[0].null_matrix = rng.complex(3, 1);
  CHECK(uniqueness_for_game(GameSpec::mimo(ch, cs, Variant::G1)).heuristic);
  CHECK_FALSE(uniqueness_for_game(GameSpec::mimo(ch, cs, Variant::GAlpha, 5.0)).heuristic);
}

TEST_CASE("virtual noise drives G_alpha equilibria toward the null-constrained limit") {
  Rng rng(16);
  // Weak cross channels keep the uniqueness margin well above zero.
  ChannelSet ch = testkit::random_channels(rng, 2, 2, 0.15);
  ConstraintSpec cs = power_only(2, 1.0);
  cs[0].null_matrix = rng.complex(2, 1);
  cs[1].null_matrix = rng.complex(2, 1);
  const auto solver = [](const GameSpec& g) { return sweep_to_fixed_point(g, 2000); };
  const std::vector<double> alphas{1.0, 10.0, 1e3, 1e6};
  const LimitCheckReport rep = virtual_noise_limit_check(ch, cs, alphas, solver);
  REQUIRE(rep.uniqueness_gate);
  REQUIRE(rep.points.size() == alphas.size());
  CHECK(rep.limit_null_residual <= 1e-10);
  CHECK(rep.points.back().null_residual <= 1e-3);
  CHECK(rep.points.back().null_residual < rep.points[1].null_residual);
  CHECK(rep.points.back().distance_to_limit < rep.points.front().distance_to_limit);
  for (const auto& pt : rep.points) CHECK(pt.alpha >= 0.0);
}

TEST_CASE("siso_powers and siso_profile are inverse") {
  std::vector<RVector> p{RVector::LinSpaced(5, 0.0, 1.0), RVector::Constant(5, 0.25)};
  CHECK(siso_powers(siso_profile(p)) == p);
}
