// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cogmimo/error.hpp"
#include "cogmimo/scenario.hpp"

using namespace cogmimo;

namespace {

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an error");
  return Error(ErrorKind::BadParams, "");
}

const char* kExplicit = R"({
  "channels": {"explicit": {
    "links": [[ [[1, 0.2], [{"re": 0.1, "im": -0.3}, 0.9]],  [[0.1, 0], [0, 0.1]] ],
              [ [[0.05, 0], [0, 0.2]],  [[1.1, {"re": 0, "im": 0.4}], [0, 0.8]] ]],
    "noise": [ [[1, 0], [0, 1]], [[0.5, 0], [0, 0.5]] ]
  }},
  "constraints": [
    {"power": 1.5, "null": {"matrix": [[1], [{"re": 0, "im": 1}]]}},
    {"power": 2.0, "null": {"steering": {"angles": [0.3]}}}
  ],
  "game": {"variant": "G1"},
  "schedule": {"kind": "randomized", "p_update": 0.4, "max_delay": 3, "seed": 17},
  "run": {"max_iter": 250, "tol": 1e-9, "init": "uniform_projected"}
})";

const char* kRandomG2 = R"({
  "channels": {"random": {"seed": 5, "antennas": [3, 3], "distances": [[1, 2], [2, 1]], "pathloss": 1.5}},
  "constraints": [
    {"soft": {"p_ave": 1.0}, "peak": 0.6},
    {"soft": {"shaping": [[1, 0, 0.5], [0, 1, 0], [0, 0, 1]], "p_ave": 2.0}, "null": {"matrix": [[1], [0], [0]]}}
  ],
  "game": {"variant": "G2"}
})";

const char* kRandomAlpha = R"({
  "channels": {"random": {"seed": 9, "antennas": [2, 2]}},
  "constraints": [{"power": 1, "null": {"matrix": [[1], [1]]}}, {"power": 1}],
  "game": {"variant": "G_alpha", "alpha": 12.5},
  "schedule": {"kind": "sequential"}
})";

const char* kSiso = R"({
  "channels": {"siso": {"bins": 32,
    "bands": [{"label": "A", "begin": 4, "end": 12}, {"label": "B", "begin": 12, "end": 20}],
    "random": {"seed": 3, "users": 2, "taps": 4}}},
  "constraints": [
    {"power": 1.0, "masks": {"bands": {"A": 0, "B": 0.01}}, "gap": {"qam_error_probability": 1e-6}},
    {"power": 2.0, "masks": {"bands": {"A": 0}}, "gap": 2.0}
  ],
  "game": {"variant": "SISO_masked"}
})";

const char* kSisoExplicit = R"({
  "channels": {"siso": {"bins": 2,
    "responses": [[[1, {"re": 0.5, "im": 0.5}], [0.1, 0.1]], [[0.2, 0.0], [0.7, 1.3]]],
    "noise": [1.0, [0.5, 0.25]],
    "distances": [[1, 2], [2, 1]]}},
  "constraints": [{"power": 1.0, "masks": [null, 0.4]}, {"power": 1.0}],
  "game": {"variant": "SISO_masked"}
})";

void check_same_build(const BuiltScenario& a, const BuiltScenario& b) {
  CHECK(a.spec.variant() == b.spec.variant());
  CHECK(a.spec.alpha() == b.spec.alpha());
  CHECK(a.spec.constraints() == b.spec.constraints());
  if (a.spec.is_siso()) {
    CHECK(a.spec.scenario() == b.spec.scenario());
  } else {
    CHECK(a.spec.channels() == b.spec.channels());
  }
  CHECK(a.schedule.kind() == b.schedule.kind());
  CHECK(a.schedule.seed() == b.schedule.seed());
  CHECK(a.schedule.params().max_delay == b.schedule.params().max_delay);
  CHECK(a.schedule.params().update_probability == b.schedule.params().update_probability);
  CHECK(a.options.max_iter == b.options.max_iter);
  CHECK(a.options.tol == b.options.tol);
  CHECK(a.init == b.init);
  CHECK(a.siso_distances == b.siso_distances);
}

}  // namespace

TEST_CASE("parse, serialize and parse again builds an identical game") {
  for (const char* text : {kExplicit, kRandomG2, kRandomAlpha, kSiso, kSisoExplicit}) {
    const Scenario first = parse_scenario_text(text);
    const std::string dumped = serialize_scenario(first);
    const Scenario second = parse_scenario_text(dumped);
    CHECK(serialize_scenario(second) == dumped);
    check_same_build(build_scenario(first), build_scenario(second));
  }
}

TEST_CASE("explicit channels and constraints are read literally") {
  const BuiltScenario b = build_scenario(parse_scenario_text(kExplicit));
  const ChannelSet& ch = b.spec.channels();
  CHECK(ch.link(0, 0)(1, 0) == Complex(0.1, -0.3));
  CHECK(ch.link(1, 1)(0, 1) == Complex(0.0, 0.4));
  CHECK(ch.noise(1)(0, 0) == Complex(0.5, 0.0));
  CHECK(*b.spec.user(0).power_budget == 1.5);
  CHECK((*b.spec.user(0).null_matrix)(1, 0) == Complex(0.0, 1.0));
  // Steering null: a(phi)_k = exp(-j 2 pi d k sin phi) with d = 0.5.
  const CMatrix& u = *b.spec.user(1).null_matrix;
  REQUIRE(u.rows() == 2);
  REQUIRE(u.cols() == 1);
  CHECK(std::abs(u(1, 0) / u(0, 0) - std::polar(1.0, -std::numbers::pi * std::sin(0.3))) <= 1e-14);
  CHECK(b.schedule.kind() == ScheduleKind::Randomized);
  CHECK(b.schedule.max_delay() == 3);
  CHECK(b.options.max_iter == 250);
  CHECK(b.init == InitPreset::UniformProjected);
}

TEST_CASE("defaults are filled for omitted sections") {
  const BuiltScenario b = build_scenario(parse_scenario_text(kRandomG2));
  CHECK(b.schedule.kind() == ScheduleKind::Simultaneous);
  CHECK(b.options.max_iter == 1000);
  CHECK(b.options.tol == 1e-8);
  CHECK(b.init == InitPreset::Zero);
  CHECK(b.spec.user(0).soft->shaping == CMatrix::Identity(3, 3));
  CHECK(*b.spec.user(0).peak == 0.6);
}

TEST_CASE("band masks and QAM gap resolve to per-bin values") {
  const BuiltScenario b = build_scenario(parse_scenario_text(kSiso));
  const RVector& m = *b.spec.user(0).masks;
  REQUIRE(m.size() == 32);
  for (Eigen::Index k = 0; k < 32; ++k) {
    const double expected = k >= 4 && k < 12 ? 0.0 : (k >= 12 && k < 20 ? 0.01 : INFINITY);
    CHECK(m(k) == expected);
  }
  CHECK(std::isinf((*b.spec.user(1).masks)(15)));
  // Gap for QAM: (Q^{-1}(Pe / 4))^2 / 3.
  const double pe = 1e-6;
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > pe / 4 ? lo : hi) = mid;
  }
  CHECK(b.spec.gap(0) == doctest::Approx(hi * hi / 3.0).epsilon(1e-10));
  CHECK(b.spec.gap(1) == 2.0);
}

TEST_CASE("explicit SISO scenario with scalar or per-bin noise") {
  const BuiltScenario b = build_scenario(parse_scenario_text(kSisoExplicit));
  const SisoScenario& s = b.spec.scenario();
  CHECK(s.response(0, 0)(1) == Complex(0.5, 0.5));
  CHECK(s.noise(0) == RVector::Ones(2));
  CHECK(s.noise(1)(1) == 0.25);
  CHECK(std::isinf((*b.spec.user(0).masks)(0)));
  REQUIRE(b.siso_distances);
  CHECK((*b.siso_distances)[0][1] == 2.0);
}

TEST_CASE("seed override replaces both the schedule and channel seeds") {
  Scenario s = parse_scenario_text(kRandomAlpha);
  const BuiltScenario before = build_scenario(s);
  override_seed(s, 4242);
  const BuiltScenario after = build_scenario(s);
  CHECK(after.schedule.seed() == 4242);
  CHECK_FALSE(after.spec.channels() == before.spec.channels());
  CHECK(std::get<RandomMimoParams>(s.channels).seed == 4242);
}

TEST_CASE("unknown keys are rejected with their path") {
  const Error top = error_of([] { parse_scenario_text(R"({"channels": {"random": {"seed": 1, "antennas": [1]}}, "constraints": [{"power": 1}], "extra": 1})"); });
  CHECK(top.kind() == ErrorKind::ParseError);
  CHECK(std::string(top.what()).find("extra") != std::string::npos);

  const Error nested = error_of([] {
    parse_scenario_text(R"({"channels": {"random": {"seed": 1, "antennas": [1]}}, "constraints": [{"power": 1, "pwr": 2}]})");
  });
  CHECK(nested.kind() == ErrorKind::ParseError);
  CHECK(std::string(nested.what()).find("constraints[0]") != std::string::npos);
  CHECK(std::string(nested.what()).find("pwr") != std::string::npos);
}

TEST_CASE("malformed documents are parse errors") {
  const char* bad[] = {
      "{not json",
      R"({"constraints": [{"power": 1}]})",
      R"({"channels": {"random": {"seed": 1, "antennas": [1]}, "explicit": {"links": [], "noise": []}}, "constraints": []})",
      R"({"channels": {"random": {"seed": 1, "antennas": [1]}}, "constraints": [{"power": "high"}]})",
      R"({"channels": {"random": {"seed": 1, "antennas": [1]}}, "constraints": [{"power": 1}], "game": {"variant": "G9"}})",
      R"({"channels": {"random": {"seed": 1, "antennas": [1]}}, "constraints": [{"power": 1}], "schedule": {"kind": "sometimes"}})",
      R"({"channels": {"random": {"seed": 1, "antennas": [1]}}, "constraints": [{"power": 1}], "run": {"max_iter": -3}})",
      R"({"channels": {"explicit": {"links": [[[[1, 2], [3]]]], "noise": [[[1]]]}}, "constraints": [{"power": 1}]})",
  };
  for (const char* text : bad) {
    INFO(text);
    CHECK(error_of([&] { parse_scenario_text(text); }).kind() == ErrorKind::ParseError);
  }
}

TEST_CASE("semantic errors surface at build time with library kinds") {
  // Two users of constraints for one user of channels.
  CHECK(error_of([] {
          build_scenario(parse_scenario_text(
              R"({"channels": {"random": {"seed": 1, "antennas": [2]}}, "constraints": [{"power": 1}, {"power": 1}]})"));
        }).kind() == ErrorKind::BadParams);
  // Band label that does not exist.
  CHECK(error_of([] {
          build_scenario(parse_scenario_text(
              R"({"channels": {"siso": {"bins": 8, "bands": [{"label": "A", "begin": 0, "end": 2}],
                  "random": {"seed": 1, "users": 1}}},
                  "constraints": [{"power": 1, "masks": {"bands": {"Z": 0}}}],
                  "game": {"variant": "SISO_masked"}})"));
        }).kind() == ErrorKind::BadParams);
  // SISO channels need the SISO variant.
  CHECK(error_of([] {
          build_scenario(parse_scenario_text(
              R"({"channels": {"siso": {"bins": 8, "random": {"seed": 1, "users": 1}}},
                  "constraints": [{"power": 1}], "game": {"variant": "G1"}})"));
        }).kind() == ErrorKind::BadParams);
  // Negative budget.
  CHECK(error_of([] {
          build_scenario(parse_scenario_text(
              R"({"channels": {"random": {"seed": 1, "antennas": [2]}}, "constraints": [{"power": -1}]})"));
        }).kind() == ErrorKind::InvalidConstraint);
}

TEST_CASE("format_double keeps 17 significant digits and spells non-finite values") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(NAN) == "nan");
}
