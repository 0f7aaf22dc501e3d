// SPDX-License-Identifier: Apache-2.0
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cogmimo/error.hpp"
#include "cogmimo/game.hpp"
#include "cogmimo/iwfa.hpp"
#include "cogmimo/scenario.hpp"

namespace py = pybind11;
using namespace cogmimo;

namespace {

py::dict waterfill_dict(const WaterfillResult& r) {
  py::dict d;
  d["covariance"] = r.covariance;
  d["powers"] = r.powers;
  d["water_level"] = r.water_level;
  d["eigenvalues"] = r.eigenvalues;
  d["all_capped"] = r.all_capped;
  return d;
}

py::dict uniqueness_dict(const UniquenessReport& r) {
  py::dict d;
  d["terms"] = r.terms;
  d["received_lhs"] = r.received_lhs;
  d["generated_lhs"] = r.generated_lhs;
  d["received_holds"] = r.received_holds;
  d["generated_holds"] = r.generated_holds;
  d["received_margin"] = r.received_margin();
  d["generated_margin"] = r.generated_margin();
  d["heuristic"] = r.heuristic;
  return d;
}

ChannelSet make_channels(const std::vector<std::vector<CMatrix>>& links, const std::vector<CMatrix>& noise) {
  return ChannelSet(links, noise);
}

// Scenario-built game with its schedule and run settings.
class Game {
 public:
  explicit Game(const std::string& json_text) : built_(build_scenario(parse_scenario_text(json_text))) {}

  const GameSpec& spec() const { return built_.spec; }

  StrategyProfile to_profile(const std::vector<CMatrix>& xs) const {
    StrategyProfile p{xs};
    require_profile_shape(p, spec());
    return p;
  }

  py::list from_profile(const StrategyProfile& p) const {
    py::list out;
    for (const CMatrix& m : p.covariances) {
      if (spec().is_siso()) {
        out.append(RVector(m.col(0).real()));
      } else {
        out.append(m);
      }
    }
    return out;
  }

  py::object best_response(std::size_t q, const std::vector<CMatrix>& profile) const {
    const CMatrix br = cogmimo::best_response(q, to_profile(profile), spec());
    if (spec().is_siso()) return py::cast(RVector(br.col(0).real()));
    return py::cast(br);
  }

  std::vector<double> payoffs(const std::vector<CMatrix>& profile) const {
    return cogmimo::payoffs(to_profile(profile), spec());
  }

  py::dict is_nash(const std::vector<CMatrix>& profile, double tol) const {
    const NEReport r = cogmimo::is_nash(to_profile(profile), spec(), tol);
    py::dict d;
    d["is_nash"] = r.is_nash;
    d["residuals"] = r.residuals;
    d["rates"] = r.rates;
    d["max_residual"] = r.max_residual();
    return d;
  }

  py::dict solve(std::optional<std::size_t> max_iter, std::optional<double> tol) const {
    RunOptions opts = built_.options;
    if (max_iter) opts.max_iter = *max_iter;
    if (tol) opts.tol = *tol;
    RunResult r;
    {
      py::gil_scoped_release release;
      r = run(spec(), built_.schedule, initial_profile(built_.init, spec()), opts);
    }
    py::dict d;
    d["profile"] = from_profile(r.profile);
    d["converged"] = r.converged;
    d["iterations"] = r.iterations;
    d["rates"] = r.rates;
    d["max_step"] = r.max_step;
    d["max_residual"] = r.report.max_residual();
    return d;
  }

  py::dict uniqueness() const {
    if (spec().is_siso()) return uniqueness_dict(uniqueness_siso(spec().scenario(), built_.siso_distances));
    return uniqueness_dict(uniqueness_for_game(spec()));
  }

 private:
  BuiltScenario built_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Iterative waterfilling games for MIMO cognitive radio";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error.ptr())(py::str(e.what()));
      inst.attr("kind") = py::str(std::string(to_string(e.kind())));
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  m.def("water_level", &water_level, py::arg("eigenvalues"), py::arg("budget"), py::arg("caps") = RVector(),
        "Water level mu with sum clip(mu - 1/lambda, 0, cap) = budget.");
  m.def("waterfill_powers", &waterfill_powers, py::arg("eigenvalues"), py::arg("mu"), py::arg("caps") = RVector());
  m.def("mimo_waterfill", [](const CMatrix& gram, double budget) { return waterfill_dict(mimo_waterfill(gram, budget)); },
        py::arg("gram"), py::arg("budget"));
  m.def("capped_mimo_waterfill",
        [](const CMatrix& gram, double budget, double cap) { return waterfill_dict(capped_mimo_waterfill(gram, budget, cap)); },
        py::arg("gram"), py::arg("budget"), py::arg("cap"));
  m.def("gap_factor", [](double pe) { return gap_factor(Constellation::Qam, pe).value; }, py::arg("error_probability"),
        "SNR gap of QAM at the given symbol error probability.");
  m.def("steering_vector", &steering_vector, py::arg("angle"), py::arg("antennas"), py::arg("spacing") = 0.5);
  m.def("steering_matrix", &steering_matrix, py::arg("angles"), py::arg("antennas"), py::arg("spacing") = 0.5);
  m.def("uniqueness_mimo",
        [](const std::vector<std::vector<CMatrix>>& links, const std::vector<CMatrix>& noise) {
          return uniqueness_dict(uniqueness_mimo(make_channels(links, noise)));
        },
        py::arg("links"), py::arg("noise"), "links[r][q] is the channel from transmitter r to receiver q.");
  m.def("uniqueness_siso",
        [](const std::vector<std::vector<CVector>>& responses, const std::vector<RVector>& noise) {
          const auto bins = responses.empty() || responses[0].empty() ? 0 : responses[0][0].size();
          return uniqueness_dict(uniqueness_siso(SisoScenario(static_cast<std::size_t>(bins), responses, noise)));
        },
        py::arg("responses"), py::arg("noise"));

  py::class_<Game>(m, "Game")
      .def(py::init<const std::string&>(), py::arg("scenario_json"))
      .def_property_readonly("variant", [](const Game& g) { return std::string(to_string(g.spec().variant())); })
      .def_property_readonly("user_count", [](const Game& g) { return g.spec().user_count(); })
      .def("best_response", &Game::best_response, py::arg("user"), py::arg("profile"))
      .def("payoffs", &Game::payoffs, py::arg("profile"))
      .def("is_nash", &Game::is_nash, py::arg("profile"), py::arg("tol") = kDefaultNashTol)
      .def("solve", &Game::solve, py::arg("max_iter") = py::none(), py::arg("tol") = py::none())
      .def("uniqueness", &Game::uniqueness);
}
