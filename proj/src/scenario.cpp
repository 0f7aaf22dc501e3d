// SPDX-License-Identifier: Apache-2.0
#include "cogmimo/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cogmimo/error.hpp"

namespace cogmimo {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ParseError, (path.empty() ? "<root>" : path) + ": " + what);
}

// Object view that remembers which keys were read so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    if (!j_.contains(key)) fail(path_, "missing key '" + key + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  const json* get(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  std::string child(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) fail(path_, "unknown key '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) fail(path, "expected an integer >= 0");
  return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

Complex as_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  ObjectReader r(j, path);
  const double re = as_number(r.at("re"), r.child("re"));
  const double im = as_number(r.at("im"), r.child("im"));
  r.finish();
  return {re, im};
}

CMatrix as_matrix(const json& j, const std::string& path) {
  as_array(j, path);
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) fail(path, "matrix needs at least one row");
  const auto cols = static_cast<Eigen::Index>(as_array(j[0], path + "[0]").size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    const json& row = as_array(j[i], rp);
    if (static_cast<Eigen::Index>(row.size()) != cols) fail(rp, "ragged matrix row");
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = as_complex(row[k], rp + "[" + std::to_string(k) + "]");
    }
  }
  return m;
}

CVector as_cvector(const json& j, const std::string& path) {
  as_array(j, path);
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_complex(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

std::vector<double> as_doubles(const json& j, const std::string& path, bool null_is_inf = false) {
  as_array(j, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (null_is_inf && j[i].is_null()) {
      out.push_back(kInf);
    } else {
      out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    }
  }
  return out;
}

std::vector<std::vector<double>> as_grid(const json& j, const std::string& path) {
  as_array(j, path);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_doubles(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <typename T>
std::vector<std::vector<T>> as_square_grid(const json& j, const std::string& path,
                                           T (*item)(const json&, const std::string&)) {
  as_array(j, path);
  std::vector<std::vector<T>> out;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    as_array(j[r], rp);
    if (j[r].size() != j.size()) fail(rp, "grid must be square");
    std::vector<T> row;
    for (std::size_t q = 0; q < j[r].size(); ++q) {
      row.push_back(item(j[r][q], rp + "[" + std::to_string(q) + "]"));
    }
    out.push_back(std::move(row));
  }
  return out;
}

ExplicitChannels parse_explicit(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ExplicitChannels out;
  out.links = as_square_grid<CMatrix>(r.at("links"), r.child("links"), as_matrix);
  const json& noise = as_array(r.at("noise"), r.child("noise"));
  for (std::size_t q = 0; q < noise.size(); ++q) {
    out.noise.push_back(as_matrix(noise[q], r.child("noise") + "[" + std::to_string(q) + "]"));
  }
  if (const json* d = r.get("distances")) out.distances = as_grid(*d, r.child("distances"));
  r.finish();
  return out;
}

RandomMimoParams parse_random_mimo(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  RandomMimoParams p;
  p.seed = as_uint(r.at("seed"), r.child("seed"));
  for (double a : as_doubles(r.at("antennas"), r.child("antennas"))) {
    if (a < 1 || a != std::floor(a)) fail(r.child("antennas"), "antenna counts must be integers >= 1");
    p.antennas.push_back(static_cast<Eigen::Index>(a));
  }
  if (const json* d = r.get("distances")) p.distances = as_grid(*d, r.child("distances"));
  if (const json* g = r.get("pathloss")) p.pathloss = as_number(*g, r.child("pathloss"));
  if (const json* n = r.get("noise_power")) p.noise_power = as_number(*n, r.child("noise_power"));
  r.finish();
  return p;
}

std::vector<Band> parse_bands(const json& j, const std::string& path) {
  as_array(j, path);
  std::vector<Band> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    ObjectReader r(j[i], path + "[" + std::to_string(i) + "]");
    Band b;
    b.label = as_string(r.at("label"), r.child("label"));
    b.begin = as_uint(r.at("begin"), r.child("begin"));
    b.end = as_uint(r.at("end"), r.child("end"));
    r.finish();
    out.push_back(std::move(b));
  }
  return out;
}

SisoChannels parse_siso(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SisoChannels out;
  out.bins = as_uint(r.at("bins"), r.child("bins"));
  if (const json* b = r.get("bands")) out.bands = parse_bands(*b, r.child("bands"));
  if (const json* d = r.get("distances")) out.distances = as_grid(*d, r.child("distances"));
  const json* resp = r.get("responses");
  const json* rnd = r.get("random");
  if ((resp == nullptr) == (rnd == nullptr)) {
    fail(path, "exactly one of 'responses' or 'random' is required");
  }
  if (resp) {
    out.responses = as_square_grid<CVector>(*resp, r.child("responses"), as_cvector);
    const json& noise = r.at("noise");
    const std::string np = r.child("noise");
    const std::size_t users = out.responses->size();
    const auto n = static_cast<Eigen::Index>(out.bins);
    if (noise.is_number()) {
      out.noise.assign(users, RVector::Constant(n, noise.get<double>()));
    } else {
      as_array(noise, np);
      for (std::size_t q = 0; q < noise.size(); ++q) {
        const std::string qp = np + "[" + std::to_string(q) + "]";
        if (noise[q].is_number()) {
          out.noise.push_back(RVector::Constant(n, noise[q].get<double>()));
        } else {
          const auto v = as_doubles(noise[q], qp);
          out.noise.push_back(Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size())));
        }
      }
    }
  } else {
    ObjectReader rr(*rnd, r.child("random"));
    RandomSisoParams p;
    p.seed = as_uint(rr.at("seed"), rr.child("seed"));
    p.users = as_uint(rr.at("users"), rr.child("users"));
    if (const json* t = rr.get("taps")) p.taps = as_uint(*t, rr.child("taps"));
    if (const json* d = rr.get("distances")) p.distances = as_grid(*d, rr.child("distances"));
    if (const json* g = rr.get("pathloss")) p.pathloss = as_number(*g, rr.child("pathloss"));
    if (const json* n = rr.get("noise_power")) p.noise_power = as_number(*n, rr.child("noise_power"));
    rr.finish();
    p.bins = out.bins;
    p.bands = out.bands;
    out.random = std::move(p);
  }
  r.finish();
  return out;
}

ChannelSource parse_channels(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  std::optional<ChannelSource> out;
  auto set = [&](ChannelSource src) {
    if (out) fail(path, "exactly one channel source is allowed");
    out = std::move(src);
  };
  if (const json* e = r.get("explicit")) set(parse_explicit(*e, r.child("explicit")));
  if (const json* e = r.get("random")) set(parse_random_mimo(*e, r.child("random")));
  if (const json* e = r.get("siso")) set(parse_siso(*e, r.child("siso")));
  r.finish();
  if (!out) fail(path, "one of 'explicit', 'random' or 'siso' is required");
  return *out;
}

UserSection parse_user(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  UserSection u;
  if (const json* p = r.get("power")) u.power = as_number(*p, r.child("power"));
  if (const json* n = r.get("null")) {
    ObjectReader nr(*n, r.child("null"));
    if (const json* m = nr.get("matrix")) {
      u.null = as_matrix(*m, nr.child("matrix"));
    } else if (const json* s = nr.get("steering")) {
      ObjectReader sr(*s, nr.child("steering"));
      SteeringNulls sn;
      sn.angles = as_doubles(sr.at("angles"), sr.child("angles"));
      if (const json* d = sr.get("spacing")) sn.spacing = as_number(*d, sr.child("spacing"));
      sr.finish();
      u.null = sn;
    } else {
      fail(r.child("null"), "expected 'matrix' or 'steering'");
    }
    nr.finish();
  }
  if (const json* s = r.get("soft")) {
    ObjectReader sr(*s, r.child("soft"));
    SoftSource soft;
    if (const json* g = sr.get("shaping")) soft.shaping = as_matrix(*g, sr.child("shaping"));
    soft.average_limit = as_number(sr.at("p_ave"), sr.child("p_ave"));
    sr.finish();
    u.soft = soft;
  }
  if (const json* p = r.get("peak")) u.peak = as_number(*p, r.child("peak"));
  if (const json* m = r.get("masks")) {
    if (m->is_array()) {
      u.masks = as_doubles(*m, r.child("masks"), true);
    } else {
      ObjectReader mr(*m, r.child("masks"));
      const json& bands = mr.at("bands");
      if (!bands.is_object()) fail(mr.child("bands"), "expected an object of label: level");
      BandMasks bm;
      for (const auto& [label, level] : bands.items()) {
        bm.levels[label] = as_number(level, mr.child("bands") + "." + label);
      }
      mr.finish();
      u.masks = bm;
    }
  }
  if (const json* g = r.get("gap")) {
    if (g->is_number()) {
      u.gap = g->get<double>();
    } else {
      ObjectReader gr(*g, r.child("gap"));
      u.gap = QamGap{as_number(gr.at("qam_error_probability"), gr.child("qam_error_probability"))};
      gr.finish();
    }
  }
  r.finish();
  return u;
}

template <typename F>
auto wrap_enum(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  ObjectReader root(doc, "");
  Scenario s;
  s.channels = parse_channels(root.at("channels"), "channels");
  const json& users = as_array(root.at("constraints"), "constraints");
  for (std::size_t q = 0; q < users.size(); ++q) {
    s.users.push_back(parse_user(users[q], "constraints[" + std::to_string(q) + "]"));
  }
  if (const json* g = root.get("game")) {
    ObjectReader r(*g, "game");
    const std::string name = as_string(r.at("variant"), r.child("variant"));
    s.game.variant = wrap_enum(r.child("variant"), [&] { return parse_variant(name); });
    if (const json* a = r.get("alpha")) s.game.alpha = as_number(*a, r.child("alpha"));
    r.finish();
  }
  if (const json* g = root.get("schedule")) {
    ObjectReader r(*g, "schedule");
    const std::string kind = as_string(r.at("kind"), r.child("kind"));
    s.schedule.kind = wrap_enum(r.child("kind"), [&] { return parse_schedule_kind(kind); });
    if (const json* p = r.get("p_update")) {
      s.schedule.update_probability = as_number(*p, r.child("p_update"));
    }
    if (const json* d = r.get("max_delay")) s.schedule.max_delay = as_uint(*d, r.child("max_delay"));
    if (const json* d = r.get("seed")) s.schedule.seed = as_uint(*d, r.child("seed"));
    r.finish();
  }
  if (const json* g = root.get("run")) {
    ObjectReader r(*g, "run");
    if (const json* m = r.get("max_iter")) s.run.max_iter = as_uint(*m, r.child("max_iter"));
    if (const json* t = r.get("tol")) s.run.tol = as_number(*t, r.child("tol"));
    if (const json* i = r.get("init")) {
      const std::string name = as_string(*i, r.child("init"));
      s.run.init = wrap_enum(r.child("init"), [&] { return parse_init_preset(name); });
    }
    r.finish();
  }
  root.finish();
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

namespace {

json complex_json(Complex c) {
  if (c.imag() == 0.0) return c.real();
  return json{{"re", c.real()}, {"im", c.imag()}};
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

json doubles_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) {
    if (std::isinf(x)) {
      out.push_back(nullptr);
    } else {
      out.push_back(x);
    }
  }
  return out;
}

json grid_json(const std::vector<std::vector<double>>& g) {
  json out = json::array();
  for (const auto& row : g) out.push_back(doubles_json(row));
  return out;
}

json bands_json(const std::vector<Band>& bands) {
  json out = json::array();
  for (const auto& b : bands) out.push_back({{"label", b.label}, {"begin", b.begin}, {"end", b.end}});
  return out;
}

struct ChannelsToJson {
  json operator()(const ExplicitChannels& e) const {
    json links = json::array();
    for (const auto& row : e.links) {
      json jr = json::array();
      for (const auto& m : row) jr.push_back(matrix_json(m));
      links.push_back(std::move(jr));
    }
    json noise = json::array();
    for (const auto& m : e.noise) noise.push_back(matrix_json(m));
    json out{{"links", links}, {"noise", noise}};
    if (e.distances) out["distances"] = grid_json(*e.distances);
    return json{{"explicit", out}};
  }
  json operator()(const RandomMimoParams& p) const {
    std::vector<double> antennas(p.antennas.begin(), p.antennas.end());
    json out{{"seed", p.seed},
             {"antennas", doubles_json(antennas)},
             {"pathloss", p.pathloss},
             {"noise_power", p.noise_power}};
    if (!p.distances.empty()) out["distances"] = grid_json(p.distances);
    return json{{"random", out}};
  }
  json operator()(const SisoChannels& s) const {
    json out{{"bins", s.bins}};
    if (!s.bands.empty()) out["bands"] = bands_json(s.bands);
    if (s.distances) out["distances"] = grid_json(*s.distances);
    if (s.responses) {
      json resp = json::array();
      for (const auto& row : *s.responses) {
        json jr = json::array();
        for (const auto& h : row) jr.push_back(vector_json(h));
        resp.push_back(std::move(jr));
      }
      out["responses"] = resp;
      json noise = json::array();
      for (const auto& n : s.noise) {
        noise.push_back(doubles_json(std::vector<double>(n.data(), n.data() + n.size())));
      }
      out["noise"] = noise;
    } else if (s.random) {
      const RandomSisoParams& p = *s.random;
      json r{{"seed", p.seed},
             {"users", p.users},
             {"taps", p.taps},
             {"pathloss", p.pathloss},
             {"noise_power", p.noise_power}};
      if (!p.distances.empty()) r["distances"] = grid_json(p.distances);
      out["random"] = r;
    }
    return json{{"siso", out}};
  }
};

json user_json(const UserSection& u) {
  json out = json::object();
  if (u.power) out["power"] = *u.power;
  if (u.null) {
    if (const auto* m = std::get_if<CMatrix>(&*u.null)) {
      out["null"] = {{"matrix", matrix_json(*m)}};
    } else {
      const auto& s = std::get<SteeringNulls>(*u.null);
      out["null"] = {{"steering", {{"angles", doubles_json(s.angles)}, {"spacing", s.spacing}}}};
    }
  }
  if (u.soft) {
    json s{{"p_ave", u.soft->average_limit}};
    if (u.soft->shaping) s["shaping"] = matrix_json(*u.soft->shaping);
    out["soft"] = s;
  }
  if (u.peak) out["peak"] = *u.peak;
  if (u.masks) {
    if (const auto* v = std::get_if<std::vector<double>>(&*u.masks)) {
      out["masks"] = doubles_json(*v);
    } else {
      json levels = json::object();
      for (const auto& [label, level] : std::get<BandMasks>(*u.masks).levels) levels[label] = level;
      out["masks"] = {{"bands", levels}};
    }
  }
  if (u.gap) {
    if (const auto* g = std::get_if<double>(&*u.gap)) {
      out["gap"] = *g;
    } else {
      out["gap"] = {{"qam_error_probability", std::get<QamGap>(*u.gap).error_probability}};
    }
  }
  return out;
}

}  // namespace

json to_json(const Scenario& s) {
  json users = json::array();
  for (const auto& u : s.users) users.push_back(user_json(u));
  return json{
      {"channels", std::visit(ChannelsToJson{}, s.channels)},
      {"constraints", users},
      {"game", {{"variant", std::string(to_string(s.game.variant))}, {"alpha", s.game.alpha}}},
      {"schedule",
       {{"kind", std::string(to_string(s.schedule.kind))},
        {"p_update", s.schedule.update_probability},
        {"max_delay", s.schedule.max_delay},
        {"seed", s.schedule.seed}}},
      {"run",
       {{"max_iter", s.run.max_iter},
        {"tol", s.run.tol},
        {"init", std::string(to_string(s.run.init))}}},
  };
}

std::string serialize_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

void override_seed(Scenario& s, std::uint64_t seed) {
  s.schedule.seed = seed;
  if (auto* r = std::get_if<RandomMimoParams>(&s.channels)) r->seed = seed;
  if (auto* siso = std::get_if<SisoChannels>(&s.channels)) {
    if (siso->random) siso->random->seed = seed;
  }
}

ChannelSet build_mimo_channels(const ChannelSource& src) {
  if (const auto* e = std::get_if<ExplicitChannels>(&src)) {
    return ChannelSet(e->links, e->noise, e->distances);
  }
  if (const auto* r = std::get_if<RandomMimoParams>(&src)) return random_mimo_channels(*r);
  throw Error(ErrorKind::BadParams, "SISO channels cannot drive a MIMO game variant");
}

SisoScenario build_siso_channels(const SisoChannels& src) {
  if (src.random) {
    RandomSisoParams p = *src.random;
    p.bins = src.bins;
    p.bands = src.bands;
    return random_siso_scenario(p);
  }
  return SisoScenario(src.bins, *src.responses, src.noise, src.bands);
}

namespace {

UserConstraints resolve_user(const UserSection& u, std::size_t q, Eigen::Index tx_dim,
                             const SisoScenario* siso) {
  UserConstraints uc;
  uc.power_budget = u.power;
  uc.peak = u.peak;
  if (u.null) {
    if (const auto* m = std::get_if<CMatrix>(&*u.null)) {
      uc.null_matrix = *m;
    } else {
      const auto& s = std::get<SteeringNulls>(*u.null);
      uc.null_matrix = steering_matrix(s.angles, tx_dim, s.spacing);
    }
  }
  if (u.soft) {
    SoftShaping soft;
    soft.shaping = u.soft->shaping ? *u.soft->shaping : CMatrix(CMatrix::Identity(tx_dim, tx_dim));
    soft.average_limit = u.soft->average_limit;
    uc.soft = soft;
  }
  if (u.masks) {
    if (const auto* v = std::get_if<std::vector<double>>(&*u.masks)) {
      uc.masks = Eigen::Map<const RVector>(v->data(), static_cast<Eigen::Index>(v->size()));
    } else {
      if (!siso) {
        throw Error(ErrorKind::BadParams, "band masks need SISO channels with bands");
      }
      RVector m = RVector::Constant(tx_dim, kInf);
      for (const auto& [label, level] : std::get<BandMasks>(*u.masks).levels) {
        const Band* b = siso->find_band(label);
        if (!b) {
          throw Error(ErrorKind::BadParams, "user " + std::to_string(q) + ": unknown band '" +
                                                label + "'");
        }
        m.segment(static_cast<Eigen::Index>(b->begin), static_cast<Eigen::Index>(b->end - b->begin))
            .setConstant(level);
      }
      uc.masks = m;
    }
  }
  if (u.gap) {
    if (const auto* g = std::get_if<double>(&*u.gap)) {
      uc.gap = *g;
    } else {
      uc.gap = gap_factor(Constellation::Qam, std::get<QamGap>(*u.gap).error_probability).value;
    }
  }
  return uc;
}

}  // namespace

BuiltScenario build_scenario(const Scenario& s) {
  const std::size_t users = s.users.size();
  ScheduleParams sp;
  sp.update_probability = s.schedule.update_probability;
  sp.max_delay = s.schedule.max_delay;
  RunOptions options;
  options.max_iter = s.run.max_iter;
  options.tol = s.run.tol;

  if (const auto* siso_src = std::get_if<SisoChannels>(&s.channels)) {
    if (s.game.variant != Variant::SisoMasked) {
      throw Error(ErrorKind::BadParams, "SISO channels need the SISO_masked variant");
    }
    SisoScenario scenario = build_siso_channels(*siso_src);
    if (scenario.user_count() != users) {
      throw Error(ErrorKind::BadParams, "constraint list and channels disagree on user count");
    }
    ConstraintSpec cs;
    for (std::size_t q = 0; q < users; ++q) {
      cs.push_back(resolve_user(s.users[q], q, static_cast<Eigen::Index>(scenario.bin_count()),
                                &scenario));
    }
    GameSpec spec = GameSpec::siso(std::move(scenario), std::move(cs));
    return BuiltScenario{std::move(spec), make_schedule(s.schedule.kind, users, sp, s.schedule.seed),
                         options, s.run.init, siso_src->distances};
  }
  ChannelSet ch = build_mimo_channels(s.channels);
  if (ch.user_count() != users) {
    throw Error(ErrorKind::BadParams, "constraint list and channels disagree on user count");
  }
  ConstraintSpec cs;
  for (std::size_t q = 0; q < users; ++q) cs.push_back(resolve_user(s.users[q], q, ch.tx_dim(q), nullptr));
  GameSpec spec = GameSpec::mimo(std::move(ch), std::move(cs), s.game.variant, s.game.alpha);
  return BuiltScenario{std::move(spec), make_schedule(s.schedule.kind, users, sp, s.schedule.seed),
                       options, s.run.init, std::nullopt};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace cogmimo
