// SPDX-License-Identifier: Apache-2.0
//
// Scenario documents: JSON text describing channels, per-user constraints, the
// game variant, the update schedule and run settings. Unknown keys are
// rejected. Complex entries are either plain numbers or {"re": x, "im": y};
// matrices are arrays of rows.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cogmimo/iwfa.hpp"

namespace cogmimo {

struct ExplicitChannels {
  std::vector<std::vector<CMatrix>> links;  // links[r][q]
  std::vector<CMatrix> noise;
  std::optional<std::vector<std::vector<double>>> distances;
};

struct SisoChannels {
  std::size_t bins = 0;
  std::vector<Band> bands;
  // Exactly one of the two sources is set.
  std::optional<std::vector<std::vector<CVector>>> responses;
  std::vector<RVector> noise;  // with explicit responses
  std::optional<RandomSisoParams> random;
  // Only used by the uniqueness check, where the responses play the role of
  // unnormalized channels.
  std::optional<std::vector<std::vector<double>>> distances;
};

using ChannelSource = std::variant<ExplicitChannels, RandomMimoParams, SisoChannels>;

struct SteeringNulls {
  std::vector<double> angles;  // radians
  double spacing = 0.5;
};

using NullSource = std::variant<CMatrix, SteeringNulls>;

struct BandMasks {
  std::map<std::string, double> levels;  // band label -> per-bin cap
};

/// Per-bin caps (+inf = none) or caps assigned by band label.
using MaskSource = std::variant<std::vector<double>, BandMasks>;

struct QamGap {
  double error_probability = 1e-6;
};

using GapSource = std::variant<double, QamGap>;

struct SoftSource {
  std::optional<CMatrix> shaping;  // absent means identity
  double average_limit = 0.0;
};

struct UserSection {
  std::optional<double> power;
  std::optional<NullSource> null;
  std::optional<SoftSource> soft;
  std::optional<double> peak;
  std::optional<MaskSource> masks;
  std::optional<GapSource> gap;
};

struct GameSection {
  Variant variant = Variant::G1;
  double alpha = 0.0;
};

struct ScheduleSection {
  ScheduleKind kind = ScheduleKind::Simultaneous;
  double update_probability = 0.5;
  std::size_t max_delay = 0;
  std::uint64_t seed = 0;
};

struct RunSection {
  std::size_t max_iter = 1000;
  double tol = 1e-8;
  InitPreset init = InitPreset::Zero;
};

struct Scenario {
  ChannelSource channels;
  std::vector<UserSection> users;
  GameSection game;
  ScheduleSection schedule;
  RunSection run;
};

/// Throws Error(ParseError) with a path-qualified message.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const Scenario& s);
std::string serialize_scenario(const Scenario& s);

/// Replaces the RNG seed of the schedule and of any random channel source.
void override_seed(Scenario& s, std::uint64_t seed);

struct BuiltScenario {
  GameSpec spec;
  Schedule schedule;
  RunOptions options;
  InitPreset init;
  std::optional<std::vector<std::vector<double>>> siso_distances;
};

/// Generates channels, resolves constraints and assembles the game. Errors
/// from the library propagate with their own kinds.
BuiltScenario build_scenario(const Scenario& s);

ChannelSet build_mimo_channels(const ChannelSource& src);
SisoScenario build_siso_channels(const SisoChannels& src);

/// 17-significant-digit, locale-independent rendering of a double.
std::string format_double(double x);

}  // namespace cogmimo
