#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bcpace/classifier.hpp"
#include "bcpace/gain.hpp"
#include "bcpace/normal_form.hpp"
#include "bcpace/pacing.hpp"

namespace bcpace {

// Map files are JSON objects {"dim": m, "A": [[...], ...], "B": [[...]], "c": [...]}.
// Shape problems and non-finite entries raise ParseError; continuity and
// other semantic checks come from the NormalFormMap constructor.
NormalFormMap parse_map_json(std::string_view text);
NormalFormMap load_map_file(const std::filesystem::path& path);
std::string map_to_json(const NormalFormMap& map);

std::string report_to_json(const ConditionReport& report);
std::string response_to_json(const PacedResponse& response);
std::string simulation_to_json(const SimulationResult& result);
std::string verdict_to_json(const ClassifierVerdict& verdict);

/// 17 significant digits, "." decimal separator.
std::string format_double(double value);

/// Header `param,gamma_theory,gamma_sim`; missing values become empty cells.
void write_gain_csv(std::ostream& out, const GainCurve& curve);

/// Header `delta,gamma`. Blank lines are skipped.
std::vector<GainObservation> read_gain_observations(std::istream& in);

}  // namespace bcpace
