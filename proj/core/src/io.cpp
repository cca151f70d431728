#include "bcpace/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bcpace/error.hpp"

namespace bcpace {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

double finite_number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(where + " is not finite");
  return v;
}

Matrix parse_matrix(const json& j, std::size_t dim, const std::string& key) {
  if (!j.is_array() || j.size() != dim) parse_fail("\"" + key + "\" must have " + std::to_string(dim) + " rows");
  Matrix m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != dim) {
      parse_fail("row " + std::to_string(r) + " of \"" + key + "\" must have " + std::to_string(dim) + " entries");
    }
    for (std::size_t c = 0; c < dim; ++c) {
      m(r, c) = finite_number(row[c], key + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  return rows;
}

json complex_list(const ComplexList& values) {
  json out = json::array();
  for (const auto& z : values) out.push_back({z.real(), z.imag()});
  return out;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json response_json(const PacedResponse& r) {
  return {{"kind", std::string(to_string(r.kind))},
          {"mu", r.mu},
          {"delta", r.delta},
          {"upper", r.upper},
          {"lower", r.lower},
          {"upper_on_odd_beats", r.upper_on_odd_beats}};
}

json fit_json(const BorderCollisionFit& f) {
  return {{"c0", f.c0}, {"a", f.a}, {"b", f.b}, {"residual", f.residual}};
}

json fit_json(const ClassicalFit& f) { return {{"p", f.p}, {"q", f.q}, {"residual", f.residual}}; }

}  // namespace

NormalFormMap parse_map_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) parse_fail("map file must hold a JSON object");
  for (const char* key : {"dim", "A", "B", "c"}) {
    if (!j.contains(key)) parse_fail(std::string("missing key \"") + key + "\"");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) parse_fail("\"dim\" must be a positive integer");
  const auto dim = static_cast<std::size_t>(j["dim"].get<long long>());
  Matrix a = parse_matrix(j["A"], dim, "A");
  Matrix b = parse_matrix(j["B"], dim, "B");
  const json& jc = j["c"];
  if (!jc.is_array() || jc.size() != dim) parse_fail("\"c\" must have " + std::to_string(dim) + " entries");
  Vector c(dim);
  for (std::size_t i = 0; i < dim; ++i) c[i] = finite_number(jc[i], "c[" + std::to_string(i) + "]");
  return NormalFormMap(std::move(a), std::move(b), std::move(c));
}

NormalFormMap load_map_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map_json(buf.str());
}

std::string map_to_json(const NormalFormMap& map) {
  const json j = {{"dim", map.dim()},
                  {"A", matrix_json(map.above())},
                  {"B", matrix_json(map.below())},
                  {"c", map.coupling()}};
  return j.dump(2);
}

std::string report_to_json(const ConditionReport& r) {
  json j;
  j["conditions"] = {{"fixed_point", std::string(to_string(r.fixed_point))},
                     {"unstable_point", std::string(to_string(r.unstable_point))},
                     {"period_two", std::string(to_string(r.period_two))},
                     {"pacing_nondegenerate", std::string(to_string(r.pacing_nondegenerate))},
                     {"contraction", std::string(to_string(r.contraction))}};
  j["core_conditions_pass"] = r.core_conditions_pass();
  j["eigenvalues"] = {{"A", complex_list(r.eigenvalues_above)},
                      {"B", complex_list(r.eigenvalues_below)},
                      {"AB", complex_list(r.eigenvalues_product)}};
  j["spectral_radius"] = {
      {"A", r.spectral_radius_above}, {"B", r.spectral_radius_below}, {"AB", r.spectral_radius_product}};
  j["witnesses"] = {{"fixed_point_first", optional_json(r.fixed_point_first)},
                    {"unstable_first", optional_json(r.unstable_first)},
                    {"upper_first", optional_json(r.upper_first)},
                    {"lower_first", optional_json(r.lower_first)},
                    {"pacing_direction_first", optional_json(r.pacing_direction_first)}};
  if (r.certificate) {
    j["certificate"] = {{"theta", r.certificate->theta}, {"S", matrix_json(r.certificate->s)}};
  } else {
    j["certificate"] = nullptr;
  }
  return j.dump(2);
}

std::string response_to_json(const PacedResponse& response) { return response_json(response).dump(2); }

std::string simulation_to_json(const SimulationResult& result) {
  const auto& d = result.detection;
  json j = {{"converged", d.converged},
            {"beats", d.beats},
            {"last_difference", d.last_difference},
            {"even_point", d.even_point},
            {"odd_point", d.odd_point}};
  j["response"] = result.response ? response_json(*result.response) : json(nullptr);
  return j.dump(2);
}

std::string verdict_to_json(const ClassifierVerdict& v) {
  const json j = {{"label", std::string(to_string(v.label))},
                  {"border_collision_fit", fit_json(v.bc_fit)},
                  {"classical_fit", fit_json(v.classical_fit)},
                  {"monotonicity", v.monotonicity},
                  {"constant_residual", v.constant_residual},
                  {"mu_known", optional_json(v.mu_known)}};
  return j.dump(2);
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_gain_csv(std::ostream& out, const GainCurve& curve) {
  out << "param,gamma_theory,gamma_sim\n";
  for (const auto& s : curve.samples) {
    out << format_double(s.param) << ',';
    if (s.theory) out << format_double(*s.theory);
    out << ',';
    if (s.simulated) out << format_double(*s.simulated);
    out << '\n';
  }
}

std::vector<GainObservation> read_gain_observations(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<GainObservation> out;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  auto number = [&](const std::string& cell) {
    const std::string t = trim(cell);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
      parse_fail("line " + std::to_string(line_no) + ": bad number \"" + t + "\"");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      parse_fail("line " + std::to_string(line_no) + ": expected two comma-separated fields");
    }
    const std::string first = trim(line.substr(0, comma));
    const std::string second = trim(line.substr(comma + 1));
    if (!header_seen) {
      if (first != "delta" || second != "gamma") parse_fail("expected header \"delta,gamma\"");
      header_seen = true;
      continue;
    }
    out.push_back({number(first), number(second)});
  }
  if (!header_seen) parse_fail("empty input; expected header \"delta,gamma\"");
  return out;
}

}  // namespace bcpace
