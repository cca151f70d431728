#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bcpace/classifier.hpp"
#include "bcpace/error.hpp"
#include "bcpace/gain.hpp"
#include "bcpace/io.hpp"
#include "bcpace/normal_form.hpp"
#include "bcpace/pacing.hpp"
#include "bcpace/sun_model.hpp"

namespace bcpace::cli {

namespace {

struct SimFlags {
  SimulationOptions opts;

  void attach(CLI::App* app) {
    app->add_option("--max-beats", opts.max_beats, "Beat budget for period-two detection")->capture_default_str();
    app->add_option("--transient", opts.transient, "Beats discarded before checking convergence")
        ->capture_default_str();
    app->add_option("--tol", opts.tol, "Convergence tolerance on the even subsequence (inf-norm)")
        ->capture_default_str();
    app->add_option("--consecutive", opts.consecutive, "Successive even beats that must meet --tol")
        ->capture_default_str();
  }
};

struct RangeFlags {
  std::vector<double> range;
  double fixed = 0.0;
  std::string axis = "delta";

  void attach(CLI::App* app, bool required) {
    auto* r = app->add_option("--range", range, "Scan grid: start stop count")->expected(3);
    if (required) r->required();
    app->add_option("--fixed", fixed, "Value of the parameter held fixed")->capture_default_str();
    app->add_option("--axis", axis, "Scanned parameter")
        ->check(CLI::IsMember({"mu", "delta"}))
        ->capture_default_str();
  }

  ScanAxis scan_axis() const { return axis == "mu" ? ScanAxis::mu : ScanAxis::delta; }

  std::vector<double> grid() const {
    const double count = range[2];
    if (!(count >= 1.0) || count != std::floor(count)) {
      throw Error(ErrorCode::invalid_argument, "--range count must be a positive integer");
    }
    if (count > 1.0 && !(range[1] > range[0])) {
      throw Error(ErrorCode::invalid_argument, "--range needs start < stop");
    }
    return linear_grid(range[0], range[1], static_cast<std::size_t>(count));
  }
};

struct SunFlags {
  SunParams params;
  double h_lo = kDefaultHLow;
  double h_hi = kDefaultHHigh;

  void attach(CLI::App* app) {
    app->add_option("--a-min", params.a_min, "Minimum atrial-His interval (ms)")->capture_default_str();
    app->add_option("--tau-rec", params.tau_rec, "Recovery time constant (ms)")->capture_default_str();
    app->add_option("--tau-fat", params.tau_fat, "Fatigue time constant (ms)")->capture_default_str();
    app->add_option("--fatigue", params.fatigue, "Fatigue magnitude (ms)")->capture_default_str();
    app->add_option("--border-a", params.border_a, "A value at which the recovery curve switches (ms)")
        ->capture_default_str();
    app->add_option("--below-intercept", params.at_or_below_border.intercept, "Recovery intercept for A <= border")
        ->capture_default_str();
    app->add_option("--below-slope", params.at_or_below_border.slope, "Recovery slope for A <= border")
        ->capture_default_str();
    app->add_option("--above-intercept", params.above_border.intercept, "Recovery intercept for A > border")
        ->capture_default_str();
    app->add_option("--above-slope", params.above_border.slope, "Recovery slope for A > border")
        ->capture_default_str();
    app->add_option("--h-lo", h_lo, "Lower end of the H bracket for the bifurcation search (ms)")
        ->capture_default_str();
    app->add_option("--h-hi", h_hi, "Upper end of the H bracket (ms)")->capture_default_str();
  }
};

nlohmann::json sim_options_json(const SimulationOptions& o) {
  return {{"max_beats", o.max_beats}, {"transient", o.transient}, {"tol", o.tol}, {"consecutive", o.consecutive}};
}

nlohmann::json sun_params_json(const SunParams& p) {
  return {{"a_min", p.a_min},
          {"tau_rec", p.tau_rec},
          {"tau_fat", p.tau_fat},
          {"fatigue", p.fatigue},
          {"border_a", p.border_a},
          {"below_border", {p.at_or_below_border.intercept, p.at_or_below_border.slope}},
          {"above_border", {p.above_border.intercept, p.above_border.slope}}};
}

nlohmann::json matrix_rows(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  return rows;
}

// Writes to `path`, or to `fallback` when the path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write " + path);
  write(f);
  if (!f) throw Error(ErrorCode::invalid_argument, "write failed for " + path);
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::condition_violated: return kConditionFailure;
    case ErrorCode::insufficient_data: return kInsufficientData;
    default: return kInputError;
  }
}

int cmd_analyze(const std::string& map_file, bool certificate, std::uint64_t seed, std::ostream& out) {
  const NormalFormMap map = load_map_file(map_file);
  const ConditionReport report = check_conditions(map, certificate, seed);
  out << report_to_json(report) << '\n';
  return report.core_conditions_pass() ? kSuccess : kConditionFailure;
}

int cmd_pace(const std::string& map_file, double mu, double delta, std::vector<double> x0, std::int64_t beats,
             const std::string& series_out, const SimulationOptions& opts, std::ostream& out) {
  const NormalFormMap map = load_map_file(map_file);
  if (x0.empty()) x0.assign(map.dim(), 0.0);
  if (x0.size() != map.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "--x0 needs " + std::to_string(map.dim()) + " values");
  }
  if (beats < 0) throw Error(ErrorCode::invalid_argument, "--beats must be non-negative");
  emit(series_out, out, [&](std::ostream& os) {
    os << 'n';
    for (std::size_t i = 1; i <= map.dim(); ++i) os << ",x" << i;
    os << '\n';
    Vector x = x0;
    for (std::int64_t n = 0; n <= beats; ++n) {
      os << n;
      for (double v : x) os << ',' << format_double(v);
      os << '\n';
      if (n < beats) x = paced_step(map, x, n, mu, delta);
    }
  });
  const SimulationResult sim = simulate_paced(map, mu, delta, x0, opts);
  out << simulation_to_json(sim) << '\n';
  return kSuccess;
}

int cmd_classify(const std::string& csv_file, std::optional<double> mu_known, std::ostream& out) {
  std::ifstream in(csv_file);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + csv_file);
  const auto samples = read_gain_observations(in);
  const ClassifierVerdict verdict = classify_bifurcation(samples, mu_known);
  out << verdict_to_json(verdict) << '\n';
  return kSuccess;
}

void write_meta(const std::string& path, const nlohmann::json& meta) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write " + path);
  f << meta.dump(2) << '\n';
}

nlohmann::json scan_meta(const std::string& source, const RangeFlags& r) {
  return {{"source", source},
          {"axis", std::string(to_string(r.scan_axis()))},
          {"fixed", r.fixed},
          {"range", {{"start", r.range[0]}, {"stop", r.range[1]}, {"count", r.range[2]}}}};
}

int cmd_gain_scan_map(const std::string& map_file, const RangeFlags& r, const SimulationOptions& opts,
                      const std::string& csv_out, const std::string& meta_out, std::ostream& out) {
  const NormalFormMap map = load_map_file(map_file);
  const auto grid = r.grid();
  const GainCurve curve = gain_scan(map, r.scan_axis(), r.fixed, grid, opts);
  emit(csv_out, out, [&](std::ostream& os) { write_gain_csv(os, curve); });
  auto meta = scan_meta("map", r);
  meta["map_file"] = map_file;
  meta["simulation"] = sim_options_json(opts);
  meta["initial_condition"] = "max(mu, 0) * X_fp";
  write_meta(meta_out, meta);
  return kSuccess;
}

int cmd_gain_scan_classical(const RangeFlags& r, const std::string& csv_out, const std::string& meta_out,
                            std::ostream& out) {
  const auto grid = r.grid();
  const GainCurve curve = gain_scan_classical(r.scan_axis(), r.fixed, grid);
  emit(csv_out, out, [&](std::ostream& os) { write_gain_csv(os, curve); });
  write_meta(meta_out, scan_meta("classical", r));
  return kSuccess;
}

nlohmann::json sun_info(const SunCaseStudy& study) {
  const auto& red = study.reduction();
  const auto& g = study.gain();
  return {{"h_bif", study.bifurcation().h_bif},
          {"a_bif", study.bifurcation().state.a},
          {"r_bif", study.bifurcation().state.r},
          {"normal_form",
           {{"A", matrix_rows(red.normal.above())},
            {"B", matrix_rows(red.normal.below())},
            {"c", red.normal.coupling()},
            {"c_residual", red.c_residual}}},
          {"gain", {{"gamma_const", g.gamma_const}, {"gamma_slope", g.gamma_slope}, {"rho", g.rho}}}};
}

int cmd_sun_scan(const SunFlags& s, const RangeFlags& r, const SimulationOptions& opts, const std::string& csv_out,
                 const std::string& meta_out, std::ostream& out) {
  const SunCaseStudy study(s.params, s.h_lo, s.h_hi);
  const auto grid = r.grid();
  const GainCurve curve = study.gain_scan(r.scan_axis(), r.fixed, grid, opts);
  emit(csv_out, out, [&](std::ostream& os) { write_gain_csv(os, curve); });
  auto meta = scan_meta("sun", r);
  meta["params"] = sun_params_json(s.params);
  meta["model"] = sun_info(study);
  meta["simulation"] = sim_options_json(opts);
  meta["initial_condition"] = "unpaced fixed point at H";
  meta["gain_coordinate"] = "A (ms per ms of delta)";
  meta["mu"] = "H - H_bif";
  write_meta(meta_out, meta);
  return kSuccess;
}

// Reports the bifurcation and normal form even when the conditions fail, so
// parameter variants without a B/C period-doubling can still be inspected.
int cmd_sun_info(const SunFlags& s, std::ostream& out) {
  const SunBifurcation bif = locate_sun_bifurcation(s.params, s.h_lo, s.h_hi);
  const double z[2] = {bif.state.a, bif.state.r};
  const ReductionResult red = normal_form_reduce(sun_piecewise_map(s.params), z, bif.h_bif);
  const ConditionReport report = check_conditions(red.normal);
  nlohmann::json info = {{"params", sun_params_json(s.params)},
                         {"h_bif", bif.h_bif},
                         {"a_bif", bif.state.a},
                         {"r_bif", bif.state.r},
                         {"normal_form",
                          {{"A", matrix_rows(red.normal.above())},
                           {"B", matrix_rows(red.normal.below())},
                           {"c", red.normal.coupling()},
                           {"c_residual", red.c_residual}}},
                         {"conditions", nlohmann::json::parse(report_to_json(report))}};
  if (report.core_conditions_pass()) {
    const GainParams g = gain_params(red.normal);
    info["gain"] = {{"gamma_const", g.gamma_const}, {"gamma_slope", g.gamma_slope}, {"rho", g.rho}};
  }
  out << info.dump(2) << '\n';
  return report.core_conditions_pass() ? kSuccess : kConditionFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Border-collision period-doubling analysis and alternate-pacing gain"};
  app.name("bcpace");
  app.require_subcommand(1);

  // analyze
  std::string analyze_map;
  bool no_certificate = false;
  std::uint64_t seed = kDefaultCertificateSeed;
  auto* analyze = app.add_subcommand("analyze", "Check the existence and stability conditions of a normal-form map");
  analyze->add_option("map", analyze_map, "Map JSON file")->required();
  analyze->add_flag("--no-certificate", no_certificate, "Skip the contraction-certificate search");
  analyze->add_option("--seed", seed, "Seed for the random part of the certificate search")->capture_default_str();

  // pace
  std::string pace_map, pace_series;
  double pace_mu = 0.0, pace_delta = 0.0;
  std::vector<double> pace_x0;
  std::int64_t pace_beats = 100;
  SimFlags pace_sim;
  auto* pace = app.add_subcommand("pace", "Iterate the alternately paced map and detect its period-two response");
  pace->add_option("map", pace_map, "Map JSON file")->required();
  pace->add_option("--mu", pace_mu, "Bifurcation parameter")->required();
  pace->add_option("--delta", pace_delta, "Pacing amplitude; beat n uses mu + (-1)^n delta")->required();
  pace->add_option("--x0", pace_x0, "Initial state (default: origin)");
  pace->add_option("--beats", pace_beats, "Beats written to the series CSV")->capture_default_str();
  pace->add_option("--series-out", pace_series, "Write the beat series here instead of stdout");
  pace_sim.attach(pace);

  // gain-scan
  std::string scan_map, scan_out, scan_meta_path;
  bool scan_classical = false, scan_sun = false;
  RangeFlags scan_range;
  SimFlags scan_sim;
  SunFlags scan_sun_flags;
  auto* scan = app.add_subcommand("gain-scan", "Tabulate theoretical and simulated gain along mu or delta");
  scan->add_option("map", scan_map, "Map JSON file");
  scan->add_flag("--classical", scan_classical, "Use the classical period-doubling gain");
  scan->add_flag("--sun", scan_sun, "Use the built-in atrioventricular conduction model (mu = H - H_bif)");
  scan_range.attach(scan, true);
  scan->add_option("--out", scan_out, "CSV output path (default stdout)");
  scan->add_option("--meta", scan_meta_path, "Write run metadata as JSON to this path");
  scan_sim.attach(scan);
  scan_sun_flags.attach(scan);

  // classify
  std::string classify_csv;
  std::optional<double> mu_known;
  auto* classify = app.add_subcommand("classify", "Label gain-vs-amplitude data as border-collision or classical");
  classify->add_option("csv", classify_csv, "CSV with header delta,gamma")->required();
  classify->add_option("--mu-known", mu_known, "Distance to the bifurcation, if known (recorded only)");

  // sun
  std::string sun_out, sun_meta_path;
  RangeFlags sun_range;
  SimFlags sun_sim;
  SunFlags sun_flags;
  auto* sun = app.add_subcommand("sun", "Bifurcation, normal form and gain scans of the built-in conduction model");
  sun_range.attach(sun, false);
  sun->add_option("--out", sun_out, "CSV output path (default stdout)");
  sun->add_option("--meta", sun_meta_path, "Write run metadata as JSON to this path");
  sun_sim.attach(sun);
  sun_flags.attach(sun);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_map, !no_certificate, seed, out);
    if (pace->parsed()) {
      return cmd_pace(pace_map, pace_mu, pace_delta, pace_x0, pace_beats, pace_series, pace_sim.opts, out);
    }
    if (scan->parsed()) {
      const int sources = (scan_map.empty() ? 0 : 1) + (scan_classical ? 1 : 0) + (scan_sun ? 1 : 0);
      if (sources != 1) {
        err << "gain-scan: give exactly one of a map file, --classical or --sun\n";
        return kInputError;
      }
      if (scan_classical) return cmd_gain_scan_classical(scan_range, scan_out, scan_meta_path, out);
      if (scan_sun) return cmd_sun_scan(scan_sun_flags, scan_range, scan_sim.opts, scan_out, scan_meta_path, out);
      return cmd_gain_scan_map(scan_map, scan_range, scan_sim.opts, scan_out, scan_meta_path, out);
    }
    if (classify->parsed()) return cmd_classify(classify_csv, mu_known, out);
    if (sun->parsed()) {
      if (!sun_range.range.empty()) {
        return cmd_sun_scan(sun_flags, sun_range, sun_sim.opts, sun_out, sun_meta_path, out);
      }
      return cmd_sun_info(sun_flags, out);
    }
  } catch (const Error& e) {
    err << "bcpace: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "bcpace: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace bcpace::cli
