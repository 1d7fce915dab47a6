// Copyright 2026 The qsd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "qsd/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "qsd/alt_strategies.hpp"
#include "qsd/applications.hpp"
#include "qsd/asymptotics.hpp"
#include "qsd/minerror.hpp"
#include "qsd/qubit_geometric.hpp"

#ifndef QSD_VERSION
#define QSD_VERSION "0.0.0"
#endif

namespace qsd {

namespace fs = std::filesystem;

ExitCode exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
      return ExitCode::kParse;
    case ErrorCode::kNoConvergence:
    case ErrorCode::kCertificateFailed:
    case ErrorCode::kReconstructionFailed:
      return ExitCode::kNoConvergence;
    case ErrorCode::kInfeasible:
    case ErrorCode::kSingularEnsemble:
    case ErrorCode::kZeroClickProbability:
    case ErrorCode::kNotFound:
    case ErrorCode::kDisjointSupports:
      return ExitCode::kInfeasible;
    default:
      return ExitCode::kValidation;
  }
}

const std::vector<std::string>& scenario_tasks() {
  static const std::vector<std::string> tasks = {
      "min-error", "qubit-geometric", "usd",         "max-confidence",
      "fixed-rate", "chernoff",       "finite-n",    "witness",
      "min-entropy", "no-signaling",  "exclusion",   "unitary",
      "mutual-info"};
  return tasks;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kParseError, "field '" + field + "': " + why);
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kValidationError, what);
}

double number_field(const Json& j, const std::string& field) {
  if (!j.is_number()) parse_fail(field, "expected a number");
  return j.get<double>();
}

int int_field(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) parse_fail(field, "expected an integer");
  return j.get<int>();
}

bool needs_ensemble(const std::string& task) {
  return task != "witness" && task != "unitary" && task != "exclusion";
}

DensityMatrix parse_state(const Json& j, const std::string& field,
                          std::vector<std::string>& warnings) {
  if (!j.is_object()) parse_fail(field, "expected an object");
  const int kinds = static_cast<int>(j.contains("pure")) +
                    static_cast<int>(j.contains("matrix")) +
                    static_cast<int>(j.contains("bloch"));
  if (kinds != 1) {
    parse_fail(field, "give exactly one of \"pure\", \"matrix\", \"bloch\"");
  }
  try {
    if (j.contains("pure")) {
      const ComplexVector v = vector_from_json(j["pure"], field + ".pure");
      const double norm = v.norm();
      if (norm == 0.0) invalid(field + ".pure: zero vector");
      if (std::abs(norm - 1.0) > 1e-6) {
        std::ostringstream os;
        os << field << ".pure: norm " << norm << " renormalized to 1";
        warnings.push_back(os.str());
      }
      return DensityMatrix::from_ket(v);
    }
    if (j.contains("matrix")) {
      return DensityMatrix::validate(
          matrix_from_json(j["matrix"], field + ".matrix"));
    }
    const Json& b = j["bloch"];
    if (!b.is_array() || b.size() != 3) {
      parse_fail(field + ".bloch", "expected three numbers");
    }
    BlochVector v;
    for (int k = 0; k < 3; ++k) {
      v(k) = number_field(b[k], field + ".bloch[" + std::to_string(k) + "]");
    }
    return from_bloch(v);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError ||
        e.code() == ErrorCode::kValidationError) {
      throw;
    }
    invalid(field + ": " + std::string(error_code_name(e.code())) + ": " +
            e.what());
  }
}

Ensemble parse_ensemble(const Json& j, std::vector<std::string>& warnings) {
  if (!j.is_object()) parse_fail("ensemble", "expected an object");
  if (!j.contains("states") || !j["states"].is_array() || j["states"].empty()) {
    parse_fail("ensemble.states", "expected a nonempty array");
  }
  std::vector<DensityMatrix> states;
  for (std::size_t i = 0; i < j["states"].size(); ++i) {
    states.push_back(parse_state(j["states"][i],
                                 "ensemble.states[" + std::to_string(i) + "]",
                                 warnings));
  }
  std::vector<double> priors;
  if (j.contains("priors")) {
    const Json& p = j["priors"];
    if (!p.is_array()) parse_fail("ensemble.priors", "expected an array");
    for (std::size_t i = 0; i < p.size(); ++i) {
      priors.push_back(
          number_field(p[i], "ensemble.priors[" + std::to_string(i) + "]"));
    }
  } else {
    priors.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  }
  try {
    return Ensemble(std::move(priors), std::move(states));
  } catch (const Error& e) {
    invalid("ensemble: " + std::string(error_code_name(e.code())) + ": " +
            e.what());
  }
}

void require_param(const Scenario& s, const std::string& key) {
  if (!s.params.contains(key)) {
    invalid("task '" + s.task + "' requires params." + key);
  }
}

void check_task_inputs(const Scenario& s) {
  if (needs_ensemble(s.task) && !s.ensemble) {
    invalid("task '" + s.task + "' requires an ensemble");
  }
  if (s.task == "unitary") {
    require_param(s, "u1");
    require_param(s, "u2");
  } else if (s.task == "witness") {
    require_param(s, "n");
  } else if (s.task == "finite-n") {
    require_param(s, "n_max");
  } else if (s.task == "exclusion") {
    if (!s.ensemble && !s.params.contains("pbr")) {
      invalid("task 'exclusion' requires an ensemble or params.pbr");
    }
  } else if (s.task == "fixed-rate") {
    if (!s.params.contains("inconclusive") && !s.params.contains("rates")) {
      invalid("task 'fixed-rate' requires params.inconclusive or params.rates");
    }
  }
  if ((s.task == "chernoff" || s.task == "finite-n") &&
      s.ensemble->size() < 2) {
    invalid("task '" + s.task + "' needs at least two states");
  }
  if (s.task == "finite-n" && s.ensemble->size() != 2) {
    invalid("task 'finite-n' needs exactly two states");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const fs::path& base_dir) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!root.is_object()) parse_fail("(root)", "expected an object");
  if (!root.contains("schema") || !root["schema"].is_string()) {
    parse_fail("schema", "missing");
  }
  if (root["schema"].get<std::string>() != kScenarioSchema) {
    parse_fail("schema", "expected \"" + std::string(kScenarioSchema) + "\"");
  }
  for (const auto& [key, value] : root.items()) {
    static const std::vector<std::string> known = {
        "schema", "name", "task", "ensemble", "params", "options",
        "expect", "description"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      parse_fail(key, "unknown field");
    }
  }
  Scenario s;
  s.source = root;
  s.base_dir = base_dir;
  if (root.contains("name")) {
    if (!root["name"].is_string()) parse_fail("name", "expected a string");
    s.name = root["name"].get<std::string>();
  }
  if (!root.contains("task") || !root["task"].is_string()) {
    parse_fail("task", "expected a string");
  }
  s.task = root["task"].get<std::string>();
  const auto& tasks = scenario_tasks();
  if (std::find(tasks.begin(), tasks.end(), s.task) == tasks.end()) {
    invalid("unknown task '" + s.task + "'");
  }
  if (root.contains("ensemble")) {
    s.ensemble = parse_ensemble(root["ensemble"], s.warnings);
  }
  if (root.contains("params")) {
    if (!root["params"].is_object()) parse_fail("params", "expected an object");
    s.params = root["params"];
  }
  if (root.contains("options")) {
    const Json& o = root["options"];
    if (!o.is_object()) parse_fail("options", "expected an object");
    for (const auto& [key, value] : o.items()) {
      const std::string f = "options." + key;
      if (key == "tol") {
        s.options.tol = number_field(value, f);
        if (!(s.options.tol > 0.0)) invalid(f + " must be positive");
      } else if (key == "seed") {
        if (!value.is_number_unsigned()) parse_fail(f, "expected an unsigned");
        s.options.seed = value.get<std::uint64_t>();
      } else if (key == "max_iter") {
        s.options.max_iter = int_field(value, f);
        if (s.options.max_iter < 1) invalid(f + " must be positive");
      } else if (key == "cap") {
        const int cap = int_field(value, f);
        if (cap < 1) invalid(f + " must be positive");
        s.options.cap = static_cast<std::size_t>(cap);
      } else {
        parse_fail(f, "unknown option");
      }
    }
  }
  if (root.contains("expect")) {
    if (!root["expect"].is_object()) parse_fail("expect", "expected an object");
    s.expect = root["expect"];
  }
  check_task_inputs(s);
  return s;
}

Scenario parse_scenario_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot read " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.what());
  }
}

void apply_overrides(Scenario& scenario, const OptionOverrides& o) {
  if (o.tol) scenario.options.tol = *o.tol;
  if (o.seed) scenario.options.seed = *o.seed;
  if (o.max_iter) scenario.options.max_iter = *o.max_iter;
  if (o.cap) scenario.options.cap = *o.cap;
}

// ---------------------------------------------------------------------------
// Running

namespace {

void set_value(Report& r, const std::string& key, double v) {
  if (std::isfinite(v)) {
    r.values[key] = v;
  } else {
    r.notes.push_back(key + (v > 0 ? " is +infinity" : " is not finite"));
  }
}

void set_certificate(Report& r, const OptimalityCertificate& c) {
  r.certificate["dual_feasibility_gap"] = c.dual_feasibility_gap;
  r.certificate["complementarity_residual"] = c.complementarity_residual;
  r.certificate["pairwise_residual"] = c.pairwise_residual;
  r.certificate["primal_dual_gap"] = c.primal_dual_gap;
  r.certificate["tolerance"] = c.tolerance;
  r.flags["certificate_passed"] = c.passed;
  if (!c.passed) r.status = "no-convergence";
}

std::string idx(std::size_t i) { return std::to_string(i + 1); }

FixedPointOptions fp_options(const Scenario& s) {
  FixedPointOptions o;
  o.max_iter = s.options.max_iter;
  o.cert_tol = s.options.tol;
  return o;
}

Json bloch_json(const BlochVector& v) {
  return Json::array({v(0), v(1), v(2)});
}

ComplexMatrix named_or_matrix(const Json& j, const std::string& field) {
  if (j.is_string()) {
    const std::string n = j.get<std::string>();
    if (n == "I") return identity(2);
    if (n == "X") return pauli_x();
    if (n == "Y") return pauli_y();
    if (n == "Z") return pauli_z();
    if (n == "H") return (pauli_x() + pauli_z()) / std::sqrt(2.0);
    parse_fail(field, "unknown operator name '" + n + "'");
  }
  return matrix_from_json(j, field);
}

int param_int(const Scenario& s, const std::string& key, int def) {
  if (!s.params.contains(key)) return def;
  return int_field(s.params[key], "params." + key);
}

bool param_bool(const Scenario& s, const std::string& key, bool def) {
  if (!s.params.contains(key)) return def;
  if (!s.params[key].is_boolean()) parse_fail("params." + key, "expected a boolean");
  return s.params[key].get<bool>();
}

void fill_discrimination(Report& r, const DiscriminationResult& d,
                         const std::string& solver) {
  r.primary = "p_guess";
  set_value(r, "p_guess", d.p_guess);
  set_value(r, "p_error", 1.0 - d.p_guess);
  set_value(r, "iterations", d.iterations);
  for (std::size_t i = 0; i < d.residuals.size(); ++i) {
    r.residuals["r_" + idx(i)] = d.residuals[i];
  }
  set_certificate(r, d.certificate);
  r.details["solver"] = solver;
  r.details["povm"] = povm_to_json(d.povm);
  r.details["symmetry_operator"] = matrix_to_json(d.symmetry_operator);
}

void fill_qubit(Report& r, const QubitSolution& q) {
  r.primary = "p_guess";
  set_value(r, "p_guess", q.p_guess);
  set_value(r, "p_error", 1.0 - q.p_guess);
  set_value(r, "radius", q.ball.radius);
  set_value(r, "center_x", q.ball.center(0));
  set_value(r, "center_y", q.ball.center(1));
  set_value(r, "center_z", q.ball.center(2));
  r.flags["trivial_guess"] = q.trivial_guess;
  r.flags["fallback_used"] = q.fallback_used;
  set_certificate(r, q.certificate);
  r.details["solver"] = "qubit-geometric";
  Json active = Json::array();
  for (std::size_t i : q.active_set) active.push_back(i + 1);
  r.details["active_set"] = active;
  Json comp = Json::array();
  for (const auto& w : q.complementary_bloch) {
    comp.push_back(w ? bloch_json(*w) : Json());
  }
  r.details["complementary_bloch"] = comp;
  r.details["povm"] = povm_to_json(q.povm);
  r.details["symmetry_operator"] = matrix_to_json(q.symmetry_operator);
}

void run_min_error(const Scenario& s, Report& r) {
  const Ensemble& e = *s.ensemble;
  std::string solver = s.params.value("solver", std::string("auto"));
  if (solver == "auto") {
    solver = e.size() == 2 ? "helstrom"
             : e.dim() == 2 ? "qubit-geometric"
                            : "fixed-point";
  }
  if (solver == "helstrom") {
    fill_discrimination(r, helstrom_two_state(e, s.options.tol), solver);
  } else if (solver == "qubit-geometric") {
    QubitOptions o;
    o.cert_tol = s.options.tol;
    fill_qubit(r, solve_qubit(e, o));
  } else if (solver == "fixed-point") {
    fill_discrimination(r, solve_fixed_point(e, fp_options(s)), solver);
  } else if (solver == "square-root") {
    fill_discrimination(
        r, evaluate_candidate(e, square_root_measurement(e), s.options.tol),
        solver);
    r.status = "ok";  // a heuristic measurement, not claimed optimal
    r.notes.push_back("square-root measurement: certificate reports optimality only");
  } else {
    parse_fail("params.solver", "unknown solver '" + solver + "'");
  }
}

void run_usd(const Scenario& s, Report& r) {
  const Ensemble& e = *s.ensemble;
  r.details["strategy"] = "usd";
  const UsdFeasibility f = usd_feasible(e);
  if (!f.feasible) throw Error(ErrorCode::kInfeasible, f.reason);
  r.flags["feasible"] = true;
  if (!f.pure) {
    r.primary = "feasible";
    set_value(r, "feasible", 1.0);
    r.notes.push_back(
        "mixed states: feasibility established; optimal rates are computed "
        "for pure states only");
    return;
  }
  UsdResult u;
  if (e.size() == 2) {
    u = usd_two_pure(pure_state_ket(e.state(0)), pure_state_ket(e.state(1)),
                     e.prior(0), e.prior(1));
  } else {
    u = usd_reciprocal(e);
  }
  r.primary = "success_probability";
  set_value(r, "success_probability", u.success_probability);
  set_value(r, "inconclusive_rate", u.inconclusive_rate);
  set_value(r, "max_cross_click", u.max_cross_click);
  for (std::size_t i = 0; i < u.coefficients.size(); ++i) {
    set_value(r, "coefficient_" + idx(i), u.coefficients[i]);
  }
  r.details["povm"] = povm_to_json(u.povm);
}

void run_max_confidence(const Scenario& s, Report& r) {
  const MaxConfResult m = max_confidence(*s.ensemble);
  r.details["strategy"] = "maxconf";
  r.primary = "confidence_1";
  for (std::size_t k = 0; k < m.confidences.size(); ++k) {
    set_value(r, "confidence_" + idx(k), m.confidences[k]);
    set_value(r, "coefficient_" + idx(k), m.coefficients[k]);
    r.flags["degenerate_" + idx(k)] = m.degenerate[k];
  }
  set_value(r, "inconclusive_weight", m.inconclusive_weight);
  r.details["povm"] = povm_to_json(m.povm);
}

void run_fixed_rate(const Scenario& s, Report& r) {
  const Ensemble& e = *s.ensemble;
  r.details["strategy"] = "fixed-rate";
  if (s.params.contains("inconclusive")) {
    const FixedRateSolution f = solve_fixed_rate(
        e, matrix_from_json(s.params["inconclusive"], "params.inconclusive"));
    r.primary = "error";
    set_value(r, "error", f.error);
    set_value(r, "success", f.success);
    set_value(r, "rate", f.rate);
    r.details["povm"] = povm_to_json(f.povm);
    return;
  }
  const Json& g = s.params["rates"];
  if (!g.is_array() || g.empty()) parse_fail("params.rates", "expected numbers");
  std::vector<double> grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    grid.push_back(number_field(g[i], "params.rates[" + std::to_string(i) + "]"));
  }
  CurveOptions o;
  o.seed = s.options.seed;
  o.starts = param_int(s, "starts", o.starts);
  const auto curve = error_vs_inconclusive_curve(e, grid, o);
  Json points = Json::array();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const CurvePoint& p = curve[i];
    set_value(r, "rate_" + idx(i), p.rate);
    if (p.feasible) set_value(r, "error_" + idx(i), p.error);
    points.push_back(
        Json{{"rate", p.rate}, {"error", p.error}, {"feasible", p.feasible},
             {"family", p.family}});
  }
  r.primary = "error_1";
  r.details["curve"] = points;
  r.notes.push_back(
      "curve points from the rank-one inconclusive family are the best found "
      "by search within that family");
}

void run_chernoff(const Scenario& s, Report& r) {
  const Ensemble& e = *s.ensemble;
  r.primary = "xi";
  if (e.size() == 2) {
    const ChernoffResult c = chernoff_two(e.state(0), e.state(1));
    set_value(r, "xi", c.xi);
    set_value(r, "s_star", c.s_star);
    set_value(r, "minimum", c.minimum);
    r.flags["disjoint_supports"] = c.disjoint_supports;
    r.flags["grid_warning"] = c.grid_warning;
    Json curve = Json::array();
    for (const auto& [sv, v] : c.trace_curve) curve.push_back(Json::array({sv, v}));
    r.details["trace_curve"] = curve;
  } else {
    const MultiChernoff m = chernoff_multi(e.states());
    set_value(r, "xi", m.xi);
    set_value(r, "first", static_cast<double>(m.first + 1));
    set_value(r, "second", static_cast<double>(m.second + 1));
  }
  if (s.params.contains("sandwich_n")) {
    const SandwichReport w =
        sandwich_check(e.states(), param_int(s, "sandwich_n", 1),
                       s.options.cap, fp_options(s));
    set_value(r, "sandwich_lower", w.lower);
    set_value(r, "sandwich_empirical", w.empirical);
    set_value(r, "sandwich_upper", w.upper);
    r.flags["within_bounds"] = w.within_bounds;
  }
}

void run_finite_n(const Scenario& s, Report& r) {
  const Ensemble& e = *s.ensemble;
  const int n_max = param_int(s, "n_max", 1);
  const ExponentEstimate x = finite_n_error(e.state(0), e.state(1), e.prior(0),
                                            e.prior(1), n_max, s.options.cap);
  const ChernoffResult c = chernoff_two(e.state(0), e.state(1));
  r.primary = "fitted_exponent";
  set_value(r, "fitted_exponent", x.fitted_exponent);
  set_value(r, "fit_residual", x.fit_residual);
  set_value(r, "xi", c.xi);
  if (std::isfinite(c.xi) && c.xi > 0 && std::isfinite(x.fitted_exponent)) {
    set_value(r, "relative_deviation",
              std::abs(x.fitted_exponent - c.xi) / c.xi);
  }
  Json rows = Json::array();
  for (std::size_t i = 0; i < x.n_values.size(); ++i) {
    set_value(r, "error_n" + std::to_string(x.n_values[i]), x.error_probs[i]);
    rows.push_back(Json{{"n", x.n_values[i]},
                        {"error", x.error_probs[i]},
                        {"rate", std::isfinite(x.rates[i]) ? Json(x.rates[i])
                                                           : Json()}});
  }
  r.details["errors"] = rows;
}

void run_witness(const Scenario& s, Report& r) {
  const int n = param_int(s, "n", 0);
  std::optional<WitnessTable> table;
  if (s.params.contains("table")) {
    const Json& t = s.params["table"];
    if (!t.is_array()) parse_fail("params.table", "expected [x, x', p] rows");
    WitnessTable w;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string f = "params.table[" + std::to_string(i) + "]";
      if (!t[i].is_array() || t[i].size() != 3) parse_fail(f, "expected [x, x', p]");
      w[{int_field(t[i][0], f), int_field(t[i][1], f)}] =
          number_field(t[i][2], f);
    }
    table = w;
  } else if (s.params.contains("csv")) {
    if (!s.params["csv"].is_string()) parse_fail("params.csv", "expected a path");
    const fs::path p = s.base_dir / s.params["csv"].get<std::string>();
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::kParseError, "cannot read " + p.string());
    table = read_witness_csv(in);
  } else if (param_bool(s, "simulate", false)) {
    if (!s.ensemble) invalid("params.simulate needs an ensemble");
    if (static_cast<int>(s.ensemble->size()) != n) {
      invalid("params.n must equal the number of states");
    }
    table = simulate_witness_table(s.ensemble->states());
  }
  for (int d = 1; d <= n; ++d) {
    set_value(r, "Q_" + std::to_string(d), witness_bound(n, d));
  }
  if (table) {
    const WitnessReport w = witness_report(*table, n, s.options.tol);
    r.primary = "W";
    set_value(r, "W", w.value);
    set_value(r, "certified_min_dimension", w.certified_min_dimension);
  } else {
    r.primary = n >= 2 ? "Q_2" : "";
    if (n < 2) witness_bound(n, 1);  // raises InvalidArgument
  }
}

void run_min_entropy(const Scenario& s, Report& r) {
  const MinEntropyResult m = min_entropy(*s.ensemble);
  r.primary = "h_min";
  set_value(r, "h_min", m.bits);
  set_value(r, "p_guess", m.p_guess);
  r.flags["certificate_passed"] = m.certified;
  if (!m.certified) r.status = "no-convergence";
  r.details["solver"] = m.solver;
}

void run_no_signaling(const Scenario& s, Report& r) {
  const NoSignalingReport n = nosignaling_saturation(*s.ensemble, s.options.tol);
  r.primary = "product";
  set_value(r, "product", n.product);
  set_value(r, "p_guess", n.p_guess);
  set_value(r, "sum_p", n.sum_p);
  set_value(r, "decomposition_residual", n.decomposition_residual);
  for (std::size_t i = 0; i < n.p.size(); ++i) set_value(r, "p_" + idx(i), n.p[i]);
  r.flags["saturated"] = n.passed;
  r.details["solver"] = n.solver;
  if (s.params.contains("steering")) {
    const Json& st = s.params["steering"];
    if (!st.is_object() || !st.contains("shared_state") ||
        !st.contains("dim_a") || !st.contains("dim_b") ||
        !st.contains("alice")) {
      parse_fail("params.steering",
                 "needs shared_state, dim_a, dim_b and alice");
    }
    const ComplexVector ket =
        vector_from_json(st["shared_state"], "params.steering.shared_state");
    const SteeringScenario sc = steering_build(
        DensityMatrix::from_ket(ket), int_field(st["dim_a"], "params.steering.dim_a"),
        int_field(st["dim_b"], "params.steering.dim_b"),
        matrices_from_json(st["alice"], "params.steering.alice"));
    set_value(r, "steering_consistency_residual", sc.consistency_residual);
    Json pairs = Json::array();
    for (std::size_t i = 0; i < sc.pairs.size(); ++i) {
      const SteeredPair& p = sc.pairs[i];
      set_value(r, "steering_p_" + idx(i), p.p);
      pairs.push_back(Json{
          {"p", p.p},
          {"rho", p.rho ? matrix_to_json(*p.rho) : Json()},
          {"sigma", p.sigma ? matrix_to_json(*p.sigma) : Json()}});
    }
    r.details["steering"] = pairs;
  }
}

void run_exclusion(const Scenario& s, Report& r) {
  ExclusionOptions o;
  o.cert_tol = s.options.tol;
  o.seed = s.options.seed;
  o.max_iter = std::max(o.max_iter, s.options.max_iter);
  std::optional<Ensemble> pbr;
  if (s.params.contains("pbr")) {
    const Json& p = s.params["pbr"];
    if (!p.is_object()) parse_fail("params.pbr", "expected {theta, n}");
    const double theta = p.contains("theta")
                             ? number_field(p["theta"], "params.pbr.theta")
                             : std::numbers::pi / 4;
    const int n = p.contains("n") ? int_field(p["n"], "params.pbr.n") : 2;
    pbr = pbr_ensemble(theta, n, s.options.cap);
  }
  const Ensemble& e = pbr ? *pbr : *s.ensemble;
  const ExclusionResult x = exclusion_solve(e, o);
  r.primary = "value";
  set_value(r, "value", x.value);
  set_value(r, "gap", x.gap);
  set_value(r, "dual_trace", x.dual_k.trace().real());
  r.flags["perfect"] = x.perfect;
  r.flags["converged"] = x.converged;
  if (!x.converged) r.status = "no-convergence";
  r.details["method"] = x.method;
  r.details["povm"] = povm_to_json(x.povm);
}

void run_unitary(const Scenario& s, Report& r) {
  const ComplexMatrix u1 = named_or_matrix(s.params["u1"], "params.u1");
  const ComplexMatrix u2 = named_or_matrix(s.params["u2"], "params.u2");
  const bool ancilla = param_bool(s, "ancilla", true);
  const UnitaryReport u =
      unitary_distinguishability(u1, u2, ancilla, s.options.seed);
  r.primary = "u";
  set_value(r, "u", u.u);
  set_value(r, "u_search", u.u_search);
  set_value(r, "p_guess", u.p_guess);
  set_value(r, "hull_distance", u.hull_distance);
  r.flags["perfect"] = u.perfect;
  r.flags["certified"] = u.certified;
  r.flags["ancilla"] = u.ancilla;
  r.details["label"] = u.certified ? "exact" : "lower bound";
  r.details["optimal_input"] = vector_to_json(u.optimal_input);
  if (!ancilla && u.perfect) {
    r.notes.push_back(
        "perfect discrimination without an ancilla: a single input state "
        "already produces orthogonal outputs");
  }
  if (param_bool(s, "repetition", false)) {
    set_value(r, "repetition_n",
              unitary_repetition_n(u1, u2, param_int(s, "n_cap", 1000)));
  }
}

void run_mutual_info(const Scenario& s, Report& r) {
  const Ensemble& e = *s.ensemble;
  Povm povm;
  if (s.params.contains("povm")) {
    povm = Povm::validate(matrices_from_json(s.params["povm"], "params.povm"));
    r.details["measurement"] = "given";
  } else {
    const DiscriminationResult d = e.dim() == 2 && e.size() > 2
                                       ? evaluate_candidate(e, solve_qubit(e).povm,
                                                            s.options.tol)
                                       : solve_fixed_point(e, fp_options(s));
    povm = d.povm;
    r.details["measurement"] = "min-error optimal";
  }
  const double mi = mutual_information(e, povm);
  const double chi = holevo_chi(e);
  r.primary = "mutual_information";
  set_value(r, "mutual_information", mi);
  set_value(r, "holevo_chi", chi);
  r.flags["holevo_bound_holds"] = mi <= chi + 1e-9;
}

bool near(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)) ||
         std::abs(a - b) <= tol;
}

void check_expectation(const Json& expect, Report& r) {
  if (expect.is_null()) return;
  Expectation& x = r.expectation;
  x.checked = true;
  const double tol = expect.contains("tolerance") && expect["tolerance"].is_number()
                         ? expect["tolerance"].get<double>()
                         : 1e-6;
  if (expect.contains("error")) {
    x.failures.push_back("expected error " + expect["error"].dump() +
                         " but the task succeeded");
  }
  if (expect.contains("status") && expect["status"] != r.status) {
    x.failures.push_back("status " + r.status + " != " + expect["status"].dump());
  }
  if (expect.contains("values")) {
    for (const auto& [key, want] : expect["values"].items()) {
      double t = tol;
      if (expect.contains("tolerances") && expect["tolerances"].contains(key)) {
        t = expect["tolerances"][key].get<double>();
      }
      const auto it = r.values.find(key);
      if (it == r.values.end()) {
        x.failures.push_back("missing value " + key);
      } else if (!want.is_number() || !near(it->second, want.get<double>(), t)) {
        std::ostringstream os;
        os.precision(12);
        os << key << " = " << it->second << ", expected " << want.dump()
           << " within " << t;
        x.failures.push_back(os.str());
      }
    }
  }
  if (expect.contains("max")) {
    for (const auto& [key, bound] : expect["max"].items()) {
      const auto it = r.values.find(key);
      if (it == r.values.end() || it->second > bound.get<double>()) {
        x.failures.push_back(key + " exceeds " + bound.dump());
      }
    }
  }
  if (expect.contains("flags")) {
    for (const auto& [key, want] : expect["flags"].items()) {
      const auto it = r.flags.find(key);
      if (it == r.flags.end() || it->second != want.get<bool>()) {
        x.failures.push_back("flag " + key + " != " + want.dump());
      }
    }
  }
  x.passed = x.failures.empty();
}

}  // namespace

Report run_scenario(const Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  Report r;
  r.toolkit_version = QSD_VERSION;
  r.name = s.name;
  r.task = s.task;
  r.scenario = s.source;
  r.notes = s.warnings;
  if (s.task == "min-error") {
    run_min_error(s, r);
  } else if (s.task == "qubit-geometric") {
    QubitOptions o;
    o.cert_tol = s.options.tol;
    fill_qubit(r, solve_qubit(*s.ensemble, o));
  } else if (s.task == "usd") {
    run_usd(s, r);
  } else if (s.task == "max-confidence") {
    run_max_confidence(s, r);
  } else if (s.task == "fixed-rate") {
    run_fixed_rate(s, r);
  } else if (s.task == "chernoff") {
    run_chernoff(s, r);
  } else if (s.task == "finite-n") {
    run_finite_n(s, r);
  } else if (s.task == "witness") {
    run_witness(s, r);
  } else if (s.task == "min-entropy") {
    run_min_entropy(s, r);
  } else if (s.task == "no-signaling") {
    run_no_signaling(s, r);
  } else if (s.task == "exclusion") {
    run_exclusion(s, r);
  } else if (s.task == "unitary") {
    run_unitary(s, r);
  } else if (s.task == "mutual-info") {
    run_mutual_info(s, r);
  }
  check_expectation(s.expect, r);
  r.wall_time_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return r;
}

ExitCode report_exit_code(const Report& report) {
  if (report.status != "ok") return ExitCode::kNoConvergence;
  if (!report.expectation.passed) return ExitCode::kExpectationMismatch;
  return ExitCode::kOk;
}

// ---------------------------------------------------------------------------
// Report encoding

namespace {

template <typename T>
Json map_to_json(const std::map<std::string, T>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

template <typename T>
std::map<std::string, T> map_from_json(const Json& j, const std::string& field) {
  if (!j.is_object()) parse_fail(field, "expected an object");
  std::map<std::string, T> out;
  for (const auto& [k, v] : j.items()) {
    try {
      out[k] = v.template get<T>();
    } catch (const Json::exception&) {
      parse_fail(field + "." + k, "wrong type");
    }
  }
  return out;
}

}  // namespace

Json report_to_json(const Report& r) {
  Json j;
  j["schema"] = r.schema;
  j["toolkit_version"] = r.toolkit_version;
  j["name"] = r.name;
  j["task"] = r.task;
  j["status"] = r.status;
  j["primary"] = r.primary;
  j["values"] = map_to_json(r.values);
  j["flags"] = map_to_json(r.flags);
  j["certificate"] = map_to_json(r.certificate);
  j["residuals"] = map_to_json(r.residuals);
  j["notes"] = r.notes;
  j["details"] = r.details;
  j["expectation"] = Json{{"checked", r.expectation.checked},
                          {"passed", r.expectation.passed},
                          {"failures", r.expectation.failures}};
  j["scenario"] = r.scenario;
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

Report report_from_json(const Json& j) {
  if (!j.is_object() || j.value("schema", std::string()) != kReportSchema) {
    parse_fail("schema", "expected \"" + std::string(kReportSchema) + "\"");
  }
  Report r;
  try {
    r.toolkit_version = j.at("toolkit_version").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.task = j.at("task").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.primary = j.at("primary").get<std::string>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    r.details = j.at("details");
    r.scenario = j.at("scenario");
    const Json& e = j.at("expectation");
    r.expectation.checked = e.at("checked").get<bool>();
    r.expectation.passed = e.at("passed").get<bool>();
    r.expectation.failures = e.at("failures").get<std::vector<std::string>>();
    r.wall_time_ms = j.at("wall_time_ms").get<double>();
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::kParseError, std::string("report: ") + ex.what());
  }
  r.values = map_from_json<double>(j.at("values"), "values");
  r.flags = map_from_json<bool>(j.at("flags"), "flags");
  r.certificate = map_from_json<double>(j.at("certificate"), "certificate");
  r.residuals = map_from_json<double>(j.at("residuals"), "residuals");
  return r;
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "human") return ReportFormat::kHuman;
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument,
              "format must be human, json or csv");
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::string format_report(const Report& r, ReportFormat format) {
  std::ostringstream os;
  switch (format) {
    case ReportFormat::kJson:
      os << report_to_json(r).dump(2) << "\n";
      break;
    case ReportFormat::kCsv:
      os << "section,key,value\n";
      for (const auto& [k, v] : r.values) os << "value," << k << "," << fmt_double(v) << "\n";
      for (const auto& [k, v] : r.flags) os << "flag," << k << "," << (v ? "true" : "false") << "\n";
      for (const auto& [k, v] : r.certificate) os << "certificate," << k << "," << fmt_double(v) << "\n";
      for (const auto& [k, v] : r.residuals) os << "residual," << k << "," << fmt_double(v) << "\n";
      break;
    case ReportFormat::kHuman: {
      char buf[128];
      os << (r.name.empty() ? "(unnamed)" : r.name) << "  [" << r.task << "]  status: "
         << r.status << "\n";
      if (!r.primary.empty() && r.values.count(r.primary)) {
        std::snprintf(buf, sizeof buf, "  %s = %.12g\n", r.primary.c_str(),
                      r.values.at(r.primary));
        os << buf;
      }
      for (const auto& [k, v] : r.values) {
        if (k == r.primary) continue;
        std::snprintf(buf, sizeof buf, "    %-28s %.12g\n", k.c_str(), v);
        os << buf;
      }
      for (const auto& [k, v] : r.flags) {
        std::snprintf(buf, sizeof buf, "    %-28s %s\n", k.c_str(), v ? "yes" : "no");
        os << buf;
      }
      if (!r.certificate.empty()) {
        os << "  certificate:\n";
        for (const auto& [k, v] : r.certificate) {
          std::snprintf(buf, sizeof buf, "    %-28s %.3e\n", k.c_str(), v);
          os << buf;
        }
      }
      for (const auto& n : r.notes) os << "  note: " << n << "\n";
      if (r.expectation.checked) {
        os << "  expectation: " << (r.expectation.passed ? "met" : "NOT met") << "\n";
        for (const auto& f : r.expectation.failures) os << "    - " << f << "\n";
      }
      break;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Suites

namespace {

SuiteRow run_one(const fs::path& path, const OptionOverrides& overrides) {
  SuiteRow row;
  row.file = path.filename().string();
  std::string expected_error;
  {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const Json raw = Json::parse(buf.str(), nullptr, false);
    if (raw.is_object() && raw.contains("expect") && raw["expect"].is_object() &&
        raw["expect"].contains("error") && raw["expect"]["error"].is_string()) {
      expected_error = raw["expect"]["error"].get<std::string>();
    }
    if (raw.is_object()) {
      row.name = raw.value("name", std::string());
      row.task = raw.value("task", std::string());
    }
  }
  try {
    Scenario s = parse_scenario_file(path);
    apply_overrides(s, overrides);
    if (!expected_error.empty()) s.expect.erase("error");
    const Report r = run_scenario(s);
    row.status = r.status;
    row.primary = r.primary;
    if (r.values.count(r.primary)) row.value = r.values.at(r.primary);
    row.exit_code = static_cast<int>(report_exit_code(r));
    if (!expected_error.empty()) {
      row.passed = false;
      row.message = "expected error " + expected_error;
      row.exit_code = static_cast<int>(ExitCode::kExpectationMismatch);
    } else {
      row.passed = row.exit_code == 0;
      std::string msg;
      for (const auto& f : r.expectation.failures) msg += (msg.empty() ? "" : "; ") + f;
      row.message = msg;
    }
  } catch (const Error& e) {
    row.status = std::string(error_code_name(e.code()));
    row.exit_code = static_cast<int>(exit_code_for(e.code()));
    row.message = e.what();
    row.passed = !expected_error.empty() && expected_error == row.status;
    if (row.passed) row.exit_code = 0;
  } catch (const std::exception& e) {
    row.status = "InternalError";
    row.exit_code = static_cast<int>(ExitCode::kExpectationMismatch);
    row.message = e.what();
  }
  return row;
}

}  // namespace

std::vector<SuiteRow> run_suite(const fs::path& directory,
                                const std::optional<fs::path>& manifest,
                                int jobs, const OptionOverrides& overrides) {
  std::vector<fs::path> files;
  if (manifest) {
    std::ifstream in(*manifest);
    if (!in) {
      throw Error(ErrorCode::kParseError, "cannot read manifest " +
                                              manifest->string());
    }
    Json m;
    try {
      m = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kParseError,
                  "manifest " + manifest->string() + ": " + e.what());
    }
    if (!m.is_object() || m.value("schema", std::string()) != kManifestSchema ||
        !m.contains("scenarios") || !m["scenarios"].is_array()) {
      throw Error(ErrorCode::kParseError,
                  "manifest must have schema \"" + std::string(kManifestSchema) +
                      "\" and a scenarios array");
    }
    for (const auto& f : m["scenarios"]) {
      if (!f.is_string()) {
        throw Error(ErrorCode::kParseError, "manifest entries must be strings");
      }
      files.push_back(directory / f.get<std::string>());
    }
  } else if (fs::is_directory(directory)) {
    for (const auto& entry : fs::directory_iterator(directory)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json" &&
          entry.path().filename() != "manifest.json") {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  std::vector<SuiteRow> rows(files.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      rows[i] = run_one(files[i], overrides);
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string suite_csv(const std::vector<SuiteRow>& rows) {
  std::ostringstream os;
  os << "file,name,task,status,exit_code,primary,value,passed,message\n";
  for (const auto& r : rows) {
    char buf[64] = "";
    if (r.value) std::snprintf(buf, sizeof buf, "%.12g", *r.value);
    os << csv_field(r.file) << "," << csv_field(r.name) << ","
       << csv_field(r.task) << "," << csv_field(r.status) << ","
       << r.exit_code << "," << csv_field(r.primary) << "," << buf << ","
       << (r.passed ? "true" : "false") << "," << csv_field(r.message) << "\n";
  }
  return os.str();
}

}  // namespace qsd
