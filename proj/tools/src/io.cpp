#include "winband/cli/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "winband/error.hpp"

namespace winband::cli {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw Error(ErrorCode::Validation, "eigendata: '" + field + "' must be a number or [re, im]");
}

template <class T>
T required(const json& doc, const std::string& key, const std::string& where) {
  if (!doc.contains(key)) {
    throw Error(ErrorCode::Validation, where + ": missing field '" + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::Validation, where + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T optional_field(const json& doc, const std::string& key, T fallback, const std::string& where) {
  return doc.contains(key) ? required<T>(doc, key, where) : fallback;
}

void require_object(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw Error(ErrorCode::Validation, where + ": expected a JSON object");
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Validation, "band CSV: bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

json eigendata_to_json(const CellEigenData& data) {
  json traces = json::array();
  for (const auto& t : data.traces) {
    traces.push_back({{"value_plus", complex_to_json(t.value_plus)},
                      {"value_minus", complex_to_json(t.value_minus)},
                      {"deriv_plus", complex_to_json(t.deriv_plus)},
                      {"deriv_minus", complex_to_json(t.deriv_minus)}});
  }
  return {{"lambda0", data.lambda0}, {"k", data.multiplicity()}, {"traces", traces}};
}

CellEigenData eigendata_from_json(const json& doc) {
  require_object(doc, "eigendata");
  CellEigenData data;
  data.lambda0 = required<double>(doc, "lambda0", "eigendata");
  if (!doc.contains("traces") || !doc["traces"].is_array()) {
    throw Error(ErrorCode::Validation, "eigendata: 'traces' must be an array");
  }
  for (const auto& t : doc["traces"]) {
    require_object(t, "eigendata trace");
    TraceData trace;
    for (const auto* key : {"value_plus", "value_minus", "deriv_plus", "deriv_minus"}) {
      if (!t.contains(key)) {
        throw Error(ErrorCode::Validation, std::string("eigendata: trace lacks '") + key + "'");
      }
    }
    trace.value_plus = complex_from_json(t["value_plus"], "value_plus");
    trace.value_minus = complex_from_json(t["value_minus"], "value_minus");
    trace.deriv_plus = complex_from_json(t["deriv_plus"], "deriv_plus");
    trace.deriv_minus = complex_from_json(t["deriv_minus"], "deriv_minus");
    data.traces.push_back(trace);
  }
  const int k = optional_field<int>(doc, "k", data.multiplicity(), "eigendata");
  if (k != data.multiplicity()) {
    throw Error(ErrorCode::Validation, "eigendata: 'k' does not match the number of traces");
  }
  validate_structure(data);
  return data;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Validation, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

CellEigenData read_eigendata(const std::filesystem::path& path) {
  return eigendata_from_json(read_json(path));
}

void write_eigendata(const std::filesystem::path& path, const CellEigenData& data) {
  write_json(path, eigendata_to_json(data));
}

std::string band_csv(const BandCoefficients& coeffs) {
  std::string out = "theta,lambda01,lambda10\n";
  for (std::size_t m = 0; m < coeffs.thetas.size(); ++m) {
    out += format_number(coeffs.thetas[m]) + "," + format_number(coeffs.lambda01[m]) + ",";
    if (!coeffs.lambda10.empty()) out += format_number(coeffs.lambda10[m]);
    out += "\n";
  }
  return out;
}

std::vector<BandCsvRow> parse_band_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "theta,lambda01,lambda10") {
    throw Error(ErrorCode::Validation, "band CSV: unexpected header");
  }
  std::vector<BandCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw Error(ErrorCode::Validation, "band CSV: expected three columns");
    }
    const std::string_view view(line);
    BandCsvRow row;
    row.theta = parse_double(view.substr(0, c1));
    row.lambda01 = parse_double(view.substr(c1 + 1, c2 - c1 - 1));
    if (c2 + 1 < line.size()) row.lambda10 = parse_double(view.substr(c2 + 1));
    rows.push_back(row);
  }
  return rows;
}

std::string figure_csv(const BandCoefficients& coeffs) {
  if (coeffs.lambda10.empty()) {
    throw Error(ErrorCode::NotApplicable, "figure data needs a degenerate (k >= 2) eigenvalue");
  }
  std::string out = "theta,lambda10\n";
  for (std::size_t m = 0; m < coeffs.thetas.size(); ++m) {
    out += format_number(coeffs.thetas[m]) + "," + format_number(coeffs.lambda10[m]) + "\n";
  }
  return out;
}

json band_summary(const CellEigenData& data, const std::vector<BandInterval>& intervals,
                  const std::vector<double>& epsilons) {
  json doc{{"lambda0", data.lambda0}, {"k", data.multiplicity()}};
  for (const auto& b : intervals) {
    doc[to_string(b.order)] = {{"lower", b.lower_coeff},
                               {"upper", b.upper_coeff},
                               {"arg_lower", b.arg_lower},
                               {"arg_upper", b.arg_upper},
                               {"classification", to_string(b.classification)}};
  }
  json edges = json::array();
  std::optional<double> threshold;
  for (double eps : epsilons) {
    const BandEdges e = band_edges_at_epsilon(intervals, data.lambda0, eps);
    json row{{"epsilon", eps}, {"log_band", {e.log_band.lower, e.log_band.upper}}};
    if (e.quadratic_band) {
      row["quadratic_band"] = {e.quadratic_band->lower, e.quadratic_band->upper};
      row["gap"] = *e.gap;
      if (e.relative_gap) row["relative_gap"] = *e.relative_gap;
      row["overlap"] = e.overlap;
    }
    threshold = e.disjoint_threshold;
    edges.push_back(row);
  }
  doc["band_edges"] = edges;
  if (threshold) doc["disjoint_threshold"] = *threshold;
  return doc;
}

PotentialSpec parse_potential(const json& doc) {
  require_object(doc, "potential");
  PotentialSpec spec;
  spec.kind = required<std::string>(doc, "kind", "potential");
  if (doc.contains("params")) {
    require_object(doc["params"], "potential params");
    for (const auto& [name, value] : doc["params"].items()) {
      if (!value.is_number()) {
        throw Error(ErrorCode::Validation, "potential parameter '" + name + "' must be a number");
      }
      spec.params[name] = value.get<double>();
    }
  }
  make_potential(spec);  // rejects unknown kinds and parameter names
  return spec;
}

namespace {

TuneBracket parse_tune(const json& doc) {
  require_object(doc, "tune");
  TuneBracket t;
  t.parameter = optional_field<std::string>(doc, "parameter", t.parameter, "tune");
  t.t_lo = required<double>(doc, "t_lo", "tune");
  t.t_hi = required<double>(doc, "t_hi", "tune");
  t.i_even = optional_field<int>(doc, "i_even", 0, "tune");
  t.i_odd = optional_field<int>(doc, "i_odd", 0, "tune");
  if (!(t.t_lo < t.t_hi) || t.i_even < 0 || t.i_odd < 0) {
    throw Error(ErrorCode::Validation, "tune: need t_lo < t_hi and non-negative branch indices");
  }
  return t;
}

std::vector<double> number_list(const json& doc, const std::string& key) {
  const auto values = required<std::vector<double>>(doc, key, "validate config");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::Validation, "'" + key + "' has a non-finite entry");
  }
  return values;
}

}  // namespace

CellConfig parse_cell_config(const json& doc) {
  require_object(doc, "cell config");
  CellConfig c;
  c.height = required<double>(doc, "height", "cell config");
  c.nx = required<int>(doc, "nx", "cell config");
  c.ny = required<int>(doc, "ny", "cell config");
  c.potential = parse_potential(required<json>(doc, "potential", "cell config"));
  c.num_modes = optional_field<int>(doc, "num_modes", c.num_modes, "cell config");
  c.cluster = optional_field<int>(doc, "cluster", 0, "cell config");
  if (doc.contains("tune")) c.tune = parse_tune(doc["tune"]);
  if (!(c.height > 0.0) || c.nx < 1 || c.ny < 1 || c.num_modes < 1 || c.cluster < 0) {
    throw Error(ErrorCode::Validation, "cell config: sizes must be positive");
  }
  return c;
}

SweepConfig parse_sweep_config(const json& doc) {
  require_object(doc, "validate config");
  SweepConfig c;
  const json cell = required<json>(doc, "cell", "validate config");
  require_object(cell, "cell");
  c.height = required<double>(cell, "height", "cell");
  c.potential = parse_potential(required<json>(cell, "potential", "cell"));
  c.epsilons = number_list(doc, "epsilons");
  c.thetas = number_list(doc, "thetas");
  c.k = optional_field<int>(doc, "k", 1, "validate config");
  c.cluster_index = optional_field<int>(doc, "cluster", 0, "validate config");
  if (doc.contains("lambda0_hint")) {
    c.lambda0_hint = required<double>(doc, "lambda0_hint", "validate config");
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    require_object(g, "grid");
    const auto kind = optional_field<std::string>(g, "kind", "graded", "grid");
    if (kind == "uniform") {
      c.uniform = std::pair{required<int>(g, "nx", "grid"), required<int>(g, "ny", "grid")};
    } else if (kind == "graded") {
      c.graded.per_window = optional_field<int>(g, "per_window", c.graded.per_window, "grid");
      c.graded.growth = optional_field<double>(g, "growth", c.graded.growth, "grid");
      c.graded.max_step = optional_field<double>(g, "max_step", c.graded.max_step, "grid");
    } else {
      throw Error(ErrorCode::Validation, "grid: kind must be 'graded' or 'uniform'");
    }
  }
  if (doc.contains("tune")) c.tune = parse_tune(doc["tune"]);
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    require_object(t, "tolerances");
    c.log_tolerance = optional_field<double>(t, "log", c.log_tolerance, "tolerances");
    c.quadratic_tolerance =
        optional_field<double>(t, "quadratic", c.quadratic_tolerance, "tolerances");
  }
  if (c.k != 1 && c.k != 2) throw Error(ErrorCode::Validation, "validate config: k must be 1 or 2");
  if (c.k == 2 && !c.tune) {
    throw Error(ErrorCode::Validation, "validate config: k = 2 needs a 'tune' bracket");
  }
  if (c.epsilons.size() < 3 || c.thetas.empty()) {
    throw Error(ErrorCode::Validation, "validate config: need >= 3 epsilons and >= 1 theta");
  }
  for (double eps : c.epsilons) {
    if (!(eps > 0.0) || !(eps < 0.5 * c.height)) {
      throw Error(ErrorCode::Validation, "validate config: epsilons must lie in (0, H/2)");
    }
  }
  return c;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "epsilon,theta,j,lambda,r_diagnostic\n";
  for (const auto& level : result.levels) {
    for (const auto& r : level.results) {
      const int count = static_cast<int>(r.eigenvalues.size());
      for (int j = 1; j <= count; ++j) {
        const double diag = j == 1 ? r.r1 : j == 2 ? *r.r2 : r.r3[j - 3];
        out += format_number(r.epsilon) + "," + format_number(r.theta) + "," +
               std::to_string(j) + "," + format_number(r.band(j)) + "," + format_number(diag) +
               "\n";
      }
    }
  }
  return out;
}

namespace {

void describe_report(std::ostringstream& out, const RateReport& r, bool counted) {
  out << (counted ? (r.passed() ? "PASS " : "FAIL ") : "INFO ")
      << (counted ? to_string(r.kind) : std::string_view("dipole_cross_check"))
      << " theta=" << r.theta << " ratios:";
  for (const auto& p : r.points) out << " " << p.ratio << "@eps=" << p.epsilon;
  out << " extrapolated=" << r.extrapolated << " tolerance=" << r.tolerance
      << " positive=" << r.positive << " monotone=" << r.monotone << "\n";
}

}  // namespace

std::string sweep_summary(const SweepResult& result) {
  std::ostringstream out;
  out.precision(6);
  out << "window sweep: k=" << result.config.k << " H=" << result.config.height << "\n";
  for (const auto& level : result.levels) {
    out << "  eps=" << level.epsilon << " grid " << level.nx << "x" << level.ny
        << " lambda0=" << format_number(level.data.lambda0);
    if (level.tuned_parameter) out << " tuned=" << format_number(*level.tuned_parameter);
    out << "\n";
  }
  for (const auto& r : result.reports) describe_report(out, r, true);
  for (std::size_t t = 0; t < result.separation.size(); ++t) {
    out << (result.separation_decreasing[t] ? "PASS " : "FAIL ") << "band separation ratios:";
    for (double s : result.separation[t]) out << " " << s;
    out << "\n";
  }
  for (const auto& r : result.cross_checks) describe_report(out, r, false);
  out << (result.passed() ? "overall PASS" : "overall FAIL") << "\n";
  return out.str();
}

}  // namespace winband::cli
