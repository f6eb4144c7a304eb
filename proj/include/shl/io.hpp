#pragma once

// Report serialisation. JSON is canonical: keys sorted, floats with 17
// significant digits, non-finite values as the strings "inf", "-inf", "nan".
// CSV: header row, LF endings, optional leading '#' comment lines.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shl/ball_reference.hpp"
#include "shl/counterexample.hpp"
#include "shl/error.hpp"
#include "shl/pde_oracle.hpp"
#include "shl/perturbed_disk.hpp"
#include "shl/spectra.hpp"
#include "shl/stability.hpp"
#include "shl/verification.hpp"

namespace shl {

using json = nlohmann::json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Finite doubles stay numbers; the rest become strings.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

namespace detail {

inline void write_canonical(const json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
        write_canonical(it.value(), out, indent, depth + 1);
      }
      out += nl + close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) {
          out += ",";
          out += nl;
        }
        out += pad;
        write_canonical(j[i], out, indent, depth + 1);
      }
      out += nl + close_pad + "]";
      return;
    }
    case json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

inline std::string to_canonical_string(const json& j, int indent = 2) {
  std::string out;
  detail::write_canonical(j, out, indent, 0);
  out += "\n";
  return out;
}

/// Reads a double written by number(): a JSON number or "inf"/"-inf"/"nan".
inline double read_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw DomainError("read_number: expected a number");
}

inline json number_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

// ---------------------------------------------------------------- JSON views

inline json to_json(const BoundaryPerturbation& h) {
  return {{"a0", number(h.a0())}, {"cos", number_array(h.cos_coeffs())}, {"sin", number_array(h.sin_coeffs())}};
}

inline BoundaryPerturbation perturbation_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("perturbation: expected an object with a0, cos, sin");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "a0" && it.key() != "cos" && it.key() != "sin") {
      throw DomainError("perturbation: unknown field '" + it.key() + "'");
    }
  }
  auto arr = [&](const char* key) {
    std::vector<double> v;
    if (j.contains(key)) {
      for (const json& x : j.at(key)) v.push_back(read_number(x));
    }
    return v;
  };
  return {j.contains("a0") ? read_number(j.at("a0")) : 0.0, arr("cos"), arr("sin")};
}

inline json to_json(const FunctionalCombo& c) {
  json terms = json::array();
  for (const Term& t : c.terms()) terms.push_back({{"tag", std::string(to_string(t.tag))}, {"coefficient", number(t.coefficient)}});
  return {{"label", c.label()}, {"terms", terms}};
}

inline json to_json(const BallReference& b) {
  return {{"d", b.d},
          {"R", number(b.R)},
          {"surface", number(b.surface)},
          {"volume", number(b.volume)},
          {"mean_curvature", number(b.mean_curvature)},
          {"lambda1", number(b.lambda1)},
          {"energy", number(b.energy)},
          {"gamma_sq", number(b.gamma_sq)}};
}

inline json to_json(const QuadraticFormSpectrum& s) {
  json diag = json::object();
  for (const auto& [k, v] : s.diagnostics) diag[k] = number(v);
  json j = {{"d", s.d},
            {"K", s.K},
            {"c", number_array(s.c)},
            {"label", s.label},
            {"growth_quadratic", number(s.growth_quadratic)},
            {"growth_linear", number(s.growth_linear)},
            {"diagnostics", diag}};
  if (!s.convention.empty()) {
    j["convention"] = s.convention;
    j["multiplier"] = number(s.multiplier);
  }
  return j;
}

inline json to_json(const ThresholdReport& r) {
  json j = {{"pair", std::string(to_string(r.pair))},
            {"d", r.d},
            {"K", r.K},
            {"lambda1_form", std::string(to_string(r.form))},
            {"tau", number_array(r.tau)},
            {"sup_tau", number(r.sup_tau)},
            {"argmax_k", r.argmax_k},
            {"closed_form_kind", r.closed_form_kind},
            {"agrees_with_paper", r.agrees_with_closed_form},
            {"rel_gap", number(r.rel_gap)},
            {"tail_limit", number(r.tail_limit)},
            {"sup_all_modes", number(r.sup_all_modes)},
            {"tail_certified", r.tail_certified}};
  j["closed_form"] = r.closed_form ? number(*r.closed_form) : json(nullptr);
  return j;
}

inline json to_json(const CoercivityResult& c) {
  return {{"value", number(c.value)},
          {"argmin_k", c.argmin_k},
          {"tail_limit", number(c.tail_limit)},
          {"diagnostic", c.diagnostic}};
}

inline json to_json(const PdeSolution& s) {
  return {{"value", number(s.value)},
          {"coefficients", number_array(s.coefficients)},
          {"boundary_residual", number(s.boundary_residual)},
          {"collocation_residual", number(s.collocation_residual)},
          {"basis_size", s.basis_size}};
}

inline json to_json(const FdReport& r) {
  return {{"functional", to_json(r.functional)},
          {"h", to_json(r.h)},
          {"j0pp_fd", number(r.j0pp_fd)},
          {"j0pp_analytic", number(r.j0pp_analytic)},
          {"rel_gap", number(r.rel_gap)},
          {"step", number(r.step)},
          {"richardson_order", number(r.richardson_order)},
          {"order_status", r.order_status},
          {"d_full", number(r.d_full)},
          {"d_half", number(r.d_half)},
          {"d_quarter", number(r.d_quarter)},
          {"noise_floor", number(r.noise_floor)},
          {"l2_mass", number(r.l2_mass)},
          {"energy_basis", r.basis.energy},
          {"eigen_basis", r.basis.eigen}};
}

inline json to_json(const FdSuiteEntry& e) {
  json j = to_json(e.report);
  j["direction"] = e.direction;
  j["absolute_check"] = e.absolute;
  j["passed"] = entry_passes(e);
  return j;
}

inline json to_json(const PlAdjudication& a) {
  json scan = json::array();
  for (const PathSample& s : a.scan) scan.push_back({number(s.t), number(s.jpp)});
  return {{"fd_root", number(a.fd_root)},
          {"fd_root_plain", number(a.fd_root_plain)},
          {"tolerance", number(a.tolerance)},
          {"spectral", number(a.spectral)},
          {"printed", number(a.printed)},
          {"rel_gap_spectral", number(a.rel_gap_spectral)},
          {"printed_distance_in_tolerances", number(a.printed_distance)},
          {"gamma_sq_fd", number(a.gamma_sq_fd)},
          {"within_2pct", a.within_2pct},
          {"inconsistent_with_printed", a.inconsistent_with_printed},
          {"fd_perimeter", to_json(a.perimeter)},
          {"fd_volume", to_json(a.volume)},
          {"fd_lambda1", to_json(a.eigen)},
          {"scan", scan}};
}

inline json to_json(const PathScan& s) {
  json samples = json::array();
  for (const PathSample& p : s.samples) samples.push_back({{"t", number(p.t)}, {"jpp", number(p.jpp)}});
  return {{"lagrangian", to_json(s.lagrangian)},
          {"h", to_json(s.h)},
          {"samples", samples},
          {"norm_sq", number(s.norm_sq)},
          {"s2", number(s.s2)},
          {"max_deviation", number(s.max_deviation)},
          {"modulus", number(s.modulus)},
          {"min_jpp", number(s.min_jpp)}};
}

inline json to_json(const GrowthReport& g) {
  json trials = json::array();
  for (const GrowthTrial& t : g.trials) {
    trials.push_back({{"h", to_json(t.h)},
                      {"deficit", number(t.deficit)},
                      {"norm_sq", number(t.norm_sq)},
                      {"bound", number(t.bound)},
                      {"passed", t.passed}});
  }
  return {{"gamma", number(g.gamma)},
          {"coercivity", number(g.coercivity)},
          {"safety", number(g.safety)},
          {"amplitude", number(g.amplitude)},
          {"seed", g.seed},
          {"trials", trials},
          {"min_ratio", number(g.min_ratio)},
          {"all_passed", g.all_passed}};
}

inline json to_json(const AnnulusEnergy& a) {
  return {{"quadrature", number(a.quadrature)}, {"closed_form", number(a.closed_form)}, {"gap", number(a.gap)}};
}

inline json to_json(const AnnulusExperiment& ex) {
  json rows = json::array();
  for (const AnnulusRow& r : ex.rows) {
    rows.push_back({{"eps", number(r.eps)},
                    {"mu", number(r.mu)},
                    {"dP", number(r.dP)},
                    {"dE", number(r.dE)},
                    {"deficit", number(r.deficit)},
                    {"l1_distance", number(r.l1_distance)}});
  }
  json j = {{"d", ex.d},
            {"gamma", number(ex.gamma)},
            {"eps_grid", number_array(ex.eps_grid)},
            {"rows", rows},
            {"sign_changes", ex.sign_changes},
            {"ball_volume", number(ex.ball_volume)},
            {"bracket_check", to_json(ex.bracket_check)}};
  j["crossover"] = ex.crossover ? number(*ex.crossover) : json(nullptr);
  return j;
}

inline json to_json(const AsymptoticSlopes& s) {
  return {{"p_order", number(s.p_order)},
          {"e_order", number(s.e_order)},
          {"log_model_residual", number(s.log_model_residual)},
          {"p_constant", number(s.p_constant)},
          {"e_constant", number(s.e_constant)}};
}

// ---------------------------------------------------------------- CSV

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_comment(const std::string& line) { comments_.push_back(line); }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw DomainError("CsvTable: row width does not match the header");
    rows_.push_back(std::move(cells));
  }

  std::string str() const {
    std::string out;
    for (const std::string& c : comments_) out += "# " + c + "\n";
    append_row(out, header_);
    for (const auto& r : rows_) append_row(out, r);
    return out;
  }

  std::size_t size() const noexcept { return rows_.size(); }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }

  static void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ",";
      out += quote(cells[i]);
    }
    out += "\n";
  }

  std::vector<std::string> header_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

/// "a0;c1;s1;c2;s2;..." for a single CSV cell.
inline std::string perturbation_cell(const BoundaryPerturbation& h) {
  std::string s = format_double(h.a0());
  for (int k = 1; k <= h.modes(); ++k) s += ";" + format_double(h.a(k)) + ";" + format_double(h.b(k));
  return s;
}

inline BoundaryPerturbation perturbation_from_cell(const std::string& cell) {
  std::vector<double> v;
  std::stringstream ss(cell);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("perturbation_from_cell: bad number '" + item + "'");
    }
    if (used != item.size()) throw DomainError("perturbation_from_cell: bad number '" + item + "'");
    v.push_back(x);
  }
  if (v.empty() || v.size() % 2 == 0) throw DomainError("perturbation_from_cell: expected a0 followed by (cos, sin) pairs");
  std::vector<double> c, s;
  for (std::size_t i = 1; i < v.size(); i += 2) {
    c.push_back(v[i]);
    s.push_back(v[i + 1]);
  }
  return {v[0], std::move(c), std::move(s)};
}

inline CsvTable fd_csv(const std::vector<FdSuiteEntry>& entries) {
  CsvTable t({"functional", "mode", "fd", "analytic", "rel_gap", "order", "order_status", "passed"});
  for (const FdSuiteEntry& e : entries) {
    t.add_row({e.report.functional.label(), e.direction, format_double(e.report.j0pp_fd),
               format_double(e.report.j0pp_analytic), format_double(e.report.rel_gap),
               format_double(e.report.richardson_order), e.report.order_status, entry_passes(e) ? "true" : "false"});
  }
  return t;
}

inline CsvTable annulus_csv(const AnnulusExperiment& ex) {
  CsvTable t({"eps", "dP", "dE", "deficit", "l1_distance"});
  for (const AnnulusRow& r : ex.rows) {
    t.add_row({format_double(r.eps), format_double(r.dP), format_double(r.dE), format_double(r.deficit),
               format_double(r.l1_distance)});
  }
  return t;
}

inline CsvTable spectrum_csv(const QuadraticFormSpectrum& s) {
  CsvTable t({"k", "c_k", "multiplicity"});
  for (int k = 0; k <= s.K; ++k) {
    t.add_row({std::to_string(k), format_double(s.at(k)), std::to_string(harmonic_dim(s.d, k))});
  }
  return t;
}

inline CsvTable threshold_csv(const ThresholdReport& r) {
  CsvTable t({"k", "tau_k"});
  for (int k = 2; k <= r.K; ++k) t.add_row({std::to_string(k), format_double(r.tau_at(k))});
  return t;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path + "' failed");
}

inline std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace shl
