// shl: command-line reports for the ball stability toolkit.
//
//   shl --cmd thresholds --pair PE --dim 2 --modes 100
//   shl --cmd verify --fd-step 1e-3 --format csv
//   shl --config report.json          (reruns an emitted report's config)
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "shl/shl.hpp"

namespace {

using shl::json;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  int d = 2;
  int K = 100;
  std::string pair;  // resolved per command when empty
  bool lagrangian = false;
  double t = 0.0;
  std::optional<double> gamma;
  std::optional<double> sobolev;
  std::optional<double> penalty;
  double fd_step = 1.0;
  double amplitude = 0.05;
  std::string suite = "fd";
  std::string h;  // "a0;c1;s1;c2;s2;..."
  int trials = 20;
  int samples = 5;
  double eps_max = 0.1;
  double eps_min = 1e-6;
  int per_decade = 4;
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 20261016;
  std::string lambda_form = "verified";
};

json opt_json(const std::optional<double>& v) { return v ? shl::number(*v) : json(nullptr); }

json config_json(const RunConfig& c) {
  return {{"command", c.command},   {"d", c.d},
          {"K", c.K},               {"pair", c.pair},
          {"lagrangian", c.lagrangian}, {"t", shl::number(c.t)},
          {"gamma", opt_json(c.gamma)}, {"sobolev", opt_json(c.sobolev)},
          {"penalty", opt_json(c.penalty)}, {"fd_step", shl::number(c.fd_step)},
          {"amplitude", shl::number(c.amplitude)}, {"suite", c.suite},
          {"direction", c.h},               {"trials", c.trials},
          {"samples", c.samples},   {"eps_max", shl::number(c.eps_max)},
          {"eps_min", shl::number(c.eps_min)}, {"per_decade", c.per_decade},
          {"format", c.format},     {"out", c.out},
          {"seed", c.seed},         {"lambda_form", c.lambda_form}};
}

void apply_config(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  const json& cfg = j.contains("config") && j.contains("version") ? j.at("config") : j;
  auto opt = [](const json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return shl::read_number(v);
  };
  try {
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (k == "command") c.command = v.get<std::string>();
      else if (k == "d") c.d = v.get<int>();
      else if (k == "K") c.K = v.get<int>();
      else if (k == "pair") c.pair = v.get<std::string>();
      else if (k == "lagrangian") c.lagrangian = v.get<bool>();
      else if (k == "t") c.t = shl::read_number(v);
      else if (k == "gamma") c.gamma = opt(v);
      else if (k == "sobolev") c.sobolev = opt(v);
      else if (k == "penalty") c.penalty = opt(v);
      else if (k == "fd_step") c.fd_step = shl::read_number(v);
      else if (k == "amplitude") c.amplitude = shl::read_number(v);
      else if (k == "suite") c.suite = v.get<std::string>();
      else if (k == "direction") c.h = v.get<std::string>();
      else if (k == "trials") c.trials = v.get<int>();
      else if (k == "samples") c.samples = v.get<int>();
      else if (k == "eps_max") c.eps_max = shl::read_number(v);
      else if (k == "eps_min") c.eps_min = shl::read_number(v);
      else if (k == "per_decade") c.per_decade = v.get<int>();
      else if (k == "format") c.format = v.get<std::string>();
      else if (k == "out") c.out = v.get<std::string>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "lambda_form") c.lambda_form = v.get<std::string>();
      else throw ValidationError("config: unknown field '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  } catch (const shl::DomainError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

bool is_pair_code(const std::string& s) { return s == "PE" || s == "PL" || s == "EL" || s == "LE"; }

bool is_functional_name(const std::string& s) {
  return s == "V" || s == "Vol" || s == "P" || s == "E" || s == "L" || s == "Lambda1";
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

/// Fills command defaults and checks ranges. The result is what reports embed.
void resolve(RunConfig& c) {
  static const char* commands[] = {"spectra", "thresholds", "coercivity", "verify", "counterexample", "penalty"};
  bool known = false;
  for (const char* name : commands) known = known || c.command == name;
  require(known, "--cmd must be one of spectra, thresholds, coercivity, verify, counterexample, penalty");
  require(c.d >= 2 && c.d <= 20, "--dim must lie in [2, 20]");
  require(c.K >= 2 && c.K <= 2000, "--modes must lie in [2, 2000]");
  require(std::isfinite(c.t) && std::abs(c.t) <= 1e6, "--t must be finite with |t| <= 1e6");
  require(c.fd_step > 0.0 && c.fd_step <= 2.0, "--fd-step must lie in (0, 2]");
  require(c.amplitude > 0.0 && c.amplitude <= 0.2, "--amplitude must lie in (0, 0.2]");
  require(c.trials >= 1 && c.trials <= 1000, "--trials must lie in [1, 1000]");
  require(c.samples >= 2 && c.samples <= 101, "--samples must lie in [2, 101]");
  require(c.per_decade >= 1 && c.per_decade <= 50, "--per-decade must lie in [1, 50]");
  require(c.format == "json" || c.format == "csv", "--format must be json or csv");
  require(c.lambda_form == "verified" || c.lambda_form == "printed", "--lambda-form must be verified or printed");
  require(c.suite == "fd" || c.suite == "pl" || c.suite == "growth" || c.suite == "scan",
          "--suite must be fd, pl, growth or scan");

  if (c.pair.empty()) {
    if (c.command == "spectra" || c.command == "penalty") c.pair = "P";
    else if (c.command == "verify" && c.suite == "fd") c.pair = "";
    else c.pair = "PE";
  }
  if (c.command == "thresholds" || (c.command == "verify" && c.suite == "scan")) {
    require(is_pair_code(c.pair), "--pair must be PE, PL, EL or LE for this command");
  } else if (c.command == "spectra" || c.command == "coercivity" || c.command == "penalty") {
    require(is_pair_code(c.pair) || is_functional_name(c.pair), "--pair must be PE, PL, EL, LE or one of V, P, E, L");
  } else if (c.command == "verify" && c.suite == "fd") {
    require(c.pair.empty() || is_pair_code(c.pair) || is_functional_name(c.pair),
            "--pair must be PE, PL, EL, LE or one of V, P, E, L");
  }
  if (c.command == "verify") require(c.d == 2, "verify runs on the unit disk: --dim must be 2");
  if (c.command == "counterexample") {
    if (!c.gamma) c.gamma = -0.1;
    require(c.eps_min > 0.0 && c.eps_min < c.eps_max && c.eps_max <= 0.5, "need 0 < --eps-min < --eps-max <= 0.5");
  }
  if (c.command == "verify" && c.suite == "growth" && !c.gamma) c.gamma = -8.0;
  if (c.gamma) require(std::isfinite(*c.gamma) && std::abs(*c.gamma) <= 1e6, "--gamma must be finite with |gamma| <= 1e6");
  if (c.sobolev) require(*c.sobolev >= 0.0 && *c.sobolev <= 4.0, "--sobolev must lie in [0, 4]");
  if (c.penalty) require(std::isfinite(*c.penalty) && *c.penalty >= 0.0, "--penalty must be finite and >= 0");
  if (!c.h.empty()) {
    try {
      const shl::BoundaryPerturbation h = shl::perturbation_from_cell(c.h);
      require(h.is_star_shaped(), "--direction must describe a star-shaped domain r = 1 + h > 0");
      c.h = shl::perturbation_cell(h);
    } catch (const shl::DomainError& e) {
      throw ValidationError(std::string("--direction: ") + e.what());
    }
  }
}

shl::Lambda1Form form_of(const RunConfig& c) { return shl::parse_lambda1_form(c.lambda_form); }

shl::FunctionalCombo base_combo(const RunConfig& c) {
  if (is_pair_code(c.pair)) return shl::pair_combo(shl::parse_pair(c.pair), c.t);
  return shl::FunctionalCombo::single(shl::parse_functional(c.pair));
}

/// Lagrangian spectrum of the pair family at t, or of a single functional.
shl::QuadraticFormSpectrum base_lagrangian(const RunConfig& c) {
  return shl::lagrangian_spectrum(base_combo(c), c.d, c.K, shl::MultiplierConvention::Add, form_of(c));
}

shl::BoundaryPerturbation direction_or(const RunConfig& c, const shl::BoundaryPerturbation& fallback) {
  return c.h.empty() ? fallback : shl::perturbation_from_cell(c.h);
}

struct Output {
  json result;
  std::optional<shl::CsvTable> table;
};

Output run_spectra(const RunConfig& c) {
  shl::QuadraticFormSpectrum s;
  if (is_pair_code(c.pair) || c.lagrangian) {
    s = base_lagrangian(c);
  } else {
    s = shl::raw_spectrum(shl::parse_functional(c.pair), c.d, c.K, form_of(c));
  }
  return {shl::to_json(s), shl::spectrum_csv(s)};
}

Output run_thresholds(const RunConfig& c) {
  const shl::ThresholdReport r = shl::threshold(shl::parse_pair(c.pair), c.d, c.K, form_of(c));
  return {shl::to_json(r), shl::threshold_csv(r)};
}

Output run_coercivity(const RunConfig& c) {
  const shl::QuadraticFormSpectrum s = base_lagrangian(c);
  const double sob = c.sobolev ? *c.sobolev : shl::natural_s2(base_combo(c));
  json res = {{"spectrum_label", s.label}, {"sobolev", shl::number(sob)}, {"subspace", "tangent_modes"}};
  const bool positive = shl::positivity_check(s, shl::Subspace::TangentModes);
  res["positive"] = positive;
  shl::CsvTable table({"k", "c_k", "ratio"});
  if (positive) {
    res["coercivity"] = shl::to_json(shl::coercivity_constant(s, sob, shl::Subspace::TangentModes));
    res["coercivity_s0"] = shl::to_json(shl::coercivity_constant(s, 0.0, shl::Subspace::TangentModes));
  } else {
    res["coercivity"] = nullptr;
    res["coercivity_s0"] = nullptr;
  }
  for (int k = 2; k <= s.K; ++k) {
    table.add_row({std::to_string(k), shl::format_double(s.at(k)),
                   shl::format_double(s.at(k) / std::pow(1.0 + double(k) * k, sob))});
  }
  return {res, table};
}

Output run_penalty(const RunConfig& c) {
  const shl::QuadraticFormSpectrum base = base_lagrangian(c);
  const double minimal = shl::minimal_penalty(base);
  const double C = c.penalty ? *c.penalty : 2.0 * minimal;
  const shl::QuadraticFormSpectrum pen = shl::penalized_spectrum(base, shl::PenaltySpec(C, 0.0, {}));
  double min_c = pen.at(0);
  for (double v : pen.c) min_c = std::min(min_c, v);
  json res = {{"minimal_penalty", shl::number(minimal)},
              {"C", shl::number(C)},
              {"min_c_k", shl::number(min_c)},
              {"positive_all_modes", shl::positivity_check(pen, shl::Subspace::AllModes)},
              {"spectrum", shl::to_json(pen)}};
  return {res, shl::spectrum_csv(pen)};
}

Output run_counterexample(const RunConfig& c) {
  const shl::AnnulusExperiment ex =
      shl::run_annulus_experiment(c.d, *c.gamma, shl::log_grid(c.eps_max, c.eps_min, c.per_decade));
  json res = {{"experiment", shl::to_json(ex)}};
  const double eps_slope = std::max(c.eps_min, 1e-3);
  if (2.0 * eps_slope <= 0.5) {
    res["slopes"] = shl::to_json(shl::asymptotic_slopes(c.d, eps_slope));
    res["slopes_eps"] = shl::number(eps_slope);
  }
  return {res, shl::annulus_csv(ex)};
}

Output run_verify(const RunConfig& c) {
  using BP = shl::BoundaryPerturbation;
  if (c.suite == "fd") {
    std::vector<shl::FdSuiteEntry> entries;
    if (c.h.empty() && c.pair.empty()) {
      entries = shl::fd_suite(c.fd_step, c.amplitude);
    } else {
      const BP h = direction_or(c, BP::mode(2, c.amplitude));
      std::vector<shl::FunctionalCombo> combos;
      if (c.pair.empty()) {
        for (auto f : {shl::Functional::Vol, shl::Functional::P, shl::Functional::E, shl::Functional::Lambda1}) {
          combos.push_back(shl::FunctionalCombo::single(f));
        }
      } else if (is_pair_code(c.pair) || c.lagrangian) {
        combos.push_back(shl::lagrangian_combo(base_combo(c), 2));
      } else {
        combos.push_back(base_combo(c));
      }
      for (const auto& combo : combos) {
        entries.push_back({c.h.empty() ? "cos2" : c.h, shl::second_derivative_fd(combo, h, c.fd_step), false});
      }
    }
    json rows = json::array();
    bool all = true;
    for (const auto& e : entries) {
      rows.push_back(shl::to_json(e));
      all = all && shl::entry_passes(e);
    }
    return {{{"entries", rows}, {"all_passed", all}}, shl::fd_csv(entries)};
  }
  if (c.suite == "pl") {
    const shl::PlAdjudication a = shl::adjudicate_pl_threshold(direction_or(c, BP::mode(2, 0.05)), c.fd_step, c.K);
    shl::CsvTable t({"t", "jpp_fd"});
    for (const auto& s : a.scan) t.add_row({shl::format_double(s.t), shl::format_double(s.jpp)});
    return {shl::to_json(a), t};
  }
  if (c.suite == "growth") {
    const shl::GrowthReport g = shl::quadratic_growth_trials(*c.gamma, c.trials, c.seed, c.amplitude);
    shl::CsvTable t({"trial", "deficit", "norm_sq", "bound", "passed"});
    for (std::size_t i = 0; i < g.trials.size(); ++i) {
      const auto& tr = g.trials[i];
      t.add_row({std::to_string(i), shl::format_double(tr.deficit), shl::format_double(tr.norm_sq),
                 shl::format_double(tr.bound), tr.passed ? "true" : "false"});
    }
    return {shl::to_json(g), t};
  }
  const shl::PathScan s =
      shl::lagrangian_path_scan(base_combo(c), direction_or(c, BP::mode(2, c.amplitude)), c.samples);
  shl::CsvTable t({"t", "jpp"});
  for (const auto& p : s.samples) t.add_row({shl::format_double(p.t), shl::format_double(p.jpp)});
  return {shl::to_json(s), t};
}

Output dispatch(const RunConfig& c) {
  if (c.command == "spectra") return run_spectra(c);
  if (c.command == "thresholds") return run_thresholds(c);
  if (c.command == "coercivity") return run_coercivity(c);
  if (c.command == "penalty") return run_penalty(c);
  if (c.command == "counterexample") return run_counterexample(c);
  return run_verify(c);
}

void emit(const RunConfig& c, const Output& o) {
  const json cfg = config_json(c);
  std::string text;
  if (c.format == "csv" && o.table) {
    shl::CsvTable table = *o.table;
    table.add_comment(std::string("shl ") + shl::kVersion);
    std::string compact = shl::to_canonical_string(cfg, 0);
    compact.pop_back();
    table.add_comment("config " + compact);
    text = table.str();
  } else {
    text = shl::to_canonical_string({{"version", shl::kVersion}, {"config", cfg}, {"result", o.result}});
  }
  if (c.out.empty()) {
    std::cout << text;
  } else {
    shl::write_text(c.out, text);
  }
}

std::string error_type(const shl::Error& e) {
  if (dynamic_cast<const shl::ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const shl::InvalidDomain*>(&e)) return "invalid_domain";
  if (dynamic_cast<const shl::IllConditioned*>(&e)) return "ill_conditioned";
  if (dynamic_cast<const shl::BracketFailure*>(&e)) return "bracket_failure";
  if (dynamic_cast<const shl::SpuriousMode*>(&e)) return "spurious_mode";
  if (dynamic_cast<const shl::InconclusiveTail*>(&e)) return "inconclusive_tail";
  if (dynamic_cast<const shl::InvariantViolation*>(&e)) return "invariant_violation";
  if (dynamic_cast<const shl::DegenerateCoefficient*>(&e)) return "degenerate_coefficient";
  return "error";
}

void diagnostic(const char* kind, const std::string& type, const std::string& message) {
  std::cerr << shl::to_canonical_string({{"error", kind}, {"type", type}, {"message", message}}, 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order stability reports for volume-constrained shape functionals at the ball"};
  RunConfig cli;
  std::string config_path;
  double gamma = 0.0, sobolev = 0.0, penalty = 0.0;

  app.add_option("--config", config_path, "JSON config or a previously emitted JSON report");
  app.add_option("--cmd", cli.command, "spectra | thresholds | coercivity | verify | counterexample | penalty");
  app.add_option("--dim", cli.d, "Dimension d");
  app.add_option("--modes", cli.K, "Truncation K");
  app.add_option("--pair", cli.pair, "PE | PL | EL | LE, or a functional V | P | E | L");
  app.add_flag("--lagrangian", cli.lagrangian, "Use the Lagrangian of a single functional");
  app.add_option("--t", cli.t, "Family parameter t");
  app.add_option("--gamma", gamma, "Energy weight for counterexample and growth trials");
  app.add_option("--sobolev", sobolev, "Sobolev index for coercivity (default: natural index)");
  app.add_option("--penalty", penalty, "Penalty weight C (default: twice the minimal weight)");
  app.add_option("--fd-step", cli.fd_step, "FD path-parameter step");
  app.add_option("--amplitude", cli.amplitude, "Amplitude of FD and random perturbations");
  app.add_option("--suite", cli.suite, "verify suite: fd | pl | growth | scan");
  app.add_option("--direction", cli.h, "Perturbation 'a0;c1;s1;c2;s2;...'");
  app.add_option("--trials", cli.trials, "Growth trials");
  app.add_option("--samples", cli.samples, "Path-scan samples");
  app.add_option("--eps-max", cli.eps_max, "Largest hole radius");
  app.add_option("--eps-min", cli.eps_min, "Smallest hole radius");
  app.add_option("--per-decade", cli.per_decade, "Grid points per decade");
  app.add_option("--format", cli.format, "json | csv");
  app.add_option("--out", cli.out, "Output file (default stdout)");
  app.add_option("--seed", cli.seed, "Seed for randomized suites");
  app.add_option("--lambda-form", cli.lambda_form, "verified | printed eigenvalue Hessian");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnostic("validation", "parse", e.what());
    return 2;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) apply_config(cfg, json::parse(shl::read_text(config_path)));
  } catch (const json::parse_error& e) {
    diagnostic("validation", "config", e.what());
    return 2;
  } catch (const std::exception& e) {
    diagnostic("validation", "config", e.what());
    return 2;
  }
  // Explicit flags override the config file.
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--cmd")) cfg.command = cli.command;
  if (given("--dim")) cfg.d = cli.d;
  if (given("--modes")) cfg.K = cli.K;
  if (given("--pair")) cfg.pair = cli.pair;
  if (given("--lagrangian")) cfg.lagrangian = cli.lagrangian;
  if (given("--t")) cfg.t = cli.t;
  if (given("--gamma")) cfg.gamma = gamma;
  if (given("--sobolev")) cfg.sobolev = sobolev;
  if (given("--penalty")) cfg.penalty = penalty;
  if (given("--fd-step")) cfg.fd_step = cli.fd_step;
  if (given("--amplitude")) cfg.amplitude = cli.amplitude;
  if (given("--suite")) cfg.suite = cli.suite;
  if (given("--direction")) cfg.h = cli.h;
  if (given("--trials")) cfg.trials = cli.trials;
  if (given("--samples")) cfg.samples = cli.samples;
  if (given("--eps-max")) cfg.eps_max = cli.eps_max;
  if (given("--eps-min")) cfg.eps_min = cli.eps_min;
  if (given("--per-decade")) cfg.per_decade = cli.per_decade;
  if (given("--format")) cfg.format = cli.format;
  if (given("--out")) cfg.out = cli.out;
  if (given("--seed")) cfg.seed = cli.seed;
  if (given("--lambda-form")) cfg.lambda_form = cli.lambda_form;

  try {
    resolve(cfg);
  } catch (const ValidationError& e) {
    diagnostic("validation", "range", e.what());
    return 2;
  }

  try {
    emit(cfg, dispatch(cfg));
  } catch (const ValidationError& e) {
    diagnostic("validation", "range", e.what());
    return 2;
  } catch (const shl::DomainError& e) {
    diagnostic("validation", "domain", e.what());
    return 2;
  } catch (const shl::Error& e) {
    diagnostic("numerical", error_type(e), e.what());
    return 3;
  } catch (const std::exception& e) {
    diagnostic("numerical", "exception", e.what());
    return 3;
  }
  return 0;
}
