// kit: command-line front end.
//
//   kit [--threads N] [--output report.json] [--json] <command> ...
//
// Exit codes: 0 pass, 1 verification failure, 2 input error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kit/kit.hpp"

using namespace kit;
using kit::InputError;

namespace {

constexpr const char* schema_id = "kit-report/1";
constexpr std::size_t max_listed = 50;

struct Outcome {
  bool pass = true;
  json result = json::object();
  std::string summary;
};

struct Global {
  std::string output;
  bool print_json = false;
  bool timing = false;
  unsigned threads = 0;
};

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt(double x, int prec = 10) {
  std::ostringstream s;
  s << std::setprecision(prec) << x;
  return s.str();
}

json violations_json(const CheckReport& r) {
  json list = json::array();
  for (const auto& v : r.violations) {
    if (list.size() >= max_listed) break;
    json e{{"arity", v.arity}, {"inputs", v.inputs}, {"residual", v.residual_text}};
    if (v.k >= 0) e["k"] = v.k, e["l"] = v.l;
    list.push_back(e);
  }
  return json{{"ok", r.ok()},
              {"max_arity", r.max_arity},
              {"tuples_checked", r.tuples_checked},
              {"violation_count", r.violations.size()},
              {"violations", list}};
}

json closedness_json(const ClosednessReport& r) {
  return json{{"ok", r.closed}, {"checked_arity", r.checked_arity}, {"residual", r.residual}};
}

std::string pair_name(const AInftyStructure& A, std::pair<int, int> p) { return io::pair_label(A.objects(), p.first, p.second); }

// ---------------------------------------------------------------------------

Outcome cmd_check(const std::string& path, int max_arity, std::optional<int> trunc) {
  auto A = std::make_shared<const AInftyStructure>(io::load_structure(path, trunc));
  Outcome o;
  std::ostringstream txt;
  auto assoc = check_associativity(*A, max_arity);
  o.result["structure"] = json{{"objects", A->objects()}, {"rank", A->hom().size()}, {"trunc_order", A->trunc_order()},
                               {"curved", A->curved()}, {"cy_dim", A->cy_dim()}};
  o.result["associativity"] = violations_json(assoc);
  txt << "associativity (arity <= " << max_arity << "): " << assoc.tuples_checked << " tuples, " << assoc.violations.size() << " violations\n";
  for (std::size_t n = 0; n < std::min<std::size_t>(assoc.violations.size(), 10); ++n)
    txt << "  " << assoc.violations[n].inputs << " -> " << assoc.violations[n].residual_text << "\n";
  o.pass = assoc.ok();
  if (assoc.ok()) {
    auto diag = check_bimodule(diagonal_bimodule(A), max_arity);
    auto dual = check_bimodule(dual_diagonal_bimodule(A), max_arity);
    o.result["diagonal"] = violations_json(diag);
    o.result["dual_diagonal"] = violations_json(dual);
    txt << "diagonal bimodule: " << diag.violations.size() << " violations\n";
    txt << "dual diagonal bimodule: " << dual.violations.size() << " violations\n";
    o.pass = o.pass && diag.ok() && dual.ok();
  } else {
    o.result["diagonal"] = json{{"skipped", "associativity fails"}};
    o.result["dual_diagonal"] = json{{"skipped", "associativity fails"}};
  }
  json units = json::array();
  bool all_units = false;
  try {
    auto u = find_cohomological_unit(*A);
    all_units = u.all_found();
    for (std::size_t x = 0; x < u.units.size(); ++x) {
      json e{{"object", A->objects()[x]}, {"found", u.units[x].has_value()}};
      if (u.units[x]) e["unit"] = render(*u.units[x], [&](int g) { return A->label(g); });
      else e["reason"] = u.absence[x];
      units.push_back(e);
    }
  } catch (const StructuralError& e) {
    units.push_back(json{{"object", nullptr}, {"found", false}, {"reason", e.what()}});
  }
  o.result["units"] = json{{"ok", all_units}, {"objects", units}};
  txt << "cohomological unit: " << (all_units ? "found for every object" : "missing") << "\n";
  o.pass = o.pass && all_units;
  o.summary = txt.str();
  return o;
}

Outcome cmd_total(const std::vector<std::string>& files, int max_arity) {
  auto A = std::make_shared<const AInftyStructure>(io::load_structure(files[0]));
  auto B = std::make_shared<const AInftyStructure>(io::load_structure(files[1]));
  auto Q = std::make_shared<const LinearFunctor>(io::functor_from_json(io::read_json(files[2]), A, B, files[2]));
  TotalInputs in = prepare_total(A, Q, B);
  in.delta = io::morphism_from_json(io::read_json(files[3]), in.dual_diag, in.diag, files[3]);
  in.h = io::morphism_from_json(io::read_json(files[4]), in.dual_diag, in.pulled, files[4]);
  if (in.delta.degree() != A->cy_dim()) throw InputError(files[3] + ": delta must have degree n = " + std::to_string(A->cy_dim()));
  if (in.h.degree() != A->cy_dim() - 1) throw InputError(files[4] + ": h must have degree n - 1 = " + std::to_string(A->cy_dim() - 1));
  auto rep = verify_total(in, max_arity);
  Outcome o;
  json failed = json::array();
  if (!rep.delta_closed.closed) failed.push_back("delta");
  if (!rep.functor.ok() || !rep.rho_closed.closed) failed.push_back("rho");
  if (!rep.h_equation.closed) failed.push_back("h");
  if (!rep.total.ok()) failed.push_back("total");
  if (!rep.acyclic) failed.push_back("acyclicity");
  o.result["failed"] = failed;
  o.result["delta_closed"] = closedness_json(rep.delta_closed);
  o.result["functor"] = violations_json(rep.functor);
  o.result["rho_closed"] = closedness_json(rep.rho_closed);
  o.result["h_equation"] = closedness_json(rep.h_equation);
  o.result["total_relations"] = violations_json(rep.total);
  json pairs = json::array();
  for (const auto& [p, H] : rep.q0_homology) {
    bool zero = true;
    for (const auto& [k, g] : H) zero = zero && g.is_zero();
    pairs.push_back(json{{"pair", pair_name(*A, p)}, {"acyclic", zero}, {"homology", io::homology_to_json(H)}});
  }
  o.result["q0_acyclicity"] = json{{"ok", rep.acyclic}, {"pairs", pairs}};
  if (!rep.q0_error.empty()) o.result["q0_acyclicity"]["error"] = rep.q0_error;
  o.pass = rep.ok() && rep.equations_ok();
  std::ostringstream txt;
  txt << "d delta = 0: " << (rep.delta_closed.closed ? "yes" : "NO") << "\n";
  txt << "Q strict functor, d rho = 0: " << (rep.functor.ok() && rep.rho_closed.closed ? "yes" : "NO") << "\n";
  txt << "d h = rho o delta: " << (rep.h_equation.closed ? "yes" : "NO") << "\n";
  for (const auto& s : rep.h_equation.residual) txt << "  " << s << "\n";
  txt << "total bimodule relations: " << rep.total.violations.size() << " violations\n";
  txt << "q=0 acyclic on every pair: " << (rep.acyclic ? "yes" : "NO") << "\n";
  o.summary = txt.str();
  return o;
}

Outcome cmd_signs(int max_index, int max_n, int max_degree, bool mutate) {
  signs::SignMutation mut;
  mut.drop_k_in_star_iv = mutate;
  auto sw = signs::splitting_sweep(max_index, max_n, max_degree, mut);
  Outcome o;
  json ex = json::array();
  for (const auto& f : sw.examples) ex.push_back(json{{"stratum", f.d.str()}, {"n", f.v.n}, {"degrees", f.v.x}});
  o.result["sweep"] = json{{"ok", sw.ok()},
                           {"max_index", max_index},
                           {"max_n", max_n},
                           {"max_degree", max_degree},
                           {"mutated", mutate},
                           {"instances", sw.instances},
                           {"descriptors", sw.descriptors},
                           {"skipped_out_of_range", sw.skipped},
                           {"failures", sw.failures},
                           {"remainder_mismatches", sw.remainder_mismatches},
                           {"examples", ex}};
  std::ostringstream txt;
  txt << "splitting sweep: " << sw.instances << " instances, " << sw.failures << " failures, " << sw.remainder_mismatches
      << " remainder mismatches\n";
  json sym = json::array();
  for (auto p : {signs::Pairing::shift, signs::Pairing::reflect}) {
    auto r = signs::symmetry_report(p);
    json per = json::object();
    for (int c = 0; c < 4; ++c)
      per[signs::case_name(signs::Case(c))] = json{{"pass", r.pass[std::size_t(c)]}, {"fail", r.fail[std::size_t(c)]}, {"unmatched", r.unmatched[std::size_t(c)]}};
    json e = json::array();
    for (const auto& d : r.examples) e.push_back(d.str());
    sym.push_back(json{{"pairing", signs::pairing_name(p)}, {"holds", r.holds()}, {"cases", per}, {"examples", e}});
    txt << "symmetry (" << signs::pairing_name(p) << " pairing, informational): " << r.total_fail() << " mismatches\n";
  }
  o.result["symmetry_open_question"] = sym;
  o.pass = sw.ok();
  o.summary = txt.str();
  return o;
}

strip::StripProblem load_strip(const std::string& path) { return io::strip_from_json(io::read_json(path), path); }

Outcome cmd_gamma(const std::string& path, int levels, double tail_tol, double rel_tol, double enlarge, const std::string& glue,
                  const std::vector<double>& lengths) {
  auto P = load_strip(path);
  strip::GammaOptions opt;
  opt.levels = levels;
  opt.tail_tolerance = tail_tol;
  Outcome o;
  std::ostringstream txt;
  auto g = strip::gamma_pde(P, opt);
  json hist = json::array();
  for (const auto& h : g.history) hist.push_back(json{{"h_s", h.h_s}, {"gamma", num(h.gamma)}, {"tail_drift", num(h.tail_drift)}});
  o.result["problem"] = io::strip_to_json(P);
  o.result["gamma"] = num(g.gamma);
  o.result["sign"] = g.sign();
  o.result["history"] = hist;
  o.result["sign_stable_under_refinement"] = g.sign_stable();
  txt << "Gamma (pde, " << levels << " levels) = " << fmt(g.gamma, 12) << "\n";
  o.pass = g.sign_stable() && g.sign() != 0;

  auto W = P;
  const double grow = enlarge * (P.s_max - P.s_min) / 2;
  W.s_min -= grow;
  W.s_max += grow;
  auto gw = strip::gamma_pde(W, opt);
  o.result["enlarged_window"] = json{{"window", {W.s_min, W.s_max}}, {"gamma", num(gw.gamma)}, {"sign_agrees", gw.sign() == g.sign()}};
  txt << "Gamma on window [" << W.s_min << ", " << W.s_max << "] = " << fmt(gw.gamma, 12) << "\n";
  o.pass = o.pass && gw.sign() == g.sign();

  if (P.b.t_independent() && P.c.t_independent()) {
    const double q = strip::gamma_quadrature(P);
    const double rel = std::fabs(g.gamma - q) / std::max(std::fabs(q), 1e-300);
    o.result["quadrature"] = json{{"gamma", num(q)}, {"relative_error", num(rel)}, {"tolerance", rel_tol}, {"ok", rel < rel_tol}};
    txt << "Gamma (quadrature) = " << fmt(q, 12) << ", relative difference " << fmt(rel, 3) << "\n";
    o.pass = o.pass && rel < rel_tol;
  } else {
    o.result["quadrature"] = nullptr;
  }

  if (!glue.empty()) {
    auto P2 = load_strip(glue);
    auto sr = strip::scaling_report(P, P2, lengths, opt);
    json rows = json::array();
    for (const auto& r : sr.rows)
      rows.push_back(json{{"g", r.g}, {"gamma_glued", num(r.gamma_glued)}, {"rescaled", num(r.rescaled)}, {"ratio", num(r.ratio)}, {"deviation", num(r.deviation)}});
    o.result["gluing"] = json{{"partner", glue},        {"lambda0", sr.lambda0},       {"gamma_reference", num(sr.gamma_reference)},
                              {"rows", rows},           {"monotone", sr.monotone()}, {"sign_persists", sr.sign_persists()}};
    txt << "gluing: lambda0 = " << fmt(sr.lambda0) << "\n   g        Gamma(glued)     ratio            deviation\n";
    for (const auto& r : sr.rows)
      txt << "  " << std::setw(6) << r.g << "  " << std::setw(15) << fmt(r.gamma_glued) << "  " << std::setw(15) << fmt(r.ratio) << "  "
          << fmt(r.deviation, 3) << "\n";
    txt << "  monotone: " << (sr.monotone() ? "yes" : "NO") << ", sign persists: " << (sr.sign_persists() ? "yes" : "NO") << "\n";
    o.pass = o.pass && sr.monotone() && sr.sign_persists();
  }
  o.summary = txt.str();
  return o;
}

Outcome cmd_morse(const std::string& path, int points, const morse::ScanOptions& opt, double residual_tol) {
  auto in = io::flow_from_json(io::read_json(path), path);
  if (auto e = morse::validate(in.spec, in.r_grid); !e.empty()) throw InputError(path + ": " + e);
  auto u = morse::explicit_upsilon(in.spec.profile, points);
  auto rep = morse::scan_connecting_orbits(in.spec, in.r_grid, opt);
  const double C = rep.drift_constant;
  auto sgn = [](double x) { return x > 0 ? 1 : x < 0 ? -1 : 0; };
  const bool sign_ok = sgn(u.leading) == sgn(C);
  const bool res_ok = u.residual < residual_tol;
  const bool orbits_ok = !rep.small_r_regime || rep.count() == 0;
  Outcome o;
  json shots = json::array();
  for (const auto& s : rep.shots) {
    json e{{"r", s.r}, {"outcome", morse::outcome_name(s.outcome)}, {"exists", s.exists()}, {"w_end", num(s.w_end)}, {"s_end", num(s.s_end)}};
    e["target"] = num(s.target);
    shots.push_back(e);
  }
  o.result["upsilon"] = json{{"points", points},          {"residual", num(u.residual)}, {"residual_tolerance", residual_tol},
                             {"leading", num(u.leading)}, {"kappa", num(u.kappa)},       {"left_value", num(u.left_value)}};
  o.result["drift_constant"] = num(C);
  o.result["sign_agrees"] = sign_ok;
  o.result["small_r_regime"] = rep.small_r_regime;
  o.result["orbit_count"] = rep.count();
  o.result["smallest_r"] = rep.smallest_r ? json(*rep.smallest_r) : json(nullptr);
  o.result["shots"] = shots;
  o.pass = sign_ok && res_ok && orbits_ok;
  std::ostringstream txt;
  txt << "drift constant C = " << fmt(C, 12) << ", leading coefficient " << fmt(u.leading, 12) << " (kappa " << fmt(u.kappa) << ")\n";
  txt << "ODE residual " << fmt(u.residual, 3) << ", small-r regime: " << (rep.small_r_regime ? "yes" : "no") << "\n";
  txt << "       r  outcome        w_end        s_end\n";
  for (const auto& s : rep.shots)
    txt << std::setw(8) << fmt(s.r, 4) << "  " << std::left << std::setw(9) << morse::outcome_name(s.outcome) << std::right << std::setw(11)
        << fmt(s.w_end, 6) << "  " << std::setw(11) << fmt(s.s_end, 6) << "\n";
  txt << "connecting orbits: " << rep.count() << " of " << rep.shots.size() << "\n";
  o.summary = txt.str();
  return o;
}

Outcome cmd_homology(const std::string& path, bool expect_acyclic) {
  auto C = io::complex_from_json(io::read_json(path), path);
  auto H = homology(C);
  bool zero = true;
  for (const auto& [k, g] : H) zero = zero && g.is_zero();
  Outcome o;
  o.result["homology"] = io::homology_to_json(H);
  o.result["acyclic"] = zero;
  o.result["expect_acyclic"] = expect_acyclic;
  o.pass = !expect_acyclic || zero;
  std::ostringstream txt;
  for (const auto& [k, g] : H) {
    txt << "H^" << k << " = ";
    std::vector<std::string> parts;
    if (g.betti > 0) parts.push_back(g.betti == 1 ? "Z" : "Z^" + std::to_string(g.betti));
    for (const auto& t : g.torsion) parts.push_back("Z/" + t.str());
    if (parts.empty()) txt << "0";
    for (std::size_t n = 0; n < parts.size(); ++n) txt << (n ? " + " : "") << parts[n];
    txt << "\n";
  }
  o.summary = txt.str();
  return o;
}

Outcome cmd_spectrum(double alpha, double ht, int m, double tol, double min_order, const std::string& index_path, int mu_minus, int mu_plus,
                     double threshold, double min_gap) {
  Outcome o;
  std::ostringstream txt;
  const int n_t = int(std::lround(1 / ht));
  if (!(ht > 0) || std::fabs(n_t * ht - 1) > 1e-9 || n_t < 2) throw InputError("--ht must be 1/N with N >= 2");
  if (m < 0) throw InputError("--m must be nonnegative");
  auto c = strip::spectrum_convergence(alpha, n_t, m);
  json errs = json::array();
  for (std::size_t k = 0; k < c.errors.size(); ++k)
    errs.push_back(json{{"m", c.errors[k].first}, {"exact", pi * c.errors[k].first + alpha}, {"error", num(c.errors[k].second)}, {"error_half", num(c.errors_half[k].second)}});
  const bool ok = c.max_error < tol && c.order >= min_order;
  o.result["spectrum"] = json{{"alpha", alpha}, {"n_t", n_t},       {"m_max", m},     {"errors", errs}, {"max_error", num(c.max_error)},
                              {"order", num(c.order)}, {"tolerance", tol}, {"min_order", min_order}, {"ok", ok}};
  txt << "spectrum at alpha = " << fmt(alpha) << ", h_t = 1/" << n_t << ": max error " << fmt(c.max_error, 3) << " for |m| <= " << m
      << ", order " << fmt(c.order, 4) << "\n";
  o.pass = ok;
  if (!index_path.empty()) {
    auto P = load_strip(index_path);
    strip::IndexOptions opt;
    opt.s_min = P.s_min;
    opt.s_max = P.s_max;
    opt.h_s = P.h_s;
    opt.n_t = P.n_t;
    opt.threshold = threshold;
    strip::WeightVector w{{-1, mu_minus}, {1, mu_plus}};
    auto r = strip::injectivity_margin(P, w, opt);
    const bool iok = r.numerical_index() == r.formula && r.gap >= min_gap;
    o.result["index"] = json{{"mu_minus", mu_minus},
                             {"mu_plus", mu_plus},
                             {"formula", r.formula},
                             {"kernel_dim", r.kernel_dim},
                             {"cokernel_dim", r.cokernel_dim},
                             {"numerical_index", r.numerical_index()},
                             {"rows", r.rows},
                             {"cols", r.cols},
                             {"margin", num(r.margin)},
                             {"largest_zero", num(r.largest_zero)},
                             {"smallest_nonzero", num(r.smallest_nonzero)},
                             {"gap", num(r.gap)},
                             {"threshold", r.threshold},
                             {"lambda_rank", r.lambda_rank},
                             {"ok", iok}};
    txt << "index (mu_- = " << mu_minus << ", mu_+ = " << mu_plus << "): ker " << r.kernel_dim << ", coker " << r.cokernel_dim << ", formula "
        << r.formula << ", gap " << fmt(r.gap, 3) << "\n";
    o.pass = o.pass && iok;
  }
  o.summary = txt.str();
  return o;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("bad number '" + tok + "' in list '" + s + "'");
    }
  }
  return v;
}

int emit(const Global& g, const std::string& command, const json& config, const std::vector<std::string>& inputs, int code,
         const json& body, const std::string& summary, double seconds) {
  json rep;
  rep["schema"] = schema_id;
  rep["command"] = command;
  rep["status"] = code == 0 ? "pass" : code == 1 ? "fail" : "input_error";
  rep["exit_code"] = code;
  rep["inputs"] = inputs;
  rep["config"] = config;
  if (code == 2) rep["error"] = body;
  else rep["result"] = body;
  if (g.timing) rep["timing"] = json{{"seconds", seconds}};
  const std::string text = io::dump(rep);
  if (!g.output.empty()) {
    try {
      io::write_file(g.output, text);
    } catch (const InputError& e) {
      std::cerr << "kit: " << e.what() << "\n";
      return 2;
    }
  }
  if (g.print_json) std::cout << text;
  else {
    if (code == 2) std::cerr << "kit " << command << ": " << body.get<std::string>() << "\n";
    else std::cout << summary << command << ": " << (code == 0 ? "PASS" : "FAIL") << "\n";
  }
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification kit for curved A-infinity structures and strip models"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--threads", g.threads, "worker threads (KIT_THREADS overrides)")->check(CLI::PositiveNumber);
  app.add_option("--output,-o", g.output, "write the JSON report here");
  app.add_flag("--json", g.print_json, "print the JSON report instead of the summary");
  app.add_flag("--timing", g.timing, "add wall-clock timing to the report");

  std::string path;
  int max_arity = 6;
  int trunc = -1;
  auto* check = app.add_subcommand("check", "associativity, diagonal bimodules and unit search");
  check->add_option("structure", path, "structure JSON")->required();
  check->add_option("--max-arity", max_arity)->check(CLI::Range(1, 10));
  check->add_option("--trunc", trunc, "override the truncation order N")->check(CLI::Range(0, 64));

  std::vector<std::string> total_files;
  auto* total = app.add_subcommand("total", "total bimodule: closedness, nullhomotopy equation, q=0 acyclicity");
  total->add_option("files", total_files, "A B functor delta h")->required()->expected(5);
  total->add_option("--max-arity", max_arity)->check(CLI::Range(1, 10));

  int max_index = 3, max_n = 3, max_degree = 3;
  bool mutate = false;
  auto* sg = app.add_subcommand("signs", "sign-ledger sweep");
  sg->add_option("--max-index", max_index)->check(CLI::Range(0, 6));
  sg->add_option("--max-n", max_n)->check(CLI::Range(0, 8));
  sg->add_option("--max-degree", max_degree)->check(CLI::Range(0, 6));
  sg->add_flag("--mutate", mutate, "negative control: drop k from one sign");

  int levels = 3;
  double tail_tol = 1e-3, rel_tol = 1e-6, enlarge = 0.5;
  std::string glue, lengths = "5,10,15";
  auto* gm = app.add_subcommand("gamma", "Gamma invariant of a strip problem");
  gm->add_option("strip", path, "strip JSON")->required();
  gm->add_option("--levels", levels, "Richardson levels")->check(CLI::Range(1, 6));
  gm->add_option("--tail-tolerance", tail_tol)->check(CLI::PositiveNumber);
  gm->add_option("--tolerance", rel_tol, "relative tolerance against quadrature")->check(CLI::PositiveNumber);
  gm->add_option("--enlarge", enlarge, "relative window enlargement for the sign check")->check(CLI::Range(0.0, 4.0));
  gm->add_option("--glue", glue, "second strip problem for the gluing scaling test");
  gm->add_option("--lengths", lengths, "comma separated gluing lengths");

  int points = 4001;
  double residual_tol = 1e-8;
  morse::ScanOptions scan;
  auto* ms = app.add_subcommand("morse", "Morse drift model");
  ms->add_option("flow", path, "flow JSON")->required();
  ms->add_option("--points", points)->check(CLI::Range(9, 1000001));
  ms->add_option("--residual-tolerance", residual_tol)->check(CLI::PositiveNumber);
  ms->add_option("--horizon", scan.horizon)->check(CLI::PositiveNumber);
  ms->add_option("--neighbourhood", scan.neighbourhood)->check(CLI::PositiveNumber);
  ms->add_option("--max-step", scan.max_step)->check(CLI::PositiveNumber);

  bool expect_acyclic = false;
  auto* hm = app.add_subcommand("homology", "integral homology of a cochain complex");
  hm->add_option("complex", path, "complex JSON")->required();
  hm->add_flag("--expect-acyclic", expect_acyclic);

  double alpha = pi / 4, ht = 1.0 / 400, tol = 1e-3, min_order = 1.9, threshold = 1e-8, min_gap = 1e-6;
  int m = 2, mu_minus = 0, mu_plus = 0;
  std::string index_path;
  auto* sp = app.add_subcommand("spectrum", "discrete spectrum of Q, optionally the weighted index");
  sp->add_option("--alpha", alpha);
  sp->add_option("--ht", ht);
  sp->add_option("--m", m);
  sp->add_option("--tolerance", tol)->check(CLI::PositiveNumber);
  sp->add_option("--min-order", min_order);
  sp->add_option("--index", index_path, "strip JSON for the weighted index");
  sp->add_option("--mu-minus", mu_minus);
  sp->add_option("--mu-plus", mu_plus);
  sp->add_option("--threshold", threshold)->check(CLI::PositiveNumber);
  sp->add_option("--min-gap", min_gap)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  thread_request() = g.threads;

  const auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  json config = json::object();
  std::vector<std::string> inputs;
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  int code = 0;
  std::string error;
  try {
    if (command == "check") {
      inputs = {path};
      config = json{{"max_arity", max_arity}, {"trunc", trunc >= 0 ? json(trunc) : json(nullptr)}};
      out = cmd_check(path, max_arity, trunc >= 0 ? std::optional<int>(trunc) : std::nullopt);
    } else if (command == "total") {
      inputs = total_files;
      config = json{{"max_arity", max_arity}};
      out = cmd_total(total_files, max_arity);
    } else if (command == "signs") {
      config = json{{"max_index", max_index}, {"max_n", max_n}, {"max_degree", max_degree}, {"mutate", mutate}};
      out = cmd_signs(max_index, max_n, max_degree, mutate);
    } else if (command == "gamma") {
      inputs = {path};
      if (!glue.empty()) inputs.push_back(glue);
      const auto ls = parse_list(lengths);
      config = json{{"levels", levels}, {"tail_tolerance", tail_tol}, {"tolerance", rel_tol}, {"enlarge", enlarge}, {"lengths", ls}};
      out = cmd_gamma(path, levels, tail_tol, rel_tol, enlarge, glue, ls);
    } else if (command == "morse") {
      inputs = {path};
      config = json{{"points", points},          {"residual_tolerance", residual_tol}, {"horizon", scan.horizon},
                    {"neighbourhood", scan.neighbourhood}, {"max_step", scan.max_step}};
      out = cmd_morse(path, points, scan, residual_tol);
    } else if (command == "homology") {
      inputs = {path};
      config = json{{"expect_acyclic", expect_acyclic}};
      out = cmd_homology(path, expect_acyclic);
    } else if (command == "spectrum") {
      if (!index_path.empty()) inputs = {index_path};
      config = json{{"alpha", alpha}, {"ht", ht}, {"m", m}, {"tolerance", tol}, {"min_order", min_order}};
      if (!index_path.empty()) config["index"] = json{{"mu_minus", mu_minus}, {"mu_plus", mu_plus}, {"threshold", threshold}, {"min_gap", min_gap}};
      out = cmd_spectrum(alpha, ht, m, tol, min_order, index_path, mu_minus, mu_plus, threshold, min_gap);
    }
    code = out.pass ? 0 : 1;
  } catch (const InputError& e) {
    code = 2, error = e.what();
  } catch (const json::exception& e) {
    code = 2, error = e.what();
  } catch (const StructuralError& e) {
    code = 2, error = e.what();
  } catch (const strip::WindowError& e) {
    code = 2, error = e.what();
  } catch (const std::invalid_argument& e) {
    code = 2, error = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return emit(g, command, config, inputs, code, code == 2 ? json(error) : out.result, out.summary, secs);
}
