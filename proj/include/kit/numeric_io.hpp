#pragma once
// JSON for profiles, strip problems and Morse flow specs.
//
// profile: a number (constant), or {"terms": [term, ..]}, where a term is
//   {"kind": "constant", "value": v}
//   {"kind": "step", "from": a, "to": b, "at": s0, "width": w}
//   {"kind": "tanh_step", "from": a, "to": b, "at": s0, "width": w}
//   {"kind": "indicator", "lo": a, "hi": b, "value": v, "width": w}
//   {"kind": "abs", "at": s0, "value": v, "width": w}        v |s - s0|
//   {"kind": "bump", "at": s0, "value": v, "width": w}       support [s0-w, s0+w]
// and optionally "t": "none" | "sin" | "cos" (factor sin(pi t) or cos(pi t)).

#include <string>
#include <vector>

#include "io.hpp"
#include "morse.hpp"
#include "strip.hpp"

namespace kit::io {

namespace detail {

inline double num(const json& j, const char* key, const std::string& where, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw InputError(where + ": missing \"" + key + "\"");
  }
  if (!j.at(key).is_number()) throw InputError(where + ": \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

} // namespace detail

inline ProfileTerm term_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": a term must be an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw InputError(where + ": missing \"kind\"");
  const std::string k = j.at("kind").get<std::string>();
  ProfileTerm t;
  using detail::num;
  if (k == "constant") t.kind = TermKind::constant, t.value = num(j, "value", where);
  else if (k == "step" || k == "tanh_step") {
    t.kind = k == "step" ? TermKind::step : TermKind::tanh_step;
    t.from = num(j, "from", where);
    t.to = num(j, "to", where);
    t.at = num(j, "at", where, 0.0);
    t.width = num(j, "width", where, k == "step" ? 0.0 : 1.0);
  } else if (k == "indicator") {
    t.kind = TermKind::indicator;
    t.lo = num(j, "lo", where);
    t.hi = num(j, "hi", where);
    t.value = num(j, "value", where, 1.0);
    t.width = num(j, "width", where, 0.0);
  } else if (k == "abs" || k == "bump") {
    t.kind = k == "abs" ? TermKind::abs : TermKind::bump;
    t.at = num(j, "at", where, 0.0);
    t.value = num(j, "value", where, 1.0);
    t.width = num(j, "width", where, k == "abs" ? 0.0 : 1.0);
  } else
    throw InputError(where + ": unknown term kind \"" + k + "\"");
  if (j.contains("t")) {
    const std::string f = j.at("t").is_string() ? j.at("t").get<std::string>() : "";
    if (f == "none") t.t = TFactor::none;
    else if (f == "sin") t.t = TFactor::sin;
    else if (f == "cos") t.t = TFactor::cos;
    else throw InputError(where + ": \"t\" must be none, sin or cos");
  }
  if (auto e = t.validate(); !e.empty()) throw InputError(where + ": " + e);
  return t;
}

inline json term_to_json(const ProfileTerm& t) {
  json j;
  switch (t.kind) {
  case TermKind::constant: j = {{"kind", "constant"}, {"value", t.value}}; break;
  case TermKind::step: j = {{"kind", "step"}, {"from", t.from}, {"to", t.to}, {"at", t.at}, {"width", t.width}}; break;
  case TermKind::tanh_step: j = {{"kind", "tanh_step"}, {"from", t.from}, {"to", t.to}, {"at", t.at}, {"width", t.width}}; break;
  case TermKind::indicator: j = {{"kind", "indicator"}, {"lo", t.lo}, {"hi", t.hi}, {"value", t.value}, {"width", t.width}}; break;
  case TermKind::abs: j = {{"kind", "abs"}, {"at", t.at}, {"value", t.value}, {"width", t.width}}; break;
  case TermKind::bump: j = {{"kind", "bump"}, {"at", t.at}, {"value", t.value}, {"width", t.width}}; break;
  }
  if (t.t != TFactor::none) j["t"] = t.t == TFactor::sin ? "sin" : "cos";
  return j;
}

inline Profile profile_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return Profile::constant(j.get<double>());
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
    throw InputError(where + ": a profile is a number or {\"terms\": [..]}");
  Profile p;
  std::size_t n = 0;
  for (const auto& t : j.at("terms")) p.add(term_from_json(t, where + " terms[" + std::to_string(n++) + "]"));
  return p;
}

inline json profile_to_json(const Profile& p) {
  json a = json::array();
  for (const auto& t : p.terms) a.push_back(term_to_json(t));
  return json{{"terms", a}};
}

inline std::pair<double, double> window_from_json(const json& j, const std::string& where) {
  if (!j.contains("window") || !j.at("window").is_array() || j.at("window").size() != 2 || !j.at("window")[0].is_number() ||
      !j.at("window")[1].is_number())
    throw InputError(where + ": \"window\" must be [s_min, s_max]");
  return {j.at("window")[0].get<double>(), j.at("window")[1].get<double>()};
}

/// {"b": profile, "c": profile, "window": [lo, hi], "h_s": .., "h_t": ..}
inline strip::StripProblem strip_from_json(const json& j, const std::string& where = "strip") {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  strip::StripProblem P;
  if (!j.contains("b")) throw InputError(where + ": missing \"b\"");
  P.b = profile_from_json(j.at("b"), where + " b");
  P.c = j.contains("c") ? profile_from_json(j.at("c"), where + " c") : Profile{};
  std::tie(P.s_min, P.s_max) = window_from_json(j, where);
  P.h_s = detail::num(j, "h_s", where, 0.02);
  const double ht = detail::num(j, "h_t", where, 0.125);
  if (!(ht > 0 && ht <= 0.5)) throw InputError(where + ": h_t must lie in (0, 1/2]");
  P.n_t = int(std::lround(1 / ht));
  if (std::fabs(P.n_t * ht - 1) > 1e-9) throw InputError(where + ": 1/h_t must be an integer");
  if (auto e = strip::validate(P); !e.empty()) throw InputError(where + ": " + e);
  return P;
}

inline json strip_to_json(const strip::StripProblem& P) {
  return json{{"b", profile_to_json(P.b)}, {"c", profile_to_json(P.c)}, {"window", {P.s_min, P.s_max}}, {"h_s", P.h_s}, {"h_t", 1.0 / P.n_t}};
}

inline morse::Knots knots_from_json(const json& j, const std::string& where) {
  morse::Knots k;
  if (!j.is_array()) throw InputError(where + ": knots must be an array of [w, value]");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) throw InputError(where + ": knots must be [w, value] pairs");
    k.pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return k;
}

inline json knots_to_json(const morse::Knots& k) {
  json a = json::array();
  for (const auto& [w, v] : k.pts) a.push_back({w, v});
  return a;
}

/// {"b": profile, "c": profile, "window": [lo, hi], "dphi": knots, "psi": knots,
///  "r_grid": [..] or {"lo":, "hi":, "count":}}
struct FlowInput {
  morse::FlowSpec spec;
  std::vector<double> r_grid;
};

inline FlowInput flow_from_json(const json& j, const std::string& where = "flow") {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  FlowInput in;
  auto& p = in.spec.profile;
  if (!j.contains("b") || !j.contains("c")) throw InputError(where + ": needs \"b\" and \"c\"");
  p.b = profile_from_json(j.at("b"), where + " b");
  p.c = profile_from_json(j.at("c"), where + " c");
  std::tie(p.s_min, p.s_max) = window_from_json(j, where);
  if (j.contains("dphi")) in.spec.dphi = knots_from_json(j.at("dphi"), where + " dphi");
  if (j.contains("psi")) in.spec.psi = knots_from_json(j.at("psi"), where + " psi");
  if (j.contains("r_grid")) {
    const auto& g = j.at("r_grid");
    if (g.is_array()) {
      for (const auto& r : g) {
        if (!r.is_number()) throw InputError(where + ": r_grid entries must be numbers");
        in.r_grid.push_back(r.get<double>());
      }
    } else if (g.is_object()) {
      const int n = int(detail::num(g, "count", where + " r_grid"));
      if (n < 1) throw InputError(where + ": r_grid count must be positive");
      in.r_grid = morse::linear_grid(detail::num(g, "lo", where + " r_grid"), detail::num(g, "hi", where + " r_grid"), n);
    } else
      throw InputError(where + ": bad r_grid");
  } else
    in.r_grid = morse::linear_grid(0.01, 0.1, 10);
  return in;
}

inline json flow_to_json(const FlowInput& in) {
  const auto& p = in.spec.profile;
  return json{{"b", profile_to_json(p.b)},        {"c", profile_to_json(p.c)},          {"window", {p.s_min, p.s_max}},
              {"dphi", knots_to_json(in.spec.dphi)}, {"psi", knots_to_json(in.spec.psi)}, {"r_grid", in.r_grid}};
}

} // namespace kit::io
