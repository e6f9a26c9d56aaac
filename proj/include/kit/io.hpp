#pragma once
// JSON files for structures, morphisms, functors and complexes.
//
// Saving is canonical (fixed key order, sorted operation lists, two-space
// indent), so load followed by save reproduces a canonical file byte for byte.

#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ainfty.hpp"
#include "cc2.hpp"
#include "homology.hpp"

namespace kit {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent input; the CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace io {

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

inline json integer_to_json(const Integer& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max()) return json(v.convert_to<long long>());
  return json(v.str());
}

inline Integer integer_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Integer(j.get<long long>());
  if (j.is_string()) {
    try {
      return Integer(j.get<std::string>());
    } catch (...) {
    }
  }
  throw InputError(where + ": expected an integer");
}

inline json series_to_json(const QSeries& q) {
  json a = json::array();
  for (const auto& c : q.coeffs()) a.push_back(integer_to_json(c));
  return a;
}

/// With truncate set, powers above the order are dropped instead of rejected.
inline QSeries series_from_json(const json& j, int order, const std::string& where, bool truncate = false) {
  if (!j.is_array()) throw InputError(where + ": coeff must be an array over powers of q");
  if (!truncate && int(j.size()) > order + 1) throw InputError(where + ": coeff has terms beyond the truncation order");
  std::vector<Integer> c;
  for (const auto& x : j)
    if (int(c.size()) <= order) c.push_back(integer_from_json(x, where));
  return QSeries(order, std::move(c));
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(where + ": bad \"" + key + "\": " + e.what());
  }
}

inline std::string pair_label(const std::vector<std::string>& objs, int x, int y) { return objs[std::size_t(x)] + "," + objs[std::size_t(y)]; }

inline std::pair<int, int> parse_pair(const std::vector<std::string>& objs, const std::string& s, const std::string& where) {
  auto c = s.find(',');
  if (c == std::string::npos) throw InputError(where + ": pair label \"" + s + "\" is not of the form X,Y");
  auto find = [&](const std::string& o) {
    for (std::size_t i = 0; i < objs.size(); ++i)
      if (objs[i] == o) return int(i);
    throw InputError(where + ": unknown object \"" + o + "\"");
  };
  return {find(s.substr(0, c)), find(s.substr(c + 1))};
}

/// [pair, name] -> generator id of the given bases
inline int gen_from_json(const PairedBases& B, const std::vector<std::string>& objs, const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string())
    throw InputError(where + ": generator reference must be [\"X,Y\", name]");
  auto [x, y] = parse_pair(objs, j[0].get<std::string>(), where);
  int local = B.basis(x, y).find(j[1].get<std::string>());
  if (local < 0) throw InputError(where + ": no generator \"" + j[1].get<std::string>() + "\" in " + j[0].get<std::string>());
  return B.id(x, y, local);
}

inline json gen_to_json(const PairedBases& B, const std::vector<std::string>& objs, int id) {
  const auto& g = B.gen(id);
  return json::array({pair_label(objs, g.src, g.tgt), B.name(id)});
}

inline json bases_to_json(const PairedBases& B, const std::vector<std::string>& objs) {
  json h = json::object();
  for (int x = 0; x < B.objects(); ++x)
    for (int y = 0; y < B.objects(); ++y) {
      const auto& b = B.basis(x, y);
      if (b.empty()) continue;
      json arr = json::array();
      for (const auto& g : b.generators()) arr.push_back(json{{"name", g.name}, {"degree", g.degree}});
      h[pair_label(objs, x, y)] = arr;
    }
  return h;
}

inline std::map<std::pair<int, int>, GradedBasis> bases_from_json(const json& h, const std::vector<std::string>& objs, const std::string& where) {
  if (!h.is_object()) throw InputError(where + ": \"hom\" must be an object keyed by \"X,Y\"");
  std::map<std::pair<int, int>, GradedBasis> out;
  for (const auto& [label, arr] : h.items()) {
    auto p = parse_pair(objs, label, where);
    if (!arr.is_array()) throw InputError(where + ": basis of " + label + " must be an array");
    std::vector<Generator> g;
    for (const auto& e : arr) g.push_back({get<std::string>(e, "name", where + " " + label), get<int>(e, "degree", where + " " + label)});
    try {
      out[p] = GradedBasis(std::move(g));
    } catch (const std::invalid_argument& e) {
      throw InputError(where + " " + label + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structures

inline json structure_to_json(const AInftyStructure& A) {
  const auto& objs = A.objects();
  json j;
  j["objects"] = objs;
  j["hom"] = bases_to_json(A.hom(), objs);
  struct Row {
    std::vector<int> key;
    int out;
    QSeries c;
  };
  std::vector<Row> rows;
  for (std::size_t x = 0; x < objs.size(); ++x)
    for (const auto& [g, c] : A.curvature(int(x))) rows.push_back({{}, g, c});
  for (const auto& key : sorted_keys(A.ops()))
    for (const auto& [g, c] : A.ops().at(key)) rows.push_back({key, g, c});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.key.size() != b.key.size()) return a.key.size() < b.key.size();
    if (a.key != b.key) return a.key < b.key;
    return a.out < b.out;
  });
  json ops = json::array();
  for (const auto& r : rows) {
    json in = json::array();
    for (int x : r.key) in.push_back(gen_to_json(A.hom(), objs, x));
    ops.push_back(json{{"d", r.key.size()}, {"inputs", in}, {"output", gen_to_json(A.hom(), objs, r.out)}, {"coeff", series_to_json(r.c)}});
  }
  j["ops"] = ops;
  j["cy_dim"] = A.cy_dim();
  j["trunc_order"] = A.trunc_order();
  return j;
}

/// Parses and validates; structural problems (degrees, composability,
/// curvature with a q^0 term) are input errors.
inline AInftyStructure structure_from_json(const json& j, const std::string& where = "structure", std::optional<int> trunc_override = {}) {
  auto objs = get<std::vector<std::string>>(j, "objects", where);
  if (objs.empty()) throw InputError(where + ": no objects");
  const int N = trunc_override ? *trunc_override : (j.contains("trunc_order") ? get<int>(j, "trunc_order", where) : default_trunc_order);
  if (N < 0) throw InputError(where + ": negative trunc_order");
  AInftyStructure A(objs, j.contains("cy_dim") ? get<int>(j, "cy_dim", where) : 0, N);
  for (auto& [p, b] : bases_from_json(j.contains("hom") ? j.at("hom") : json::object(), objs, where)) A.set_hom(p.first, p.second, b);
  if (j.contains("ops")) {
    if (!j.at("ops").is_array()) throw InputError(where + ": \"ops\" must be an array");
    std::size_t n = 0;
    for (const auto& op : j.at("ops")) {
      std::string w = where + " ops[" + std::to_string(n++) + "]";
      if (!op.is_object() || !op.contains("inputs") || !op.at("inputs").is_array()) throw InputError(w + ": inputs must be an array");
      const auto& in = op.at("inputs");
      if (op.contains("d") && get<int>(op, "d", w) != int(in.size())) throw InputError(w + ": d does not match the number of inputs");
      std::vector<int> key;
      for (const auto& g : in) key.push_back(gen_from_json(A.hom(), objs, g, w));
      if (!op.contains("output")) throw InputError(w + ": missing \"output\"");
      int out = gen_from_json(A.hom(), objs, op.at("output"), w);
      if (!op.contains("coeff")) throw InputError(w + ": missing \"coeff\"");
      A.add_op(key, out, series_from_json(op.at("coeff"), N, w, trunc_override.has_value()));
    }
  }
  auto bad = A.structural_issues();
  if (!bad.empty()) {
    std::string msg = where + ": invalid structure";
    for (const auto& b : bad) msg += "\n  " + b;
    throw InputError(msg);
  }
  return A;
}

inline AInftyStructure load_structure(const std::string& path, std::optional<int> trunc_override = {}) {
  return structure_from_json(read_json(path), path, trunc_override);
}

// ---------------------------------------------------------------------------
// Morphisms

inline json morphism_to_json(const BimoduleMorphism& f, const std::string& source, const std::string& target) {
  const auto& A = f.algebra();
  const auto& objs = A.objects();
  json j;
  j["source"] = source;
  j["target"] = target;
  j["degree"] = f.degree();
  json comps = json::array();
  for (const auto& key : sorted_keys(f.components())) {
    const int l = key[0], M = int(key.size()) - 1;
    json in = json::array();
    for (int t = 1; t <= M; ++t) in.push_back(gen_to_json(t - 1 == l ? f.source().basis() : A.hom(), objs, key[std::size_t(t)]));
    for (const auto& [g, c] : f.components().at(key))
      comps.push_back(json{{"k", M - 1 - l}, {"l", l}, {"inputs", in}, {"output", gen_to_json(f.target().basis(), objs, g)}, {"coeff", series_to_json(c)}});
  }
  j["components"] = comps;
  return j;
}

/// Inputs are in display order a_{k+l+1}, .., p, .., a_1; the module entry is
/// at index l. Degree homogeneity is validated.
inline BimoduleMorphism morphism_from_json(const json& j, const BimodPtr& P, const BimodPtr& Q, const std::string& where = "morphism") {
  const auto& A = P->algebra();
  const auto& objs = A.objects();
  BimoduleMorphism f(P, Q, get<int>(j, "degree", where));
  if (j.contains("components")) {
    if (!j.at("components").is_array()) throw InputError(where + ": \"components\" must be an array");
    std::size_t n = 0;
    for (const auto& c : j.at("components")) {
      std::string w = where + " components[" + std::to_string(n++) + "]";
      const int k = get<int>(c, "k", w), l = get<int>(c, "l", w);
      if (!c.contains("inputs") || !c.contains("output") || !c.contains("coeff")) throw InputError(w + ": needs inputs, output and coeff");
      const auto& in = c.at("inputs");
      if (k < 0 || l < 0 || !in.is_array() || int(in.size()) != k + l + 1) throw InputError(w + ": inputs must have k + l + 1 entries");
      std::vector<int> key{l};
      for (int t = 0; t < int(in.size()); ++t) key.push_back(gen_from_json(t == l ? P->basis() : A.hom(), objs, in[std::size_t(t)], w));
      int out = gen_from_json(Q->basis(), objs, c.at("output"), w);
      f.add(key, out, series_from_json(c.at("coeff"), A.trunc_order(), w));
    }
  }
  auto bad = f.structural_issues();
  if (!bad.empty()) {
    std::string msg = where + ": morphism is not degree-homogeneous";
    for (const auto& b : bad) msg += "\n  " + b;
    throw InputError(msg);
  }
  return f;
}

inline BimoduleMorphism load_morphism(const std::string& path, const BimodPtr& P, const BimodPtr& Q) {
  return morphism_from_json(read_json(path), P, Q, path);
}

// ---------------------------------------------------------------------------
// Functors

inline json matrix_to_json(const IntMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(integer_to_json(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

inline IntMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const std::string& where) {
  if (!j.is_array() || j.size() != rows) throw InputError(where + ": expected " + std::to_string(rows) + " rows");
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw InputError(where + ": expected " + std::to_string(cols) + " columns");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = integer_from_json(j[i][k], where);
  }
  return m;
}

inline json functor_to_json(const LinearFunctor& Q) {
  const auto& so = Q.source().objects();
  const auto& to = Q.target().objects();
  json j;
  json om = json::object();
  for (std::size_t x = 0; x < so.size(); ++x) om[so[x]] = to[std::size_t(Q.object_map()[x])];
  j["object_map"] = om;
  json maps = json::object();
  for (int x = 0; x < int(so.size()); ++x)
    for (int y = 0; y < int(so.size()); ++y) {
      const auto& m = Q.matrix(x, y);
      if (m.cols() == 0 || m.rows() == 0) continue;
      maps[pair_label(so, x, y)] = matrix_to_json(m);
    }
  j["maps"] = maps;
  return j;
}

/// Matrices have one row per target generator, one column per source
/// generator; missing pairs are zero.
inline LinearFunctor functor_from_json(const json& j, const AlgPtr& A, const AlgPtr& B, const std::string& where = "functor") {
  const auto& so = A->objects();
  std::vector<int> om(so.size(), -1);
  if (!j.contains("object_map") || !j.at("object_map").is_object()) throw InputError(where + ": missing \"object_map\"");
  for (const auto& [x, y] : j.at("object_map").items()) {
    int xi = A->object_index(x), yi = y.is_string() ? B->object_index(y.get<std::string>()) : -1;
    if (xi < 0 || yi < 0) throw InputError(where + ": object map entry " + x + " does not match the structures");
    om[std::size_t(xi)] = yi;
  }
  for (std::size_t x = 0; x < om.size(); ++x)
    if (om[x] < 0) throw InputError(where + ": object " + so[x] + " is not mapped");
  LinearFunctor Q(A, B, om);
  if (j.contains("maps")) {
    for (const auto& [label, m] : j.at("maps").items()) {
      auto [x, y] = parse_pair(so, label, where);
      const auto& cur = Q.matrix(x, y);
      Q.matrix(x, y) = matrix_from_json(m, cur.rows(), cur.cols(), where + " " + label);
    }
  }
  auto bad = Q.structural_issues();
  if (!bad.empty()) throw InputError(where + ": " + bad.front());
  return Q;
}

// ---------------------------------------------------------------------------
// Complexes and homology

inline IntChainComplex complex_from_json(const json& j, const std::string& where = "complex") {
  const int lo = get<int>(j, "lowest_degree", where);
  auto ranks = get<std::vector<long long>>(j, "ranks", where);
  for (auto r : ranks)
    if (r < 0) throw InputError(where + ": negative rank");
  std::vector<IntMatrix> diffs;
  const json& d = j.contains("differentials") ? j.at("differentials") : json::array();
  if (!d.is_array() || (d.size() + 1 != ranks.size() && !(ranks.empty() && d.empty())))
    throw InputError(where + ": need one differential between each pair of consecutive degrees");
  for (std::size_t i = 0; i < d.size(); ++i)
    diffs.push_back(matrix_from_json(d[i], std::size_t(ranks[i + 1]), std::size_t(ranks[i]), where + " differentials[" + std::to_string(i) + "]"));
  std::vector<std::size_t> r(ranks.begin(), ranks.end());
  IntChainComplex C(lo, r, diffs);
  if (!C.is_complex()) throw InputError(where + ": d o d is not zero");
  return C;
}

inline json complex_to_json(const IntChainComplex& C) {
  json j;
  j["lowest_degree"] = C.lo();
  json ranks = json::array(), diffs = json::array();
  for (int k = C.lo(); k <= C.hi(); ++k) ranks.push_back(C.rank(k));
  for (int k = C.lo(); k < C.hi(); ++k) diffs.push_back(matrix_to_json(C.diff(k)));
  j["ranks"] = ranks;
  j["differentials"] = diffs;
  return j;
}

inline json homology_to_json(const std::map<int, HomologyGroup>& H) {
  json j = json::object();
  for (const auto& [k, g] : H) {
    json t = json::array();
    for (const auto& x : g.torsion) t.push_back(integer_to_json(x));
    j[std::to_string(k)] = json{{"betti", g.betti}, {"torsion", t}};
  }
  return j;
}



} // namespace io
} // namespace kit
