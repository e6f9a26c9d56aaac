#pragma once
// Curved A-infinity categories, bimodules and strict linear functors.
//
// Conventions. Operation inputs are stored in display order: the table key of
// mu^d(a_d, ..., a_1) is [a_d, ..., a_1], with a_1 in hom(X_0, X_1) and the
// output in hom(X_0, X_d). Reduced degree ||a|| = |a| - 1 governs signs: the
// relation for (a_d, ..., a_1) is
//   sum_{i,j} (-1)^{||a_1|| + ... + ||a_i||} mu(a_d, .., mu^j(a_{i+j}, .., a_{i+1}), a_i, .., a_1) = 0.
// Bimodule keys are [l, a_{k+l+1}, ..., a_{k+2}, p, a_k, ..., a_1]; p lies in
// P(X_k, X_{k+1}) and the output in P(X_0, X_{k+l+1}). Bimodule tables use the
// same shifted sign conventions, with ||p|| = |p| - 1.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graded.hpp"
#include "homology.hpp"
#include "parallel.hpp"

namespace kit {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = v.size() * 0x9e3779b97f4a7c15ULL;
    for (int x : v) h ^= std::size_t(unsigned(x)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};
using OpTable = std::unordered_map<std::vector<int>, Element, VecHash>;

inline std::vector<std::vector<int>> sorted_keys(const OpTable& t) {
  std::vector<std::vector<int>> k;
  k.reserve(t.size());
  for (const auto& [key, v] : t) k.push_back(key);
  std::sort(k.begin(), k.end(), [](const auto& a, const auto& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
  return k;
}

class StructuralError : public std::runtime_error {
public:
  explicit StructuralError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "structural error";
    for (const auto& x : v) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> issues_;
};

struct GenRef {
  int src = 0, tgt = 0, local = 0, degree = 0;
};

/// One graded basis per ordered object pair, with global generator ids.
class PairedBases {
public:
  PairedBases() = default;
  explicit PairedBases(int nobj)
      : n_(nobj), bases_(std::size_t(nobj) * std::size_t(nobj)), ids_(bases_.size()), by_src_(std::size_t(nobj)) {}

  int objects() const { return n_; }
  void set(int x, int y, GradedBasis b) {
    auto& slot = bases_[idx(x, y)];
    if (!ids_[idx(x, y)].empty()) throw std::invalid_argument("PairedBases: pair set twice");
    slot = std::move(b);
    for (std::size_t i = 0; i < slot.size(); ++i) {
      ids_[idx(x, y)].push_back(int(gens_.size()));
      gens_.push_back({x, y, int(i), slot.degree(i)});
      by_src_[std::size_t(x)].push_back(int(gens_.size()) - 1);
    }
  }
  const GradedBasis& basis(int x, int y) const { return bases_[idx(x, y)]; }
  const std::vector<int>& ids(int x, int y) const { return ids_[idx(x, y)]; }
  int id(int x, int y, int local) const { return ids_[idx(x, y)][std::size_t(local)]; }
  const GenRef& gen(int id) const { return gens_[std::size_t(id)]; }
  int degree(int id) const { return gens_[std::size_t(id)].degree; }
  std::size_t size() const { return gens_.size(); }
  const std::string& name(int id) const { return basis(gen(id).src, gen(id).tgt)[std::size_t(gen(id).local)].name; }
  /// generators with source object x
  const std::vector<int>& from(int x) const { return by_src_[std::size_t(x)]; }
  friend bool operator==(const PairedBases& a, const PairedBases& b) { return a.n_ == b.n_ && a.bases_ == b.bases_; }

private:
  std::size_t idx(int x, int y) const {
    if (x < 0 || y < 0 || x >= n_ || y >= n_) throw std::out_of_range("PairedBases: object index");
    return std::size_t(x) * std::size_t(n_) + std::size_t(y);
  }
  int n_ = 0;
  std::vector<GradedBasis> bases_;
  std::vector<std::vector<int>> ids_;
  std::vector<GenRef> gens_;
  std::vector<std::vector<int>> by_src_;
};

inline int reduced(int degree) { return degree - 1; }

class AInftyStructure {
public:
  AInftyStructure() = default;
  AInftyStructure(std::vector<std::string> objects, int cy_dim = 0, int trunc_order = default_trunc_order)
      : objects_(std::move(objects)), hom_(int(objects_.size())), mu0_(objects_.size()), cy_dim_(cy_dim), N_(trunc_order) {}

  const std::vector<std::string>& objects() const { return objects_; }
  int object_index(const std::string& name) const {
    for (std::size_t i = 0; i < objects_.size(); ++i)
      if (objects_[i] == name) return int(i);
    return -1;
  }
  int cy_dim() const { return cy_dim_; }
  int trunc_order() const { return N_; }
  void set_cy_dim(int n) { cy_dim_ = n; }

  PairedBases& hom() { return hom_; }
  const PairedBases& hom() const { return hom_; }
  void set_hom(int x, int y, GradedBasis b) { hom_.set(x, y, std::move(b)); }

  const OpTable& ops() const { return mu_; }
  const std::vector<Element>& curvature() const { return mu0_; }
  const Element& curvature(int x) const { return mu0_[std::size_t(x)]; }
  bool curved() const {
    for (const auto& e : mu0_)
      if (!e.is_zero()) return true;
    return false;
  }
  int max_arity() const {
    int m = curved() ? 0 : -1;
    for (const auto& [k, v] : mu_) m = std::max(m, int(k.size()));
    return m;
  }

  /// key in display order; empty key = curvature (object taken from the output)
  void add_op(const std::vector<int>& key, int out, const QSeries& c) {
    if (c.order() != N_) throw std::invalid_argument("add_op: coefficient truncation order differs from structure");
    if (key.empty()) {
      mu0_[std::size_t(hom_.gen(out).src)].add(out, c);
      return;
    }
    Element& e = mu_[key];
    e.add(out, c);
    if (e.is_zero()) mu_.erase(key);
  }
  const Element* op(const std::vector<int>& key) const {
    auto it = mu_.find(key);
    return it == mu_.end() ? nullptr : &it->second;
  }

  std::string label(int id) const {
    const auto& g = hom_.gen(id);
    return objects_[std::size_t(g.src)] + "," + objects_[std::size_t(g.tgt)] + ":" + hom_.name(id);
  }

  /// Degree, composability, output pair, truncation and curvature checks.
  std::vector<std::string> structural_issues() const {
    std::vector<std::string> bad;
    for (const auto& key : sorted_keys(mu_)) {
      const Element& out = mu_.at(key);
      const int d = int(key.size());
      int deg = 2 - d;
      bool ok = true;
      for (int t = 0; t + 1 < d; ++t)
        if (hom_.gen(key[std::size_t(t + 1)]).tgt != hom_.gen(key[std::size_t(t)]).src) ok = false;
      for (int x : key) deg += hom_.degree(x);
      std::string where = "mu^" + std::to_string(d) + "(" + describe(key) + ")";
      if (!ok) {
        bad.push_back(where + ": inputs do not compose");
        continue;
      }
      int s = hom_.gen(key.back()).src, t = hom_.gen(key.front()).tgt;
      for (const auto& [g, c] : out) {
        if (hom_.degree(g) != deg)
          bad.push_back(where + " -> " + label(g) + ": output degree " + std::to_string(hom_.degree(g)) + ", expected " + std::to_string(deg));
        if (hom_.gen(g).src != s || hom_.gen(g).tgt != t) bad.push_back(where + " -> " + label(g) + ": output in wrong hom space");
        if (c.order() != N_) bad.push_back(where + ": coefficient truncation order mismatch");
      }
    }
    for (std::size_t x = 0; x < mu0_.size(); ++x)
      for (const auto& [g, c] : mu0_[x]) {
        if (hom_.degree(g) != 2) bad.push_back("mu^0 at " + objects_[x] + " -> " + label(g) + ": curvature must have degree 2");
        if (c.at_zero() != 0) bad.push_back("mu^0 at " + objects_[x] + " -> " + label(g) + ": curvature has a q^0 term");
        if (hom_.gen(g).src != int(x) || hom_.gen(g).tgt != int(x)) bad.push_back("mu^0 at " + objects_[x] + ": output not an endomorphism");
      }
    return bad;
  }
  void validate() const {
    auto bad = structural_issues();
    if (!bad.empty()) throw StructuralError(bad);
  }

  std::string describe(const std::vector<int>& key) const {
    std::string s;
    for (std::size_t i = 0; i < key.size(); ++i) s += (i ? ", " : "") + label(key[i]);
    return s;
  }

  /// q = 0 reduction
  AInftyStructure reduce_q0() const {
    AInftyStructure r = *this;
    for (auto& e : r.mu0_) e = Element{};
    OpTable t;
    for (const auto& [k, v] : mu_) {
      Element e = v.reduce_q0();
      if (!e.is_zero()) t.emplace(k, std::move(e));
    }
    r.mu_ = std::move(t);
    return r;
  }

  friend bool operator==(const AInftyStructure& a, const AInftyStructure& b) {
    return a.objects_ == b.objects_ && a.hom_ == b.hom_ && a.mu0_ == b.mu0_ && a.mu_ == b.mu_ && a.cy_dim_ == b.cy_dim_ && a.N_ == b.N_;
  }

private:
  std::vector<std::string> objects_;
  PairedBases hom_;
  std::vector<Element> mu0_;
  OpTable mu_;
  int cy_dim_ = 0;
  int N_ = default_trunc_order;
};

using AlgPtr = std::shared_ptr<const AInftyStructure>;

/// A-bimodule: basis per object pair, sparse mu^{l,1,k} table.
class Bimodule {
public:
  Bimodule() = default;
  explicit Bimodule(AlgPtr alg) : alg_(std::move(alg)), basis_(alg_->hom().objects()) {}

  const AInftyStructure& algebra() const { return *alg_; }
  const AlgPtr& algebra_ptr() const { return alg_; }
  PairedBases& basis() { return basis_; }
  const PairedBases& basis() const { return basis_; }
  void set_basis(int x, int y, GradedBasis b) { basis_.set(x, y, std::move(b)); }
  const OpTable& ops() const { return mu_; }
  int trunc_order() const { return alg_->trunc_order(); }

  void add_op(const std::vector<int>& key, int out, const QSeries& c) {
    Element& e = mu_[key];
    e.add(out, c);
    if (e.is_zero()) mu_.erase(key);
  }
  void add_op(const std::vector<int>& key, const Element& v) {
    Element& e = mu_[key];
    e.add(v);
    if (e.is_zero()) mu_.erase(key);
  }
  const Element* op(const std::vector<int>& key) const {
    auto it = mu_.find(key);
    return it == mu_.end() ? nullptr : &it->second;
  }
  int max_arity() const {
    int m = 0;
    for (const auto& [k, v] : mu_) m = std::max(m, int(k.size()) - 1);
    return m;
  }

  std::string label(int id) const {
    const auto& g = basis_.gen(id);
    return alg_->objects()[std::size_t(g.src)] + "," + alg_->objects()[std::size_t(g.tgt)] + ":" + basis_.name(id);
  }
  /// key [l, ...] rendered with the module slot marked
  std::string describe(const std::vector<int>& key) const {
    std::string s;
    const int l = key[0];
    for (std::size_t i = 1; i < key.size(); ++i) {
      if (i > 1) s += ", ";
      s += (int(i) - 1 == l) ? "[" + label(key[i]) + "]" : alg_->label(key[i]);
    }
    return s;
  }

  std::vector<std::string> structural_issues() const {
    std::vector<std::string> bad;
    const auto& A = *alg_;
    for (const auto& key : sorted_keys(mu_)) {
      const int l = key[0], M = int(key.size()) - 1;
      std::string where = "mu^{" + std::to_string(l) + ",1," + std::to_string(M - 1 - l) + "}(" + describe(key) + ")";
      if (l < 0 || l >= M) {
        bad.push_back(where + ": bad module slot");
        continue;
      }
      // natural order x_1..x_M
      int deg = 1 - (M - 1);
      bool ok = true;
      int prev_tgt = -1, first_src = -1;
      for (int m = 1; m <= M; ++m) {
        int id = key[std::size_t(M - m + 1)];
        bool is_p = (M - m) == l;
        const GenRef& g = is_p ? basis_.gen(id) : A.hom().gen(id);
        if (m == 1) first_src = g.src;
        else if (g.src != prev_tgt) ok = false;
        prev_tgt = g.tgt;
        deg += g.degree;
      }
      if (!ok) {
        bad.push_back(where + ": inputs do not compose");
        continue;
      }
      for (const auto& [g, c] : mu_.at(key)) {
        if (basis_.degree(g) != deg)
          bad.push_back(where + " -> " + label(g) + ": output degree " + std::to_string(basis_.degree(g)) + ", expected " + std::to_string(deg));
        if (basis_.gen(g).src != first_src || basis_.gen(g).tgt != prev_tgt) bad.push_back(where + ": output in wrong pair");
        if (c.order() != A.trunc_order()) bad.push_back(where + ": coefficient truncation order mismatch");
      }
    }
    return bad;
  }
  void validate() const {
    auto bad = structural_issues();
    if (!bad.empty()) throw StructuralError(bad);
  }

  Bimodule reduce_q0(AlgPtr alg0) const {
    Bimodule r = *this;
    r.alg_ = std::move(alg0);
    OpTable t;
    for (const auto& [k, v] : mu_) {
      Element e = v.reduce_q0();
      if (!e.is_zero()) t.emplace(k, std::move(e));
    }
    r.mu_ = std::move(t);
    return r;
  }

private:
  AlgPtr alg_;
  PairedBases basis_;
  OpTable mu_;
};

using BimodPtr = std::shared_ptr<const Bimodule>;

// ---------------------------------------------------------------------------
// Tuple enumeration and key helpers

namespace detail {

/// display key of natural-order ids y[0..M)
inline void alg_key(std::vector<int>& key, const int* y, int M) {
  key.resize(std::size_t(M));
  for (int t = 0; t < M; ++t) key[std::size_t(t)] = y[M - 1 - t];
}
/// bimodule key of natural-order ids y[0..M) with the module element at y[r]
inline void bi_key(std::vector<int>& key, const int* y, int M, int r) {
  key.resize(std::size_t(M) + 1);
  key[0] = M - 1 - r;
  for (int t = 0; t < M; ++t) key[std::size_t(t) + 1] = y[M - 1 - t];
}

/// Natural-order tuple x[0..N) with module slot at index r (r = -1: none),
/// objects X_0..X_N.
struct Tuple {
  std::vector<int> x;
  std::vector<int> obj;
  int r = -1;
};

/// All composable tuples of length N. slot r (if >= 0) draws from `mod`.
inline void enumerate_tuples(const PairedBases& hom, const PairedBases* mod, int N, int r, std::vector<Tuple>& out) {
  Tuple t;
  t.x.resize(std::size_t(N));
  t.obj.resize(std::size_t(N) + 1);
  t.r = r;
  std::function<void(int)> rec = [&](int m) {
    if (m == N) {
      out.push_back(t);
      return;
    }
    const PairedBases& B = (m == r) ? *mod : hom;
    for (int g : B.from(t.obj[std::size_t(m)])) {
      t.x[std::size_t(m)] = g;
      t.obj[std::size_t(m) + 1] = B.gen(g).tgt;
      rec(m + 1);
    }
  };
  for (int X = 0; X < hom.objects(); ++X) {
    t.obj[0] = X;
    rec(0);
  }
}

/// Multilinear substitution: sum over (g,c) in `inner` of
/// scale * c * table[key with key[hole] = g], accumulated into acc.
inline void substitute(Element& acc, const OpTable& table, std::vector<int>& key, std::size_t hole, const Element& inner, int sign) {
  for (const auto& [g, c] : inner) {
    key[hole] = g;
    auto it = table.find(key);
    if (it == table.end()) continue;
    acc.add_scaled(it->second, sign == 1 ? c : -c);
  }
}

} // namespace detail

struct Violation {
  int arity = 0;
  int k = -1, l = -1; // bimodule relations only
  std::string inputs;
  Element residual;
  std::string residual_text;
};

struct CheckReport {
  std::vector<Violation> violations;
  std::size_t tuples_checked = 0;
  int max_arity = 0;
  /// relations of arity above this bound involve no stored operations
  int vacuous_above = 0;
  bool ok() const { return violations.empty(); }
};

inline std::string render(const Element& e, const std::function<std::string(int)>& label) {
  std::ostringstream s;
  bool first = true;
  for (const auto& [g, c] : e) {
    if (!first) s << " + ";
    first = false;
    s << "(";
    bool f2 = true;
    for (std::size_t p = 0; p < c.coeffs().size(); ++p) {
      if (c.coeffs()[p] == 0) continue;
      if (!f2) s << (c.coeffs()[p] > 0 ? "+" : "");
      f2 = false;
      s << c.coeffs()[p];
      if (p) s << "q^" << p;
    }
    s << ")" << label(g);
  }
  return first ? "0" : s.str();
}

/// Relation of the A-infinity structure on one tuple (natural order).
inline Element associativity_residual(const AInftyStructure& A, const detail::Tuple& t) {
  const int d = int(t.x.size());
  const bool curved = A.curved();
  Element R;
  std::vector<int> key, outer;
  for (int j = curved ? 0 : 1; j <= d; ++j)
    for (int i = 0; i + j <= d; ++i) {
      const Element* inner = nullptr;
      if (j == 0) {
        inner = &A.curvature(t.obj[std::size_t(i)]);
        if (inner->is_zero()) continue;
      } else {
        detail::alg_key(key, t.x.data() + i, j);
        inner = A.op(key);
        if (!inner) continue;
      }
      int par = 0;
      for (int m = 0; m < i; ++m) par += reduced(A.hom().degree(t.x[std::size_t(m)]));
      // outer natural tuple: x_1..x_i, hole, x_{i+j+1}..x_d
      std::vector<int> nat;
      nat.reserve(std::size_t(d - j + 1));
      for (int m = 0; m < i; ++m) nat.push_back(t.x[std::size_t(m)]);
      nat.push_back(-1);
      for (int m = i + j; m < d; ++m) nat.push_back(t.x[std::size_t(m)]);
      detail::alg_key(outer, nat.data(), int(nat.size()));
      detail::substitute(R, A.ops(), outer, std::size_t(d - i - j), *inner, sign_of(par));
    }
  return R;
}

inline CheckReport check_associativity(const AInftyStructure& A, int max_arity = 6) {
  if (max_arity < 1) throw std::invalid_argument("check_associativity: max_arity must be >= 1");
  A.validate();
  CheckReport rep;
  rep.max_arity = max_arity;
  const int M = std::max(A.max_arity(), 1);
  rep.vacuous_above = A.curved() ? 2 * M : 2 * M - 1;
  std::vector<detail::Tuple> tuples;
  if (A.curved())
    for (int X = 0; X < int(A.objects().size()); ++X) tuples.push_back({{}, {X}, -1});
  for (int d = 1; d <= max_arity; ++d) detail::enumerate_tuples(A.hom(), nullptr, d, -1, tuples);
  std::vector<Element> res(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t n) { res[n] = associativity_residual(A, tuples[n]); });
  rep.tuples_checked = tuples.size();
  for (std::size_t n = 0; n < tuples.size(); ++n) {
    if (res[n].is_zero()) continue;
    std::vector<int> key;
    detail::alg_key(key, tuples[n].x.data(), int(tuples[n].x.size()));
    Violation v;
    v.arity = int(tuples[n].x.size());
    v.inputs = key.empty() ? "curvature at " + A.objects()[std::size_t(tuples[n].obj[0])] : A.describe(key);
    v.residual = res[n];
    v.residual_text = render(res[n], [&](int g) { return A.label(g); });
    rep.violations.push_back(std::move(v));
  }
  return rep;
}

/// Relation of a bimodule on one tuple with module slot t.r.
inline Element bimodule_residual(const Bimodule& P, const detail::Tuple& t) {
  const AInftyStructure& A = P.algebra();
  const int N = int(t.x.size()), r = t.r;
  const bool curved = A.curved();
  auto red = [&](int m) { return reduced(m == r ? P.basis().degree(t.x[std::size_t(m)]) : A.hom().degree(t.x[std::size_t(m)])); };
  Element R;
  std::vector<int> key, outer, nat;
  for (int j = curved ? 0 : 1; j <= N; ++j)
    for (int i = 0; i + j <= N; ++i) {
      const bool has_p = (i <= r && r < i + j);
      const Element* inner = nullptr;
      if (j == 0) {
        inner = &A.curvature(t.obj[std::size_t(i)]);
        if (inner->is_zero()) continue;
      } else if (has_p) {
        detail::bi_key(key, t.x.data() + i, j, r - i);
        inner = P.op(key);
      } else {
        detail::alg_key(key, t.x.data() + i, j);
        inner = A.op(key);
      }
      if (!inner) continue;
      int par = 0;
      for (int m = 0; m < i; ++m) par += red(m);
      nat.clear();
      for (int m = 0; m < i; ++m) nat.push_back(t.x[std::size_t(m)]);
      nat.push_back(-1);
      for (int m = i + j; m < N; ++m) nat.push_back(t.x[std::size_t(m)]);
      // module slot of the outer operation
      int r_out = has_p ? i : (r < i ? r : r - j + 1);
      detail::bi_key(outer, nat.data(), int(nat.size()), r_out);
      detail::substitute(R, P.ops(), outer, std::size_t(1 + (int(nat.size()) - 1 - i)), *inner, sign_of(par));
    }
  return R;
}

inline std::vector<detail::Tuple> bimodule_tuples(const AInftyStructure& A, const PairedBases& mod, int max_arity) {
  std::vector<detail::Tuple> tuples;
  for (int N = 1; N <= max_arity; ++N)
    for (int r = 0; r < N; ++r) detail::enumerate_tuples(A.hom(), &mod, N, r, tuples);
  return tuples;
}

inline CheckReport check_bimodule(const Bimodule& P, int max_arity = 6) {
  if (max_arity < 1) throw std::invalid_argument("check_bimodule: max_arity must be >= 1");
  P.algebra().validate();
  P.validate();
  CheckReport rep;
  rep.max_arity = max_arity;
  rep.vacuous_above = std::max(P.max_arity(), P.algebra().max_arity()) * 2 + 1;
  auto tuples = bimodule_tuples(P.algebra(), P.basis(), max_arity);
  std::vector<Element> res(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t n) { res[n] = bimodule_residual(P, tuples[n]); });
  rep.tuples_checked = tuples.size();
  for (std::size_t n = 0; n < tuples.size(); ++n) {
    if (res[n].is_zero()) continue;
    std::vector<int> key;
    const auto& t = tuples[n];
    detail::bi_key(key, t.x.data(), int(t.x.size()), t.r);
    Violation v;
    v.arity = int(t.x.size());
    v.k = t.r;
    v.l = int(t.x.size()) - 1 - t.r;
    v.inputs = P.describe(key);
    v.residual = res[n];
    v.residual_text = render(res[n], [&](int g) { return P.label(g); });
    rep.violations.push_back(std::move(v));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Chain complexes at q = 0

/// Complex of one graded piece: generators `ids` with degrees, d(g) = sign * op(g).
struct PairComplex {
  IntChainComplex complex;
  std::map<int, std::vector<int>> gens_by_degree; // degree -> ids in column order
  std::map<int, std::size_t> position;            // id -> position within its degree
};

inline PairComplex build_complex(const std::vector<int>& ids, const std::function<int(int)>& degree,
                                 const std::function<Element(int)>& d) {
  PairComplex pc;
  for (int g : ids) {
    auto& v = pc.gens_by_degree[degree(g)];
    pc.position[g] = v.size();
    v.push_back(g);
  }
  if (ids.empty()) return pc;
  int lo = pc.gens_by_degree.begin()->first, hi = pc.gens_by_degree.rbegin()->first;
  std::vector<std::size_t> ranks;
  for (int k = lo; k <= hi; ++k) ranks.push_back(pc.gens_by_degree.count(k) ? pc.gens_by_degree[k].size() : 0);
  std::vector<IntMatrix> diffs;
  for (int k = lo; k < hi; ++k) diffs.emplace_back(ranks[std::size_t(k + 1 - lo)], ranks[std::size_t(k - lo)]);
  std::vector<std::string> bad;
  for (int g : ids) {
    int k = degree(g);
    Element img = d(g);
    for (const auto& [h, c] : img) {
      if (c.at_zero() == 0) continue;
      if (degree(h) != k + 1 || !pc.position.count(h)) {
        bad.push_back("differential leaves the complex at generator " + std::to_string(g));
        continue;
      }
      diffs[std::size_t(k - lo)](pc.position[h], pc.position[g]) += c.at_zero();
    }
  }
  if (!bad.empty()) throw StructuralError(bad);
  pc.complex = IntChainComplex(lo, std::move(ranks), std::move(diffs));
  if (!pc.complex.is_complex()) throw StructuralError({"q=0 differential does not square to zero"});
  return pc;
}

/// (X,Y) -> complex of hom(X,Y) with da = (-1)^{|a|} mu^1(a), at q = 0.
inline std::map<std::pair<int, int>, PairComplex> chain_differential(const AInftyStructure& A) {
  A.validate();
  std::map<std::pair<int, int>, PairComplex> out;
  const int n = int(A.objects().size());
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      out[{x, y}] = build_complex(
          A.hom().ids(x, y), [&](int g) { return A.hom().degree(g); },
          [&](int g) {
            const Element* e = A.op({g});
            return e ? e->reduce_q0().scaled(sign_of(A.hom().degree(g))) : Element{};
          });
    }
  return out;
}

/// (X,Y) -> complex of P(X,Y) with dp = (-1)^{|p|} mu^{0,1,0}(p), at q = 0.
inline std::map<std::pair<int, int>, PairComplex> bimodule_complexes(const Bimodule& P) {
  std::map<std::pair<int, int>, PairComplex> out;
  const int n = P.basis().objects();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      out[{x, y}] = build_complex(
          P.basis().ids(x, y), [&](int g) { return P.basis().degree(g); },
          [&](int g) {
            const Element* e = P.op({0, g});
            return e ? e->reduce_q0().scaled(sign_of(P.basis().degree(g))) : Element{};
          });
    }
  return out;
}

// ---------------------------------------------------------------------------
// Cohomological units

struct UnitResult {
  std::vector<std::optional<Element>> units; // per object
  std::vector<std::string> absence;          // per object, empty when found
  bool all_found() const {
    for (const auto& u : units)
      if (!u) return false;
    return true;
  }
};

/// Degree-0 cycle e_X with e.a ~ a and a.e ~ a on every homology class, where
/// the product is (a2, a1) -> (-1)^{|a1|} mu^2(a2, a1), all at q = 0.
inline UnitResult find_cohomological_unit(const AInftyStructure& Aq) {
  Aq.validate();
  const AInftyStructure A = Aq.reduce_q0();
  auto cx = chain_differential(A);
  const int n = int(A.objects().size());
  UnitResult res;
  res.units.resize(std::size_t(n));
  res.absence.resize(std::size_t(n));

  auto product = [&](int a2, int a1) -> Element {
    const Element* e = A.op({a2, a1});
    return e ? e->scaled(sign_of(A.hom().degree(a1))) : Element{};
  };

  for (int X = 0; X < n; ++X) {
    const PairComplex& end = cx.at({X, X});
    auto it0 = end.gens_by_degree.find(0);
    std::vector<int> cand = it0 == end.gens_by_degree.end() ? std::vector<int>{} : it0->second;

    // unknown layout: [c over cand][b blocks ...]; rows appended per constraint
    struct Block {
      const PairComplex* pc;
      int deg;
      std::vector<Integer> z; // cycle coordinates in degree deg
      bool left;              // e on the left
    };
    std::vector<Block> blocks;
    for (int W = 0; W < n; ++W) {
      for (int side = 0; side < 2; ++side) {
        const PairComplex& pc = side == 0 ? cx.at({W, X}) : cx.at({X, W});
        for (const auto& [k, gens] : pc.gens_by_degree) {
          IntegerSolver ker(pc.complex.diff(k));
          for (auto& z : ker.kernel_basis()) blocks.push_back({&pc, k, z, side == 0});
        }
      }
    }
    std::size_t ncols = cand.size();
    std::vector<std::size_t> bcol;
    for (auto& b : blocks) {
      bcol.push_back(ncols);
      ncols += b.pc->complex.rank(b.deg - 1);
    }
    std::size_t nrows = end.complex.rank(1);
    std::vector<std::size_t> brow;
    for (auto& b : blocks) {
      brow.push_back(nrows);
      nrows += b.pc->complex.rank(b.deg);
    }
    IntMatrix M(nrows, ncols);
    std::vector<Integer> rhs(nrows);
    // d e = 0
    IntMatrix d0 = end.complex.diff(0);
    for (std::size_t i = 0; i < d0.rows(); ++i)
      for (std::size_t j = 0; j < d0.cols(); ++j) M(i, j) = d0(i, j);
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const Block& b = blocks[bi];
      const auto& gens = b.pc->gens_by_degree.at(b.deg);
      for (std::size_t c = 0; c < cand.size(); ++c) {
        Element img;
        for (std::size_t t = 0; t < gens.size(); ++t) {
          if (b.z[t] == 0) continue;
          Element p = b.left ? product(cand[c], gens[t]) : product(gens[t], cand[c]);
          img.add_scaled(p, QSeries::constant(A.trunc_order(), b.z[t]));
        }
        for (const auto& [h, v] : img) M(brow[bi] + b.pc->position.at(h), c) += v.at_zero();
      }
      IntMatrix bd = b.pc->complex.diff(b.deg - 1);
      for (std::size_t i = 0; i < bd.rows(); ++i)
        for (std::size_t j = 0; j < bd.cols(); ++j) M(brow[bi] + i, bcol[bi] + j) = -bd(i, j);
      for (std::size_t t = 0; t < gens.size(); ++t) rhs[brow[bi] + t] = b.z[t];
    }
    auto sol = IntegerSolver(M).solve(rhs);
    if (!sol) {
      res.absence[std::size_t(X)] = "no degree-0 cycle at " + A.objects()[std::size_t(X)] + " acts as identity on homology";
      continue;
    }
    Element e;
    for (std::size_t c = 0; c < cand.size(); ++c)
      if ((*sol)[c] != 0) e.add(cand[c], QSeries::constant(A.trunc_order(), (*sol)[c]));
    res.units[std::size_t(X)] = e;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Diagonal and dual diagonal

inline Bimodule diagonal_bimodule(const AlgPtr& A) {
  Bimodule P(A);
  const int n = int(A->objects().size());
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) P.set_basis(x, y, A->hom().basis(x, y));
  std::vector<int> key;
  for (const auto& [k, v] : A->ops()) {
    const int d = int(k.size());
    // module slot at every display position
    for (int l = 0; l < d; ++l) {
      key.assign(1, l);
      key.insert(key.end(), k.begin(), k.end());
      P.add_op(key, v);
    }
  }
  return P;
}

/// A^v(X,Y) = hom(Y,X)^v with degrees -|a|, and
/// mu^{l,1,k}(a_{k+l+1},..,a_{k+2}, a^v, a_k,..,a_1)
///   = (-1)^{|*|} <a^v, mu^{k+l+1}(a_k,..,a_1, *, a_{k+l+1},..,a_{k+2})> *^v.
inline Bimodule dual_diagonal_bimodule(const AlgPtr& A) {
  Bimodule P(A);
  const int n = int(A->objects().size());
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) P.set_basis(x, y, dual_basis(A->hom().basis(y, x)));
  auto dual_id = [&](int a) {
    const auto& g = A->hom().gen(a);
    return P.basis().id(g.tgt, g.src, g.local);
  };
  std::vector<int> key;
  for (const auto& [c, v] : A->ops()) {
    const int d = int(c.size());
    // c = [c_d, .., c_1]; bullet = c_p at display index d - p
    for (int p = 1; p <= d; ++p) {
      const int bullet = c[std::size_t(d - p)];
      const int s = sign_of(A->hom().degree(bullet));
      const int l = p - 1;
      for (const auto& [o, coef] : v) {
        // key: [c_{p-1}, .., c_1, o^v, c_d, .., c_{p+1}]
        key.assign(1, l);
        for (int m = p - 1; m >= 1; --m) key.push_back(c[std::size_t(d - m)]);
        key.push_back(dual_id(o));
        for (int m = d; m >= p + 1; --m) key.push_back(c[std::size_t(d - m)]);
        P.add_op(key, dual_id(bullet), s == 1 ? coef : -coef);
      }
    }
  }
  return P;
}

// ---------------------------------------------------------------------------
// Strict linear functors

class LinearFunctor {
public:
  LinearFunctor() = default;
  LinearFunctor(AlgPtr src, AlgPtr tgt, std::vector<int> object_map)
      : src_(std::move(src)), tgt_(std::move(tgt)), omap_(std::move(object_map)) {
    if (omap_.size() != src_->objects().size()) throw std::invalid_argument("LinearFunctor: object map size mismatch");
    for (int o : omap_)
      if (o < 0 || o >= int(tgt_->objects().size())) throw std::invalid_argument("LinearFunctor: object map out of range");
    const int n = int(omap_.size());
    mats_.resize(std::size_t(n * n));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        mats_[std::size_t(x * n + y)] = IntMatrix(tgt_->hom().basis(omap_[std::size_t(x)], omap_[std::size_t(y)]).size(), src_->hom().basis(x, y).size());
  }
  const AInftyStructure& source() const { return *src_; }
  const AInftyStructure& target() const { return *tgt_; }
  const AlgPtr& source_ptr() const { return src_; }
  const AlgPtr& target_ptr() const { return tgt_; }
  const std::vector<int>& object_map() const { return omap_; }
  IntMatrix& matrix(int x, int y) { return mats_[std::size_t(x * int(omap_.size()) + y)]; }
  const IntMatrix& matrix(int x, int y) const { return mats_[std::size_t(x * int(omap_.size()) + y)]; }

  /// image of a source generator, in target ids
  Element apply(int a) const {
    const auto& g = src_->hom().gen(a);
    const IntMatrix& m = matrix(g.src, g.tgt);
    int fx = omap_[std::size_t(g.src)], fy = omap_[std::size_t(g.tgt)];
    Element e;
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (m(i, std::size_t(g.local)) != 0) e.add(tgt_->hom().id(fx, fy, int(i)), QSeries::constant(src_->trunc_order(), m(i, std::size_t(g.local))));
    return e;
  }
  Element apply(const Element& v) const {
    Element e;
    for (const auto& [g, c] : v) e.add_scaled(apply(g), c);
    return e;
  }

  std::vector<std::string> structural_issues() const {
    std::vector<std::string> bad;
    if (src_->trunc_order() != tgt_->trunc_order()) bad.push_back("functor: truncation orders differ");
    const int n = int(omap_.size());
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        const IntMatrix& m = matrix(x, y);
        const auto& sb = src_->hom().basis(x, y);
        const auto& tb = tgt_->hom().basis(omap_[std::size_t(x)], omap_[std::size_t(y)]);
        if (m.rows() != tb.size() || m.cols() != sb.size()) {
          bad.push_back("functor matrix shape mismatch on " + src_->objects()[std::size_t(x)] + "," + src_->objects()[std::size_t(y)]);
          continue;
        }
        for (std::size_t i = 0; i < m.rows(); ++i)
          for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0 && tb.degree(i) != sb.degree(j))
              bad.push_back("functor not of degree 0 on " + sb[j].name + " -> " + tb[i].name);
      }
    return bad;
  }

private:
  AlgPtr src_, tgt_;
  std::vector<int> omap_;
  std::vector<IntMatrix> mats_;
};

/// Q mu_A^d(a_d,..,a_1) = mu_B^d(Q a_d,..,Q a_1) for d <= max_arity (d = 0 included).
inline CheckReport check_functor(const LinearFunctor& Q, int max_arity = 6) {
  auto bad = Q.structural_issues();
  if (!bad.empty()) throw StructuralError(bad);
  const auto& A = Q.source();
  const auto& B = Q.target();
  CheckReport rep;
  rep.max_arity = max_arity;
  std::vector<detail::Tuple> tuples;
  for (int X = 0; X < int(A.objects().size()); ++X) tuples.push_back({{}, {X}, -1});
  for (int d = 1; d <= max_arity; ++d) detail::enumerate_tuples(A.hom(), nullptr, d, -1, tuples);
  std::vector<Element> res(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t n) {
    const auto& t = tuples[n];
    const int d = int(t.x.size());
    Element R;
    if (d == 0) {
      R = Q.apply(A.curvature(t.obj[0]));
      R.add(B.curvature(Q.object_map()[std::size_t(t.obj[0])]), -1);
      res[n] = R;
      return;
    }
    std::vector<int> key;
    detail::alg_key(key, t.x.data(), d);
    if (const Element* e = A.op(key)) R = Q.apply(*e);
    // expand mu_B(Q a_d, .., Q a_1)
    std::vector<Element> imgs;
    for (int m = 0; m < d; ++m) imgs.push_back(Q.apply(t.x[std::size_t(m)]));
    std::vector<int> bkey(static_cast<std::size_t>(d));
    std::function<void(int, QSeries)> rec = [&](int m, QSeries coef) {
      if (m == d) {
        if (const Element* e = B.op(bkey)) R.add_scaled(*e, -coef);
        return;
      }
      for (const auto& [g, c] : imgs[std::size_t(m)]) {
        bkey[std::size_t(d - 1 - m)] = g;
        rec(m + 1, coef * c);
      }
    };
    rec(0, QSeries::constant(A.trunc_order(), 1));
    res[n] = R;
  });
  rep.tuples_checked = tuples.size();
  for (std::size_t n = 0; n < tuples.size(); ++n) {
    if (res[n].is_zero()) continue;
    std::vector<int> key;
    detail::alg_key(key, tuples[n].x.data(), int(tuples[n].x.size()));
    Violation v;
    v.arity = int(tuples[n].x.size());
    v.inputs = key.empty() ? "curvature at " + A.objects()[std::size_t(tuples[n].obj[0])] : A.describe(key);
    v.residual = res[n];
    v.residual_text = render(res[n], [&](int g) { return B.label(g); });
    rep.violations.push_back(std::move(v));
  }
  return rep;
}

/// Q*P over the source of Q: Q*P(X,Y) = P(QX, QY) and
/// mu(a_l,..,p,..,a_1) = mu_P(Q a_l,..,p,..,Q a_1).
inline Bimodule pullback_bimodule(const LinearFunctor& Q, const Bimodule& P) {
  if (&P.algebra() != &Q.target() && !(P.algebra() == Q.target()))
    throw std::invalid_argument("pullback_bimodule: bimodule is not over the functor's target");
  const auto& A = Q.source();
  const auto& om = Q.object_map();
  const int n = int(A.objects().size());
  Bimodule R(Q.source_ptr());
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) R.set_basis(x, y, P.basis().basis(om[std::size_t(x)], om[std::size_t(y)]));
  // target generator -> source generators mapping onto it
  std::unordered_map<int, std::vector<std::pair<int, Integer>>> pre;
  for (std::size_t a = 0; a < A.hom().size(); ++a)
    for (const auto& [b, c] : Q.apply(int(a))) pre[b].push_back({int(a), c.at_zero()});
  // module generator of P in pair (FX,FY) -> copies in R
  auto copies = [&](int pid) {
    std::vector<int> out;
    const auto& g = P.basis().gen(pid);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (om[std::size_t(x)] == g.src && om[std::size_t(y)] == g.tgt) out.push_back(R.basis().id(x, y, g.local));
    return out;
  };
  auto to_R = [&](const Element& e, int x, int y) {
    Element r;
    for (const auto& [g, c] : e) r.add(R.basis().id(x, y, P.basis().gen(g).local), c);
    return r;
  };
  for (const auto& [key, val] : P.ops()) {
    const int l = key[0], M = int(key.size()) - 1;
    std::vector<int> nat(static_cast<std::size_t>(M));
    for (int t = 0; t < M; ++t) nat[std::size_t(t)] = key[std::size_t(M - t)];
    const int r = M - 1 - l;
    // choose a source generator (or module copy) for each natural slot
    std::vector<int> pick(static_cast<std::size_t>(M)), obj(static_cast<std::size_t>(M) + 1);
    std::function<void(int, Integer)> rec = [&](int m, Integer coef) {
      if (m == M) {
        std::vector<int> rk;
        detail::bi_key(rk, pick.data(), M, r);
        Element contrib;
        contrib.add_scaled(to_R(val, obj[0], obj[std::size_t(M)]), QSeries::constant(A.trunc_order(), coef));
        R.add_op(rk, contrib);
        return;
      }
      if (m == r) {
        for (int c : copies(nat[std::size_t(m)])) {
          const auto& g = R.basis().gen(c);
          if (m > 0 && g.src != obj[std::size_t(m)]) continue;
          if (m == 0) obj[0] = g.src;
          pick[std::size_t(m)] = c;
          obj[std::size_t(m) + 1] = g.tgt;
          rec(m + 1, coef);
        }
        return;
      }
      auto it = pre.find(nat[std::size_t(m)]);
      if (it == pre.end()) return;
      for (const auto& [a, c] : it->second) {
        const auto& g = A.hom().gen(a);
        if (m > 0 && g.src != obj[std::size_t(m)]) continue;
        if (m == 0) obj[0] = g.src;
        pick[std::size_t(m)] = a;
        obj[std::size_t(m) + 1] = g.tgt;
        rec(m + 1, coef * c);
      }
    };
    rec(0, Integer(1));
  }
  return R;
}

} // namespace kit
