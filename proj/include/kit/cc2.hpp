#pragma once
// The dg category of bimodules: morphisms, their differential, composition,
// shifts, cones, and the three-piece total bimodule.
//
// For phi : P -> Q of degree |phi| and an input x_1, .., x_N (natural order,
// module element at x_{k+1}), every window x_{i+1}..x_{i+j} contributes
//   window holds p, inner phi, outer mu_Q : (-1)^{|phi| (||x_1|| + .. + ||x_i||)}
//   window holds p, inner mu_P, outer phi : (-1)^{|phi| + 1 + ||x_1|| + .. + ||x_i||}
//   window without p, inner mu_A, outer phi: (-1)^{|phi| + 1 + ||x_1|| + .. + ||x_i||}
// where ||p|| = |p| - 1 enters when p is among x_1..x_i. For (P, Q) the dual
// diagonal and the diagonal this is term by term the formula implemented
// literally in cc2_differential.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ainfty.hpp"
#include "homology.hpp"

namespace kit {

class BimoduleMorphism {
public:
  BimoduleMorphism() = default;
  BimoduleMorphism(BimodPtr src, BimodPtr tgt, int degree) : src_(std::move(src)), tgt_(std::move(tgt)), degree_(degree) {}

  const Bimodule& source() const { return *src_; }
  const Bimodule& target() const { return *tgt_; }
  const BimodPtr& source_ptr() const { return src_; }
  const BimodPtr& target_ptr() const { return tgt_; }
  const AInftyStructure& algebra() const { return src_->algebra(); }
  int degree() const { return degree_; }
  const OpTable& components() const { return comps_; }
  /// components are known exactly up to this input count (-1: all of them)
  int complete_to() const { return complete_to_; }
  void set_complete_to(int a) { complete_to_ = a; }

  void add(const std::vector<int>& key, int out, const QSeries& c) {
    Element& e = comps_[key];
    e.add(out, c);
    if (e.is_zero()) comps_.erase(key);
  }
  void add(const std::vector<int>& key, const Element& v) {
    if (v.is_zero()) return;
    Element& e = comps_[key];
    e.add(v);
    if (e.is_zero()) comps_.erase(key);
  }
  const Element* component(const std::vector<int>& key) const {
    auto it = comps_.find(key);
    return it == comps_.end() ? nullptr : &it->second;
  }
  bool is_zero() const { return comps_.empty(); }
  int max_arity() const {
    int m = 0;
    for (const auto& [k, v] : comps_) m = std::max(m, int(k.size()) - 1);
    return m;
  }

  /// output degree = sum of input degrees + degree - k - l; inputs compose
  std::vector<std::string> structural_issues() const {
    std::vector<std::string> bad;
    const auto& A = algebra();
    for (const auto& key : sorted_keys(comps_)) {
      const int l = key[0], M = int(key.size()) - 1;
      std::string where = "component (" + (l >= 0 && l < M ? src_->describe(key) : std::string("?")) + ")";
      if (l < 0 || l >= M) {
        bad.push_back(where + ": bad module slot");
        continue;
      }
      int deg = degree_ - (M - 1);
      int prev = -1, first = -1;
      bool ok = true;
      for (int m = 1; m <= M; ++m) {
        int id = key[std::size_t(M - m + 1)];
        const GenRef& g = (M - m) == l ? src_->basis().gen(id) : A.hom().gen(id);
        if (m == 1) first = g.src;
        else if (g.src != prev) ok = false;
        prev = g.tgt;
        deg += g.degree;
      }
      if (!ok) {
        bad.push_back(where + ": inputs do not compose");
        continue;
      }
      for (const auto& [g, c] : comps_.at(key)) {
        if (tgt_->basis().degree(g) != deg)
          bad.push_back(where + " -> " + tgt_->label(g) + ": degree " + std::to_string(tgt_->basis().degree(g)) + ", expected " + std::to_string(deg));
        if (tgt_->basis().gen(g).src != first || tgt_->basis().gen(g).tgt != prev) bad.push_back(where + ": output in wrong pair");
      }
    }
    return bad;
  }
  void validate() const {
    auto bad = structural_issues();
    if (!bad.empty()) throw std::invalid_argument("morphism is not degree-homogeneous or not composable:\n  " + bad.front());
  }

  BimoduleMorphism reduce_q0() const {
    BimoduleMorphism r(src_, tgt_, degree_);
    for (const auto& [k, v] : comps_) r.add(k, v.reduce_q0());
    r.complete_to_ = complete_to_;
    return r;
  }
  friend bool operator==(const BimoduleMorphism& a, const BimoduleMorphism& b) {
    return a.degree_ == b.degree_ && a.comps_ == b.comps_;
  }

private:
  BimodPtr src_, tgt_;
  int degree_ = 0;
  OpTable comps_;
  int complete_to_ = -1;
};

inline BimoduleMorphism identity_morphism(const BimodPtr& P) {
  BimoduleMorphism f(P, P, 0);
  for (std::size_t g = 0; g < P->basis().size(); ++g) f.add({0, int(g)}, int(g), QSeries::constant(P->trunc_order(), 1));
  return f;
}

namespace detail {

inline int arity_bound(int requested, int complete_to, bool curved) {
  if (complete_to < 0) return requested;
  return std::min(requested, complete_to - (curved ? 1 : 0));
}

inline void nat_with_hole(std::vector<int>& nat, const std::vector<int>& x, int i, int j) {
  nat.clear();
  for (int m = 0; m < i; ++m) nat.push_back(x[std::size_t(m)]);
  nat.push_back(-1);
  for (int m = i + j; m < int(x.size()); ++m) nat.push_back(x[std::size_t(m)]);
}

} // namespace detail

/// d phi in the dg category of A-bimodules, on all inputs with at most
/// max_arity entries.
inline BimoduleMorphism bimodule_hom_differential(const BimoduleMorphism& phi, int max_arity = 6) {
  phi.validate();
  const Bimodule& P = phi.source();
  const Bimodule& Q = phi.target();
  const AInftyStructure& A = P.algebra();
  const bool curved = A.curved();
  const int D = detail::arity_bound(max_arity, phi.complete_to(), curved);
  const int s = phi.degree();
  BimoduleMorphism out(phi.source_ptr(), phi.target_ptr(), s + 1);
  out.set_complete_to(D);
  if (D < 1) return out;
  auto tuples = bimodule_tuples(A, P.basis(), D);
  std::vector<Element> res(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t n) {
    const auto& t = tuples[n];
    const int N = int(t.x.size()), r = t.r;
    auto red = [&](int m) { return reduced(m == r ? P.basis().degree(t.x[std::size_t(m)]) : A.hom().degree(t.x[std::size_t(m)])); };
    Element R;
    std::vector<int> key, outer, nat;
    for (int j = curved ? 0 : 1; j <= N; ++j)
      for (int i = 0; i + j <= N; ++i) {
        int right = 0;
        for (int m = 0; m < i; ++m) right += red(m);
        const bool has_p = (i <= r && r < i + j);
        detail::nat_with_hole(nat, t.x, i, j);
        const std::size_t hole = std::size_t(1 + int(nat.size()) - 1 - i);
        if (has_p) {
          detail::bi_key(key, t.x.data() + i, j, r - i);
          if (const Element* in = phi.component(key)) {
            detail::bi_key(outer, nat.data(), int(nat.size()), i);
            detail::substitute(R, Q.ops(), outer, hole, *in, sign_of((long long)s * right));
          }
          if (const Element* in = P.op(key)) {
            detail::bi_key(outer, nat.data(), int(nat.size()), i);
            detail::substitute(R, phi.components(), outer, hole, *in, sign_of(s + 1 + right));
          }
        } else {
          const Element* in = nullptr;
          if (j == 0) {
            in = &A.curvature(t.obj[std::size_t(i)]);
            if (in->is_zero()) continue;
          } else {
            detail::alg_key(key, t.x.data() + i, j);
            in = A.op(key);
          }
          if (!in) continue;
          int r_out = r < i ? r : r - j + 1;
          detail::bi_key(outer, nat.data(), int(nat.size()), r_out);
          detail::substitute(R, phi.components(), outer, hole, *in, sign_of(s + 1 + right));
        }
      }
    res[n] = std::move(R);
  });
  std::vector<int> key;
  for (std::size_t n = 0; n < tuples.size(); ++n) {
    if (res[n].is_zero()) continue;
    detail::bi_key(key, tuples[n].x.data(), int(tuples[n].x.size()), tuples[n].r);
    out.add(key, res[n]);
  }
  return out;
}

/// psi o phi = sum (-1)^{|phi| (||x_1|| + .. + ||x_i||)} psi(.., phi(x_{i+1}, .., x_{i+j}), x_i, .., x_1).
inline BimoduleMorphism compose(const BimoduleMorphism& psi, const BimoduleMorphism& phi, int max_arity = 6) {
  if (&psi.source() != &phi.target() && psi.source_ptr() != phi.target_ptr())
    throw std::invalid_argument("compose: source of the outer map is not the target of the inner map");
  const Bimodule& P = phi.source();
  const AInftyStructure& A = P.algebra();
  int D = max_arity;
  if (phi.complete_to() >= 0) D = std::min(D, phi.complete_to());
  if (psi.complete_to() >= 0) D = std::min(D, psi.complete_to());
  BimoduleMorphism out(phi.source_ptr(), psi.target_ptr(), phi.degree() + psi.degree());
  out.set_complete_to(D);
  if (D < 1) return out;
  auto tuples = bimodule_tuples(A, P.basis(), D);
  std::vector<Element> res(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t n) {
    const auto& t = tuples[n];
    const int N = int(t.x.size()), r = t.r;
    Element R;
    std::vector<int> key, outer, nat;
    int right = 0;
    for (int i = 0; i <= r; ++i) {
      if (i > 0) right += reduced(A.hom().degree(t.x[std::size_t(i - 1)]));
      for (int j = r - i + 1; i + j <= N; ++j) {
        detail::bi_key(key, t.x.data() + i, j, r - i);
        const Element* in = phi.component(key);
        if (!in) continue;
        detail::nat_with_hole(nat, t.x, i, j);
        detail::bi_key(outer, nat.data(), int(nat.size()), i);
        detail::substitute(R, psi.components(), outer, std::size_t(int(nat.size()) - i), *in, sign_of((long long)phi.degree() * right));
      }
    }
    res[n] = std::move(R);
  });
  std::vector<int> key;
  for (std::size_t n = 0; n < tuples.size(); ++n) {
    if (res[n].is_zero()) continue;
    detail::bi_key(key, tuples[n].x.data(), int(tuples[n].x.size()), tuples[n].r);
    out.add(key, res[n]);
  }
  return out;
}

inline BimoduleMorphism add_morphisms(const BimoduleMorphism& a, const BimoduleMorphism& b, int sign_b = 1) {
  if (a.degree() != b.degree()) throw std::invalid_argument("add_morphisms: degrees differ");
  BimoduleMorphism r = a;
  for (const auto& [k, v] : b.components()) r.add(k, v.scaled(sign_b));
  if (b.complete_to() >= 0) r.set_complete_to(a.complete_to() < 0 ? b.complete_to() : std::min(a.complete_to(), b.complete_to()));
  return r;
}

// ---------------------------------------------------------------------------
// The literal CC^*(A,2) differential

/// (d psi)^{l,1,k}(a_{k+l+1},..,a_{k+2}, a^v_{k+1}, a_k,..,a_1) as the four
/// sums (i)-(iv), using mu_A directly and the pairing <a^v, .>. psi maps the
/// dual diagonal to the diagonal (keys in the dual diagonal's ids).
inline BimoduleMorphism cc2_differential(const BimoduleMorphism& psi, int max_arity = 6) {
  psi.validate();
  const Bimodule& Dv = psi.source();
  const AInftyStructure& A = Dv.algebra();
  const int n = psi.degree();
  const bool curved = A.curved();
  const int D = detail::arity_bound(max_arity, psi.complete_to(), curved);
  BimoduleMorphism out(psi.source_ptr(), psi.target_ptr(), n + 1);
  out.set_complete_to(D);
  if (D < 1) return out;
  const auto& H = A.hom();

  // psi^{l,1,k} on a display list with the dual entry at display index l
  auto psi_at = [&](const std::vector<int>& disp, int l) -> const Element* {
    std::vector<int> key;
    key.reserve(disp.size() + 1);
    key.push_back(l);
    key.insert(key.end(), disp.begin(), disp.end());
    return psi.component(key);
  };
  auto mu_at = [&](const std::vector<int>& disp) -> const Element* { return A.op(disp); };
  auto dual_of = [&](int a) {
    const auto& g = H.gen(a);
    return Dv.basis().id(g.tgt, g.src, g.local);
  };
  auto undual = [&](int v) {
    const auto& g = Dv.basis().gen(v);
    return H.id(g.tgt, g.src, g.local);
  };

  auto tuples = bimodule_tuples(A, Dv.basis(), D);
  std::vector<Element> res(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t idx) {
    const auto& t = tuples[idx];
    const int K = t.r, L = int(t.x.size()) - 1 - t.r;
    // a[1..K+L+1], a[K+1] the dual entry; X[0..K+L+1] objects
    auto a = [&](int m) { return t.x[std::size_t(m - 1)]; };
    auto X = [&](int m) { return t.obj[std::size_t(m)]; };
    auto nrm = [&](int m) { return m == K + 1 ? -H.degree(undual(a(m))) - 1 : H.degree(a(m)) - 1; };
    auto sum_nrm = [&](int from, int to) {
      int s = 0;
      for (int m = from; m <= to; ++m) s += nrm(m);
      return s;
    };
    auto range = [&](int from, int to) { // display list a_to, .., a_from
      std::vector<int> v;
      for (int m = to; m >= from; --m) v.push_back(a(m));
      return v;
    };
    Element R;

    // (i): mu^{k+l-j+i+2}(a_{k+l+1},..,a_{j+1}, psi^{j-k-1,1,k-i}(a_j,..,a_{i+1}), a_i,..,a_1)
    for (int i = 0; i <= K; ++i)
      for (int j = K + 1; j <= K + L + 1; ++j) {
        const Element* in = psi_at(range(i + 1, j), j - K - 1);
        if (!in) continue;
        const int sgn = sign_of((long long)n * sum_nrm(1, i));
        for (const auto& [g, c] : *in) {
          std::vector<int> disp = range(j + 1, K + L + 1);
          disp.push_back(g);
          auto tail = range(1, i);
          disp.insert(disp.end(), tail.begin(), tail.end());
          if (const Element* v = mu_at(disp)) R.add_scaled(*v, sgn == 1 ? c : -c);
        }
      }

    // mu^j(a_{i+j},..,a_{i+1}) on a window of a's (j = 0: curvature at X_i)
    auto window = [&](int i, int j) -> const Element* {
      if (j == 0) return A.curvature(X(i)).is_zero() ? nullptr : &A.curvature(X(i));
      return mu_at(range(i + 1, i + j));
    };

    // (ii): psi^{l,1,k-j+1}(.., a^v, a_k,.., a_{i+j+1}, mu^j(a_{i+j},..,a_{i+1}), a_i,..,a_1), i+j <= k
    for (int j = curved ? 0 : 1; j <= K; ++j)
      for (int i = 0; i + j <= K; ++i) {
        const Element* in = window(i, j);
        if (!in) continue;
        const int sgn = sign_of(n + 1 + sum_nrm(1, i));
        for (const auto& [g, c] : *in) {
          std::vector<int> disp = range(i + j + 1, K + L + 1);
          disp.push_back(g);
          auto tail = range(1, i);
          disp.insert(disp.end(), tail.begin(), tail.end());
          if (const Element* v = psi_at(disp, L)) R.add_scaled(*v, sgn == 1 ? c : -c);
        }
      }

    // (iii): psi^{l-j+1,1,k}(a_{k+l+1},.., mu^j(a_{i+j},..,a_{i+1}),.., a^v, a_k,..,a_1), i >= k+1
    for (int j = curved ? 0 : 1; j <= L; ++j)
      for (int i = K + 1; i + j <= K + L + 1; ++i) {
        const Element* in = window(i, j);
        if (!in) continue;
        const int sgn = sign_of(n + 1 + sum_nrm(1, i));
        for (const auto& [g, c] : *in) {
          std::vector<int> disp = range(i + j + 1, K + L + 1);
          disp.push_back(g);
          auto tail = range(1, i);
          disp.insert(disp.end(), tail.begin(), tail.end());
          if (const Element* v = psi_at(disp, L - j + 1)) R.add_scaled(*v, sgn == 1 ? c : -c);
        }
      }

    // (iv): psi^{k+l-i-j+1,1,i}(a_{k+l+1},..,a_{i+j+1},
    //          <a^v_{k+1}, mu^j(a_k,..,a_{i+1}, *, a_{i+j},..,a_{k+2})>, a_i,..,a_1)
    const int target = undual(a(K + 1));
    for (int i = 0; i <= K; ++i)
      for (int j = K + 1 - i; i + j <= K + L + 1; ++j) {
        const int sgn = sign_of(n + 1 + sum_nrm(1, i + j));
        // * ranges over hom(X_{i+j}, X_i)
        for (int b : H.ids(X(i + j), X(i))) {
          std::vector<int> inner = range(i + 1, K);
          inner.push_back(b);
          auto tail = range(K + 2, i + j);
          inner.insert(inner.end(), tail.begin(), tail.end());
          const Element* v = mu_at(inner);
          if (!v) continue;
          QSeries pair = v->coeff(target, A.trunc_order());
          if (pair.is_zero()) continue;
          std::vector<int> disp = range(i + j + 1, K + L + 1);
          disp.push_back(dual_of(b));
          auto rt = range(1, i);
          disp.insert(disp.end(), rt.begin(), rt.end());
          if (const Element* w = psi_at(disp, K + L + 1 - i - j)) R.add_scaled(*w, sgn == 1 ? pair : -pair);
        }
      }
    res[idx] = std::move(R);
  });
  std::vector<int> key;
  for (std::size_t m = 0; m < tuples.size(); ++m) {
    if (res[m].is_zero()) continue;
    detail::bi_key(key, tuples[m].x.data(), int(tuples[m].x.size()), tuples[m].r);
    out.add(key, res[m]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shifts

/// P[s]: degrees lowered by s, mu twisted by (-1)^{s (sum of ||a|| left of p)}.
inline Bimodule shift_bimodule(const Bimodule& P, int s) {
  Bimodule R(P.algebra_ptr());
  const int n = P.basis().objects();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) R.set_basis(x, y, shift_basis(P.basis().basis(x, y), s));
  const auto& A = P.algebra();
  for (const auto& [key, v] : P.ops()) {
    int left = 0;
    for (int t = 1; t <= key[0]; ++t) left += reduced(A.hom().degree(key[std::size_t(t)]));
    R.add_op(key, v.scaled(sign_of((long long)s * left)));
  }
  return R;
}

/// Parity of the twist carrying T : P -> Q to P[s_src] -> Q[s_tgt].
inline long long shift_twist(const AInftyStructure& A, const Bimodule& P, const std::vector<int>& key, int s_src, int s_tgt) {
  const int l = key[0];
  const int M = int(key.size()) - 1;
  long long right = 0, all = 0;
  for (int t = 1; t <= M; ++t) {
    if (t - 1 == l) continue;
    int r = reduced(A.hom().degree(key[std::size_t(t)]));
    all += r;
    if (t - 1 > l) right += r;
  }
  const long long p = reduced(P.basis().degree(key[std::size_t(l + 1)]));
  const long long ss = s_src;
  return ss * (right + p) - ss * (ss - 1) / 2 + (long long)s_tgt * (all + p - ss);
}

/// T viewed as a map P[s_src] -> Q[s_tgt]; the shifted modules are passed in.
inline BimoduleMorphism shift_morphism(const BimoduleMorphism& T, int s_src, int s_tgt, BimodPtr src_shifted, BimodPtr tgt_shifted) {
  BimoduleMorphism R(std::move(src_shifted), std::move(tgt_shifted), T.degree() + s_src - s_tgt);
  for (const auto& [key, v] : T.components())
    R.add(key, v.scaled(sign_of(shift_twist(T.algebra(), T.source(), key, s_src, s_tgt))));
  R.set_complete_to(T.complete_to());
  return R;
}

// ---------------------------------------------------------------------------
// Twisted sums: shifted pieces with degree-one arrows between them

struct TwistedPiece {
  BimodPtr module; // unshifted
  int shift = 0;
  std::string prefix;
};
struct TwistedArrow {
  int from = 0, to = 0;
  const BimoduleMorphism* map = nullptr; // between the unshifted pieces
};

struct TwistedSum {
  Bimodule total;
  std::vector<BimodPtr> shifted;                 // P_i[s_i]
  std::vector<std::vector<int>> embed;           // piece, piece id -> total id
  std::vector<std::pair<int, int>> origin;       // total id -> (piece, piece id)
  std::vector<BimoduleMorphism> hatted;          // arrows as degree-one maps of shifted pieces
};

/// The sum of P_i[s_i] whose structure adds the arrows T : P_a -> P_b, each
/// of degree 1 + s_b - s_a, twisted to degree one. Its bimodule relations on
/// the (a -> b) block read d(T^) + sum_c T^_{cb} o T^_{ac} = 0.
inline TwistedSum assemble_twisted(const AlgPtr& A, const std::vector<TwistedPiece>& pieces, const std::vector<TwistedArrow>& arrows) {
  TwistedSum ts;
  ts.total = Bimodule(A);
  const int n = int(A->objects().size());
  for (const auto& pc : pieces) {
    if (pc.module->algebra_ptr() != A && !(pc.module->algebra() == *A))
      throw std::invalid_argument("assemble_twisted: pieces over different algebras");
    ts.shifted.push_back(std::make_shared<const Bimodule>(shift_bimodule(*pc.module, pc.shift)));
    ts.embed.emplace_back(pc.module->basis().size(), -1);
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      std::vector<Generator> g;
      std::vector<std::pair<int, int>> src;
      for (std::size_t p = 0; p < pieces.size(); ++p) {
        const auto& B = ts.shifted[p]->basis();
        for (std::size_t i = 0; i < B.basis(x, y).size(); ++i) {
          g.push_back({pieces[p].prefix + B.basis(x, y)[i].name, B.basis(x, y)[i].degree});
          src.push_back({int(p), B.id(x, y, int(i))});
        }
      }
      ts.total.set_basis(x, y, GradedBasis(g));
      for (std::size_t i = 0; i < src.size(); ++i) {
        int tid = ts.total.basis().id(x, y, int(i));
        ts.embed[std::size_t(src[i].first)][std::size_t(src[i].second)] = tid;
        if (ts.origin.size() <= std::size_t(tid)) ts.origin.resize(std::size_t(tid) + 1);
        ts.origin[std::size_t(tid)] = src[i];
      }
    }
  auto move = [&](const std::vector<int>& key, int from_piece, const Element& v, int to_piece) {
    std::vector<int> k = key;
    k[std::size_t(k[0] + 1)] = ts.embed[std::size_t(from_piece)][std::size_t(key[std::size_t(key[0] + 1)])];
    Element e;
    for (const auto& [g, c] : v) e.add(ts.embed[std::size_t(to_piece)][std::size_t(g)], c);
    ts.total.add_op(k, e);
  };
  for (std::size_t p = 0; p < pieces.size(); ++p)
    for (const auto& [key, v] : ts.shifted[p]->ops()) move(key, int(p), v, int(p));
  for (const auto& ar : arrows) {
    const int want = 1 + pieces[std::size_t(ar.to)].shift - pieces[std::size_t(ar.from)].shift;
    if (ar.map->degree() != want)
      throw std::invalid_argument("assemble_twisted: arrow " + std::to_string(ar.from) + "->" + std::to_string(ar.to) + " has degree " +
                                  std::to_string(ar.map->degree()) + ", expected " + std::to_string(want));
    ts.hatted.push_back(shift_morphism(*ar.map, pieces[std::size_t(ar.from)].shift, pieces[std::size_t(ar.to)].shift,
                                       ts.shifted[std::size_t(ar.from)], ts.shifted[std::size_t(ar.to)]));
    for (const auto& [key, v] : ts.hatted.back().components()) move(key, ar.from, v, ar.to);
  }
  return ts;
}

/// Residual of a closedness test, empty when d phi = 0 on all checked inputs.
struct ClosednessReport {
  bool closed = true;
  int checked_arity = 0;
  std::vector<std::string> residual; // rendered nonzero components
};

inline ClosednessReport report_zero(const BimoduleMorphism& r, int arity, std::size_t limit = 20) {
  ClosednessReport rep;
  rep.checked_arity = arity;
  rep.closed = r.is_zero();
  for (const auto& key : sorted_keys(r.components())) {
    if (rep.residual.size() >= limit) break;
    rep.residual.push_back(r.source().describe(key) + " -> " + render(r.components().at(key), [&](int g) { return r.target().label(g); }));
  }
  return rep;
}

/// Cone of a closed phi : P -> Q: P[1 - |phi|] (+) Q with phi twisted to degree one.
inline Bimodule mapping_cone(const BimoduleMorphism& phi, int max_arity = 6) {
  auto d = bimodule_hom_differential(phi, max_arity);
  if (!d.is_zero()) {
    auto rep = report_zero(d, max_arity, 5);
    std::string msg = "mapping_cone: morphism is not closed; residual d(phi):";
    for (const auto& s : rep.residual) msg += "\n  " + s;
    throw std::invalid_argument(msg);
  }
  const AlgPtr& A = phi.source().algebra_ptr();
  std::vector<TwistedPiece> pieces = {{phi.source_ptr(), 1 - phi.degree(), "src."}, {phi.target_ptr(), 0, "tgt."}};
  std::vector<TwistedArrow> arrows = {{0, 1, &phi}};
  return assemble_twisted(A, pieces, arrows).total;
}

// ---------------------------------------------------------------------------
// Filtered quasi-isomorphisms

/// q = 0 reduction of phi^{0,1,0} on the (x, y) complexes, as a degree
/// preserving chain map after regrading the source by |phi|.
inline bool is_filtered_quasi_iso(const BimoduleMorphism& phi, int x, int y) {
  auto cp = bimodule_complexes(phi.source());
  auto cq = bimodule_complexes(phi.target());
  const PairComplex& P = cp.at({x, y});
  const PairComplex& Q = cq.at({x, y});
  IntChainComplex C = P.complex.regraded(phi.degree());
  ChainMap f;
  for (const auto& [k, gens] : P.gens_by_degree) {
    const int kq = k + phi.degree();
    IntMatrix m(Q.complex.rank(kq), gens.size());
    for (std::size_t c = 0; c < gens.size(); ++c) {
      const Element* e = phi.component({0, gens[c]});
      if (!e) continue;
      for (const auto& [g, v] : *e)
        if (v.at_zero() != 0) m(Q.position.at(g), c) += v.at_zero();
    }
    f.components[kq] = m;
  }
  return is_quasi_iso(f, C, Q.complex);
}

// ---------------------------------------------------------------------------
// Total bimodule: A^v[-n] -> A -> Q*B

struct TotalInputs {
  AlgPtr A, B;
  std::shared_ptr<const LinearFunctor> Q;
  BimodPtr dual_diag, diag, pulled; // A^v, A, Q*B (unshifted)
  BimoduleMorphism delta;           // A^v -> A, degree n
  BimoduleMorphism h;               // A^v -> Q*B, degree n - 1
};

inline TotalInputs prepare_total(const AlgPtr& A, const std::shared_ptr<const LinearFunctor>& Q, const AlgPtr& B) {
  TotalInputs in;
  in.A = A;
  in.B = B;
  in.Q = Q;
  in.dual_diag = std::make_shared<const Bimodule>(dual_diagonal_bimodule(A));
  in.diag = std::make_shared<const Bimodule>(diagonal_bimodule(A));
  in.pulled = std::make_shared<const Bimodule>(pullback_bimodule(*Q, diagonal_bimodule(B)));
  in.delta = BimoduleMorphism(in.dual_diag, in.diag, A->cy_dim());
  in.h = BimoduleMorphism(in.dual_diag, in.pulled, A->cy_dim() - 1);
  return in;
}

/// rho^{0,1,0} = Q, higher components zero.
inline BimoduleMorphism tautological_rho(const LinearFunctor& Q, const BimodPtr& diag, const BimodPtr& pulled) {
  BimoduleMorphism rho(diag, pulled, 0);
  const auto& A = Q.source();
  for (std::size_t a = 0; a < A.hom().size(); ++a) {
    const auto& g = A.hom().gen(int(a));
    for (const auto& [b, c] : Q.apply(int(a))) {
      int local = Q.target().hom().gen(b).local;
      rho.add({0, int(a)}, pulled->basis().id(g.src, g.tgt, local), c);
    }
  }
  return rho;
}

struct TotalReport {
  ClosednessReport delta_closed;     // d delta = 0
  CheckReport functor;               // Q strict functor
  ClosednessReport rho_closed;       // d rho = 0
  ClosednessReport h_equation;       // d h = rho o delta (see nullhomotopy_residual)
  CheckReport total;                 // bimodule relations of the assembled sum
  std::map<std::pair<int, int>, std::map<int, HomologyGroup>> q0_homology;
  bool acyclic = true;
  std::string q0_error; // set when the q = 0 complexes cannot be formed
  bool ok() const { return total.ok() && acyclic; }
  bool equations_ok() const { return delta_closed.closed && functor.ok() && rho_closed.closed && h_equation.closed; }
};

struct TotalBimodule {
  TwistedSum sum;
  BimoduleMorphism rho;
  BimoduleMorphism minus_h; // the (dual -> quot) arrow
  int shift_dual = 0, shift_diag = 1, shift_quot = 0;
};

/// Pieces A^v[2-n], A[1], Q*B with arrows delta, rho, -h. The A^v[2-n]
/// summand is A^v[-n] moved by the two steps of the three-term cone. With the
/// arrow -h the (dual -> quot) relation block is exactly d h = rho o delta.
inline TotalBimodule total_complex(const TotalInputs& in) {
  TotalBimodule T;
  const int n = in.A->cy_dim();
  T.shift_dual = 2 - n;
  T.rho = tautological_rho(*in.Q, in.diag, in.pulled);
  T.minus_h = BimoduleMorphism(in.dual_diag, in.pulled, in.h.degree());
  for (const auto& [k, v] : in.h.components()) T.minus_h.add(k, v.scaled(-1));
  std::vector<TwistedPiece> pieces = {{in.dual_diag, T.shift_dual, "dual."}, {in.diag, T.shift_diag, "diag."}, {in.pulled, T.shift_quot, "quot."}};
  std::vector<TwistedArrow> arrows = {{0, 1, &in.delta}, {1, 2, &T.rho}, {0, 2, &T.minus_h}};
  T.sum = assemble_twisted(in.A, pieces, arrows);
  return T;
}

/// d h - rho o delta, computed from the twisted arrows: the (dual -> quot)
/// block of the total relations is d((-h)^) + rho^ o delta^, untwisted here.
inline BimoduleMorphism nullhomotopy_residual(const TotalBimodule& T, const TotalInputs& in, int max_arity) {
  const auto& dh = bimodule_hom_differential(T.sum.hatted[2], max_arity);
  auto comp = compose(T.sum.hatted[1], T.sum.hatted[0], max_arity);
  auto sum = add_morphisms(dh, comp);
  // back to the unshifted pieces
  BimoduleMorphism r(in.dual_diag, in.pulled, in.h.degree() + 1);
  for (const auto& [key, v] : sum.components())
    r.add(key, v.scaled(-sign_of(shift_twist(*in.A, *in.dual_diag, key, T.shift_dual, T.shift_quot))));
  r.set_complete_to(sum.complete_to());
  return r;
}

inline TotalReport verify_total(const TotalInputs& in, int max_arity = 6) {
  TotalReport rep;
  TotalBimodule T = total_complex(in);
  rep.delta_closed = report_zero(bimodule_hom_differential(in.delta, max_arity), max_arity);
  rep.functor = check_functor(*in.Q, max_arity);
  rep.rho_closed = report_zero(bimodule_hom_differential(T.rho, max_arity), max_arity);
  rep.h_equation = report_zero(nullhomotopy_residual(T, in, max_arity), max_arity);
  rep.total = check_bimodule(T.sum.total, max_arity);
  try {
    for (const auto& [pair, pc] : bimodule_complexes(T.sum.total)) {
      auto H = homology(pc.complex);
      for (const auto& [k, g] : H)
        if (!g.is_zero()) rep.acyclic = false;
      rep.q0_homology[pair] = H;
    }
  } catch (const StructuralError& e) {
    // the q = 0 part of the total differential is not a differential
    rep.acyclic = false;
    rep.q0_error = e.what();
  }
  return rep;
}

} // namespace kit
