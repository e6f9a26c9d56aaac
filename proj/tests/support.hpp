#pragma once
// Shared generators for tests: small dg algebras, random conjugates, random
// morphisms.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "kit/cc2.hpp"
#include "kit/dga.hpp"

namespace testkit {

using kit::DgAlgebra;
using kit::Generator;
using kit::GradedBasis;
using kit::Integer;

inline DgAlgebra exterior1() {
  DgAlgebra D;
  D.basis = GradedBasis({{"e", 0}, {"x", 1}});
  D.prod[{0, 0}] = {{0, 1}};
  D.prod[{0, 1}] = {{1, 1}};
  D.prod[{1, 0}] = {{1, 1}};
  return D;
}

/// k[x]/x^2 with x in degree 2 (a central even element)
inline DgAlgebra dual_numbers2() {
  DgAlgebra D;
  D.basis = GradedBasis({{"e", 0}, {"x", 2}});
  D.prod[{0, 0}] = {{0, 1}};
  D.prod[{0, 1}] = {{1, 1}};
  D.prod[{1, 0}] = {{1, 1}};
  return D;
}

inline DgAlgebra exterior2() {
  DgAlgebra D;
  D.basis = GradedBasis({{"e", 0}, {"x", 1}, {"y", 1}, {"xy", 2}});
  for (int g = 0; g < 4; ++g) {
    D.prod[{0, g}] = {{g, 1}};
    D.prod[{g, 0}] = {{g, 1}};
  }
  D.prod[{1, 2}] = {{3, 1}};
  D.prod[{2, 1}] = {{3, -1}};
  return D;
}

/// k[t]/t^2 (x) Lambda[eps], |t| = 2, |eps| = 1, d eps = m t
inline DgAlgebra koszul_pair(int m) {
  DgAlgebra D;
  D.basis = GradedBasis({{"e", 0}, {"t", 2}, {"eps", 1}, {"teps", 3}});
  for (int g = 0; g < 4; ++g) {
    D.prod[{0, g}] = {{g, 1}};
    D.prod[{g, 0}] = {{g, 1}};
  }
  D.prod[{1, 2}] = {{3, 1}};
  D.prod[{2, 1}] = {{3, 1}};
  D.d[2] = {{1, m}};
  return D;
}

/// upper triangular 2x2 integer matrices, all in degree 0
inline DgAlgebra upper_triangular() {
  DgAlgebra D;
  D.basis = GradedBasis({{"e11", 0}, {"e22", 0}, {"e12", 0}});
  D.prod[{0, 0}] = {{0, 1}};
  D.prod[{1, 1}] = {{1, 1}};
  D.prod[{0, 2}] = {{2, 1}};
  D.prod[{2, 1}] = {{2, 1}};
  return D;
}

/// cochains on an interval: vertices v0, v1, edge eps, d v0 = -eps, d v1 = eps
inline DgAlgebra interval() {
  DgAlgebra D;
  D.basis = GradedBasis({{"v0", 0}, {"v1", 0}, {"eps", 1}});
  D.prod[{0, 0}] = {{0, 1}};
  D.prod[{1, 1}] = {{1, 1}};
  D.prod[{0, 2}] = {{2, 1}};
  D.prod[{2, 1}] = {{2, 1}};
  D.d[0] = {{2, -1}};
  D.d[1] = {{2, 1}};
  return D;
}

/// A x B, rank adds
inline DgAlgebra product(const DgAlgebra& A, const DgAlgebra& B) {
  DgAlgebra D;
  std::vector<Generator> g;
  for (const auto& x : A.basis.generators()) g.push_back({"a." + x.name, x.degree});
  for (const auto& x : B.basis.generators()) g.push_back({"b." + x.name, x.degree});
  D.basis = GradedBasis(g);
  const int off = int(A.basis.size());
  auto shift = [](const DgAlgebra::Vec& v, int o) {
    DgAlgebra::Vec r;
    for (const auto& [i, c] : v) r.push_back({i + o, c});
    return r;
  };
  for (const auto& [a, v] : A.d) D.d[a] = v;
  for (const auto& [a, v] : B.d) D.d[a + off] = shift(v, off);
  for (const auto& [ab, v] : A.prod) D.prod[ab] = v;
  for (const auto& [ab, v] : B.prod) D.prod[{ab.first + off, ab.second + off}] = shift(v, off);
  return D;
}

using Mat = std::vector<std::vector<Integer>>;

/// random unimodular matrix preserving degrees
inline std::pair<Mat, Mat> random_unimodular(const GradedBasis& B, std::mt19937_64& rng) {
  const std::size_t n = B.size();
  Mat U(n, std::vector<Integer>(n)), V(n, std::vector<Integer>(n));
  for (std::size_t i = 0; i < n; ++i) U[i][i] = V[i][i] = 1;
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int step = 0; step < 12; ++step) {
    std::size_t i = rng() % n, j = rng() % n;
    if (i == j || B.degree(i) != B.degree(j)) continue;
    Integer c = coef(rng);
    // U <- E U with E = I + c e_ij, V <- V E^{-1}
    for (std::size_t k = 0; k < n; ++k) U[i][k] += c * U[j][k];
    for (std::size_t k = 0; k < n; ++k) V[k][j] -= c * V[k][i];
    if (rng() % 3 == 0) {
      for (std::size_t k = 0; k < n; ++k) U[i][k] = -U[i][k];
      for (std::size_t k = 0; k < n; ++k) V[k][i] = -V[k][i];
    }
  }
  return {U, V};
}

/// the dg algebra transported along a random degree-preserving change of basis
inline DgAlgebra conjugate(const DgAlgebra& D, std::mt19937_64& rng) {
  auto [U, V] = random_unimodular(D.basis, rng);
  const std::size_t n = D.basis.size();
  auto dense = [&](const DgAlgebra::Vec& v) {
    std::vector<Integer> r(n);
    for (const auto& [i, c] : v) r[std::size_t(i)] += c;
    return r;
  };
  auto apply_U = [&](const std::vector<Integer>& v) {
    DgAlgebra::Vec r;
    for (std::size_t i = 0; i < n; ++i) {
      Integer s = 0;
      for (std::size_t k = 0; k < n; ++k) s += U[i][k] * v[k];
      if (s != 0) r.push_back({int(i), s});
    }
    return r;
  };
  // new generator a' = U-image of old: f'(a'_j) = U f(V-column j)
  DgAlgebra R;
  R.object = D.object;
  R.basis = D.basis;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Integer> acc(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (V[k][j] == 0) continue;
      auto it = D.d.find(int(k));
      if (it == D.d.end()) continue;
      auto v = dense(it->second);
      for (std::size_t i = 0; i < n; ++i) acc[i] += V[k][j] * v[i];
    }
    auto r = apply_U(acc);
    if (!r.empty()) R.d[int(j)] = r;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<Integer> acc(n);
      for (std::size_t k = 0; k < n; ++k) {
        if (V[k][a] == 0) continue;
        for (std::size_t m = 0; m < n; ++m) {
          if (V[m][b] == 0) continue;
          auto it = D.prod.find({int(k), int(m)});
          if (it == D.prod.end()) continue;
          auto v = dense(it->second);
          for (std::size_t i = 0; i < n; ++i) acc[i] += V[k][a] * V[m][b] * v[i];
        }
      }
      auto r = apply_U(acc);
      if (!r.empty()) R.prod[{int(a), int(b)}] = r;
    }
  return R;
}

inline std::vector<DgAlgebra> base_algebras() {
  return {exterior1(), dual_numbers2(), exterior2(), koszul_pair(1), koszul_pair(2), koszul_pair(0),
          upper_triangular(), interval(), product(exterior1(), exterior1()), product(exterior1(), dual_numbers2()),
          product(interval(), kit::DgAlgebra{"X", GradedBasis({{"u", 0}}), {}, {{{0, 0}, {{0, 1}}}}})};
}

/// n random valid dg algebras of rank <= 4 as A-infinity structures
inline std::vector<kit::AlgPtr> random_algebras(int count, std::uint64_t seed, int trunc = kit::default_trunc_order) {
  std::mt19937_64 rng(seed);
  auto base = base_algebras();
  std::vector<kit::AlgPtr> out;
  for (int c = 0; c < count; ++c) {
    const auto& D = base[std::size_t(c) % base.size()];
    out.push_back(std::make_shared<const kit::AInftyStructure>(kit::to_ainfty(conjugate(D, rng), 0, trunc)));
  }
  return out;
}

inline kit::QSeries random_series(std::mt19937_64& rng, int order, int max_power = 2) {
  std::uniform_int_distribution<int> c(-3, 3);
  std::vector<Integer> v(std::size_t(std::min(order, max_power)) + 1);
  for (auto& x : v) x = c(rng);
  return kit::QSeries(order, v);
}

/// random morphism P -> Q of the given degree with components up to max_arity
inline kit::BimoduleMorphism random_morphism(const kit::BimodPtr& P, const kit::BimodPtr& Q, int degree, int max_arity,
                                             std::mt19937_64& rng, double density = 0.5, int max_power = 2) {
  kit::BimoduleMorphism f(P, Q, degree);
  const auto& A = P->algebra();
  std::vector<int> key;
  std::bernoulli_distribution keep(density);
  for (const auto& t : kit::bimodule_tuples(A, P->basis(), max_arity)) {
    kit::detail::bi_key(key, t.x.data(), int(t.x.size()), t.r);
    const int N = int(t.x.size());
    int deg = degree - (N - 1);
    for (int m = 0; m < N; ++m) deg += m == t.r ? P->basis().degree(t.x[std::size_t(m)]) : A.hom().degree(t.x[std::size_t(m)]);
    for (int g : Q->basis().ids(t.obj.front(), t.obj.back())) {
      if (Q->basis().degree(g) != deg || !keep(rng)) continue;
      f.add(key, g, random_series(rng, A.trunc_order(), max_power));
    }
  }
  return f;
}

} // namespace testkit
