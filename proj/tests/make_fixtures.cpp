// Writes the algebraic fixtures of fixtures/v1 into a directory.
//
//   make_fixtures <outdir>
//
// The closed delta and the nullhomotopy h of the interval fixture are found by
// solving the linear equations d(delta) = 0 and d h = rho o delta over Z on
// components of at most three inputs, then picking the first candidate (in a
// fixed pseudo-random order) whose total bimodule is acyclic at q = 0.

#include <iostream>
#include <map>
#include <random>

#include "kit/io.hpp"
#include "support.hpp"

using namespace kit;

namespace {

struct Slot {
  std::vector<int> key;
  int out;
};

std::vector<Slot> slots(const BimodPtr& P, const BimodPtr& Q, int degree, int arity) {
  std::vector<Slot> s;
  std::vector<int> key;
  const auto& A = P->algebra();
  for (const auto& t : bimodule_tuples(A, P->basis(), arity)) {
    detail::bi_key(key, t.x.data(), int(t.x.size()), t.r);
    const int N = int(t.x.size());
    int deg = degree - (N - 1);
    for (int m = 0; m < N; ++m) deg += m == t.r ? P->basis().degree(t.x[std::size_t(m)]) : A.hom().degree(t.x[std::size_t(m)]);
    for (int g : Q->basis().ids(t.obj.front(), t.obj.back()))
      if (Q->basis().degree(g) == deg) s.push_back({key, g});
  }
  return s;
}

using Coords = std::map<std::pair<std::vector<int>, int>, std::size_t>;

std::vector<Integer> coords(const BimoduleMorphism& f, Coords& C) {
  std::vector<Integer> v(C.size());
  for (const auto& [k, e] : f.components())
    for (const auto& [g, c] : e) {
      auto it = C.emplace(std::make_pair(k, g), C.size()).first;
      v.resize(C.size());
      v[it->second] = c.at_zero();
    }
  return v;
}

BimoduleMorphism from_vec(const BimodPtr& P, const BimodPtr& Q, int degree, const std::vector<Slot>& s, const std::vector<Integer>& x) {
  BimoduleMorphism f(P, Q, degree);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (x[i] != 0) f.add(s[i].key, s[i].out, QSeries::constant(P->trunc_order(), x[i]));
  return f;
}

IntMatrix d_matrix(const BimodPtr& P, const BimodPtr& Q, int degree, const std::vector<Slot>& s, int check, Coords& C) {
  std::vector<std::vector<Integer>> cols;
  for (const auto& sl : s) {
    BimoduleMorphism f(P, Q, degree);
    f.add(sl.key, sl.out, QSeries::constant(P->trunc_order(), 1));
    cols.push_back(coords(bimodule_hom_differential(f, check), C));
  }
  IntMatrix M(C.size(), s.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) M(i, j) = cols[j][i];
  return M;
}

/// closed morphisms P -> Q of the given degree with at most `arity` inputs
std::vector<std::vector<Integer>> closed_basis(const BimodPtr& P, const BimodPtr& Q, int degree, int arity, std::vector<Slot>& s) {
  s = slots(P, Q, degree, arity);
  Coords C;
  return IntegerSolver(d_matrix(P, Q, degree, s, arity + 1, C)).kernel_basis();
}

std::size_t weight(const BimoduleMorphism& f) {
  std::size_t w = 0;
  for (const auto& [k, e] : f.components()) w += e.size();
  return w;
}

void save(const std::string& dir, const std::string& name, const json& j) { io::write_file(dir + "/" + name, io::dump(j)); }

} // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <outdir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  std::mt19937_64 rng(20240917);

  // exterior algebra on one odd generator, n = 1
  auto ext = std::make_shared<const AInftyStructure>(to_ainfty(testkit::exterior1(), 1));
  save(dir, "exterior.json", io::structure_to_json(*ext));

  // one flipped sign that breaks exactly one relation
  {
    bool done = false;
    for (const auto& key : sorted_keys(ext->ops())) {
      for (const auto& [g, c] : ext->ops().at(key)) {
        AInftyStructure m = *ext;
        m.add_op(key, g, -c - c);
        if (check_associativity(m, 6).violations.size() == 1) {
          save(dir, "exterior_mutated.json", io::structure_to_json(m));
          done = true;
          break;
        }
      }
      if (done) break;
    }
    if (!done) std::cerr << "no single-violation mutation found\n";
  }

  // curvature: q x on k[x]/x^2 with |x| = 2, and the rejected constant version
  {
    AInftyStructure c = to_ainfty(testkit::dual_numbers2(), 0);
    c.add_op({}, 1, QSeries::monomial(c.trunc_order(), 1, 1));
    save(dir, "curved.json", io::structure_to_json(c));
    json bad = io::structure_to_json(c);
    bad["ops"][0]["coeff"] = json::array({1});
    save(dir, "curved_constant.json", bad);
  }

  // unit-only algebra and the unit split over two vertices
  {
    DgAlgebra u;
    u.basis = GradedBasis({{"e", 0}});
    u.prod[{0, 0}] = {{0, 1}};
    save(dir, "unit_only.json", io::structure_to_json(to_ainfty(u, 0)));
    DgAlgebra z;
    z.basis = GradedBasis({{"a", 0}, {"b", 1}});
    save(dir, "no_unit.json", io::structure_to_json(to_ainfty(z, 0)));
  }

  // closed delta on the exterior algebra whose q = 0 part is a quasi-isomorphism
  {
    auto V = std::make_shared<const Bimodule>(dual_diagonal_bimodule(ext));
    auto D = std::make_shared<const Bimodule>(diagonal_bimodule(ext));
    std::vector<Slot> s;
    auto ker = closed_basis(V, D, 1, 2, s);
    std::optional<BimoduleMorphism> best;
    for (int trial = 0; trial < 4000; ++trial) {
      std::vector<Integer> x(s.size());
      for (const auto& k : ker) {
        int c = int(rng() % 3) - 1;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * k[i];
      }
      auto f = from_vec(V, D, 1, s, x);
      if (f.is_zero() || !is_filtered_quasi_iso(f, 0, 0)) continue;
      if (!best || weight(f) < weight(*best)) best = f;
    }
    if (best) save(dir, "exterior_delta.json", io::morphism_to_json(*best, "dual_diagonal", "diagonal"));
    else std::cerr << "no delta for the exterior algebra\n";
  }

  // interval: A = cochains of [0,1], B = cochains of the two endpoints, n = 1
  {
    auto A = std::make_shared<const AInftyStructure>(to_ainfty(testkit::interval(), 1));
    DgAlgebra Bd;
    Bd.basis = GradedBasis({{"v0", 0}, {"v1", 0}});
    Bd.prod[{0, 0}] = {{0, 1}};
    Bd.prod[{1, 1}] = {{1, 1}};
    auto B = std::make_shared<const AInftyStructure>(to_ainfty(Bd, 1));
    LinearFunctor Qf(A, B, {0});
    Qf.matrix(0, 0) = IntMatrix::from_rows({{1, 0, 0}, {0, 1, 0}});
    auto Q = std::make_shared<const LinearFunctor>(Qf);
    auto in = prepare_total(A, Q, B);
    const int arity = 3;
    std::vector<Slot> s;
    auto ker = closed_basis(in.dual_diag, in.diag, 1, arity, s);
    auto hs = slots(in.dual_diag, in.pulled, 0, arity);
    Coords Ch;
    IntMatrix Mh = d_matrix(in.dual_diag, in.pulled, 0, hs, arity + 1, Ch);
    const std::size_t h_rows = Mh.rows();
    IntegerSolver Sh(Mh);
    std::optional<std::pair<BimoduleMorphism, BimoduleMorphism>> best;
    for (int trial = 0; trial < 3000; ++trial) {
      std::vector<Integer> x(s.size());
      for (const auto& k : ker) {
        int c = int(rng() % 3) - 1;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * k[i];
      }
      auto delta = from_vec(in.dual_diag, in.diag, 1, s, x);
      if (delta.is_zero()) continue;
      if (best && weight(delta) >= weight(best->first)) continue;
      auto rho = tautological_rho(*Q, in.diag, in.pulled);
      Coords C2 = Ch;
      auto rhs = coords(compose(rho, delta, arity + 1), C2);
      if (rhs.size() > h_rows) continue;
      rhs.resize(h_rows);
      auto sol = Sh.solve(rhs);
      if (!sol) continue;
      auto h = from_vec(in.dual_diag, in.pulled, 0, hs, *sol);
      TotalInputs t = in;
      t.delta = delta;
      t.h = h;
      auto rep = verify_total(t, 5);
      if (rep.ok() && rep.equations_ok()) best = std::make_pair(delta, h);
    }
    if (!best) {
      std::cerr << "no interval fixture found\n";
      return 1;
    }
    auto [delta, h] = *best;
    save(dir, "interval_A.json", io::structure_to_json(*A));
    save(dir, "interval_B.json", io::structure_to_json(*B));
    save(dir, "interval_Q.json", io::functor_to_json(*Q));
    save(dir, "interval_delta.json", io::morphism_to_json(delta, "dual_diagonal", "diagonal"));
    save(dir, "interval_h.json", io::morphism_to_json(h, "dual_diagonal", "pullback"));
    // one sign of h flipped
    {
      BimoduleMorphism hm = h;
      const auto key = sorted_keys(h.components()).front();
      const auto& [g, c] = h.components().at(key).entries().front();
      hm.add(key, g, -c - c);
      save(dir, "interval_h_mutated.json", io::morphism_to_json(hm, "dual_diagonal", "pullback"));
    }
    save(dir, "interval_h_zero.json", io::morphism_to_json(BimoduleMorphism(in.dual_diag, in.pulled, 0), "dual_diagonal", "pullback"));
    // delta plus a component that is not closed
    {
      BimoduleMorphism dm = delta;
      for (const auto& sl : s) {
        BimoduleMorphism e(in.dual_diag, in.diag, 1);
        e.add(sl.key, sl.out, QSeries::constant(A->trunc_order(), 1));
        if (!bimodule_hom_differential(e, arity + 1).is_zero()) {
          dm.add(sl.key, sl.out, QSeries::constant(A->trunc_order(), 1));
          break;
        }
      }
      save(dir, "interval_delta_open.json", io::morphism_to_json(dm, "dual_diagonal", "diagonal"));
    }
  }

  // complexes
  {
    IntChainComplex id(0, {1, 1}, {IntMatrix::from_rows({{1}})});
    save(dir, "cone_identity_complex.json", io::complex_to_json(id));
    IntChainComplex two(0, {1, 1}, {IntMatrix::from_rows({{2}})});
    save(dir, "times_two_complex.json", io::complex_to_json(two));
  }
  return 0;
}
