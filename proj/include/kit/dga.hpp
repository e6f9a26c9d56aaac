#pragma once
// Single-object dg algebras and their A-infinity structures.

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ainfty.hpp"

namespace kit {

/// Integer dg algebra on one object: d raises degree by one, product a*b is
/// stored as prod[{a, b}]. Entries are sparse (generator index, coefficient).
struct DgAlgebra {
  using Vec = std::vector<std::pair<int, Integer>>;
  std::string object = "X";
  GradedBasis basis;
  std::map<int, Vec> d;
  std::map<std::pair<int, int>, Vec> prod;
};

/// mu^1(a) = (-1)^{|a|} da, mu^2(a2, a1) = (-1)^{|a1|} a2 a1.
inline AInftyStructure to_ainfty(const DgAlgebra& D, int cy_dim = 0, int trunc_order = default_trunc_order) {
  AInftyStructure A({D.object}, cy_dim, trunc_order);
  A.set_hom(0, 0, D.basis);
  const auto& ids = A.hom().ids(0, 0);
  for (const auto& [a, v] : D.d) {
    const int s = sign_of(D.basis.degree(std::size_t(a)));
    for (const auto& [g, c] : v) A.add_op({ids[std::size_t(a)]}, ids[std::size_t(g)], QSeries::constant(trunc_order, c * s));
  }
  for (const auto& [ab, v] : D.prod) {
    const int s = sign_of(D.basis.degree(std::size_t(ab.second)));
    for (const auto& [g, c] : v)
      A.add_op({ids[std::size_t(ab.first)], ids[std::size_t(ab.second)]}, ids[std::size_t(g)], QSeries::constant(trunc_order, c * s));
  }
  return A;
}

} // namespace kit
