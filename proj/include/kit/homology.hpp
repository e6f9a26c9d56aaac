#pragma once
// Integer matrices, Smith normal form, homology with torsion.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graded.hpp"
#include "parallel.hpp"

namespace kit {

class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}
  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static IntMatrix from_rows(const std::vector<std::vector<Integer>>& rows, std::size_t cols_if_empty = 0) {
    std::size_t c = rows.empty() ? cols_if_empty : rows[0].size();
    IntMatrix m(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != c) throw std::invalid_argument("IntMatrix: ragged rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  Integer& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  bool is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Integer& x) { return x == 0; });
  }
  IntMatrix transpose() const {
    IntMatrix t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.c_ != b.r_) throw std::invalid_argument("IntMatrix: shape mismatch in product");
    IntMatrix m(a.r_, b.c_);
    for (std::size_t i = 0; i < a.r_; ++i)
      for (std::size_t k = 0; k < a.c_; ++k) {
        const Integer& x = a(i, k);
        if (x == 0) continue;
        for (std::size_t j = 0; j < b.c_; ++j) m(i, j) += x * b(k, j);
      }
    return m;
  }
  std::vector<Integer> apply(const std::vector<Integer>& v) const {
    if (v.size() != c_) throw std::invalid_argument("IntMatrix: vector length mismatch");
    std::vector<Integer> out(r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  void swap_rows(std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < c_; ++k) std::swap((*this)(i, k), (*this)(j, k));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < r_; ++k) std::swap((*this)(k, i), (*this)(k, j));
  }
  /// row_i += f * row_j
  void add_row(std::size_t i, std::size_t j, const Integer& f) {
    for (std::size_t k = 0; k < c_; ++k) (*this)(i, k) += f * (*this)(j, k);
  }
  void add_col(std::size_t i, std::size_t j, const Integer& f) {
    for (std::size_t k = 0; k < r_; ++k) (*this)(k, i) += f * (*this)(k, j);
  }
  void negate_row(std::size_t i) {
    for (std::size_t k = 0; k < c_; ++k) (*this)(i, k) = -(*this)(i, k);
  }

private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<Integer> a_;
};

/// Fraction-free (Bareiss) determinant.
inline Integer determinant(IntMatrix m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("determinant: matrix not square");
  if (n == 0) return 1;
  int sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

struct SmithForm {
  IntMatrix U, S, V; // S = U * M * V
  std::vector<Integer> diagonal() const {
    std::vector<Integer> d;
    for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i) d.push_back(S(i, i));
    return d;
  }
  std::size_t rank() const {
    std::size_t r = 0;
    for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i)
      if (S(i, i) != 0) ++r;
    return r;
  }
};

namespace detail {

inline Integer abs_int(const Integer& x) { return x < 0 ? Integer(-x) : x; }

// Reduces S in place; U/V receive the same row/column operations when given.
inline void smith_reduce(IntMatrix& S, IntMatrix* U, IntMatrix* V) {
  const std::size_t m = S.rows(), n = S.cols();
  auto swap_r = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    S.swap_rows(i, j);
    if (U) U->swap_rows(i, j);
  };
  auto swap_c = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    S.swap_cols(i, j);
    if (V) V->swap_cols(i, j);
  };
  auto add_r = [&](std::size_t i, std::size_t j, const Integer& f) {
    S.add_row(i, j, f);
    if (U) U->add_row(i, j, f);
  };
  auto add_c = [&](std::size_t i, std::size_t j, const Integer& f) {
    S.add_col(i, j, f);
    if (V) V->add_col(i, j, f);
  };

  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    // smallest nonzero entry of the trailing block becomes the pivot
    bool found = false;
    Integer best;
    std::size_t bi = t, bj = t;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (S(i, j) != 0) {
          Integer a = abs_int(S(i, j));
          if (!found || a < best) {
            found = true;
            best = a;
            bi = i;
            bj = j;
          }
        }
    if (!found) break;
    swap_r(t, bi);
    swap_c(t, bj);

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i)
        if (S(i, t) != 0) {
          Integer q = S(i, t) / S(t, t);
          if (q != 0) add_r(i, t, -q);
          if (S(i, t) != 0) clean = false;
        }
      for (std::size_t j = t + 1; j < n; ++j)
        if (S(t, j) != 0) {
          Integer q = S(t, j) / S(t, t);
          if (q != 0) add_c(j, t, -q);
          if (S(t, j) != 0) clean = false;
        }
      if (!clean) {
        // a remainder smaller than the pivot is left somewhere in row/column t
        Integer b = abs_int(S(t, t));
        std::size_t pi = t, pj = t;
        for (std::size_t i = t + 1; i < m; ++i)
          if (S(i, t) != 0 && abs_int(S(i, t)) < b) b = abs_int(S(i, t)), pi = i, pj = t;
        for (std::size_t j = t + 1; j < n; ++j)
          if (S(t, j) != 0 && abs_int(S(t, j)) < b) b = abs_int(S(t, j)), pi = t, pj = j;
        swap_r(t, pi);
        swap_c(t, pj);
        continue;
      }
      // divisibility of the trailing block
      bool moved = false;
      for (std::size_t i = t + 1; i < m && !moved; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (S(i, j) % S(t, t) != 0) {
            add_r(t, i, 1);
            moved = true;
            break;
          }
      if (!moved) break;
    }
    if (S(t, t) < 0) {
      S.negate_row(t);
      if (U) U->negate_row(t);
    }
  }
}

} // namespace detail

inline SmithForm smith_normal_form(const IntMatrix& M) {
  SmithForm f{IntMatrix::identity(M.rows()), M, IntMatrix::identity(M.cols())};
  detail::smith_reduce(f.S, &f.U, &f.V);
  return f;
}

/// Nonzero diagonal of the Smith form, in divisibility order.
inline std::vector<Integer> invariant_factors(const IntMatrix& M) {
  IntMatrix S = M;
  detail::smith_reduce(S, nullptr, nullptr);
  std::vector<Integer> d;
  for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i)
    if (S(i, i) != 0) d.push_back(S(i, i));
  return d;
}

/// Checks S = U M V, S diagonal with a divisibility chain, U and V unimodular.
inline bool verify_smith(const IntMatrix& M, const SmithForm& f) {
  if (f.U * M * f.V != f.S) return false;
  for (std::size_t i = 0; i < f.S.rows(); ++i)
    for (std::size_t j = 0; j < f.S.cols(); ++j)
      if (i != j && f.S(i, j) != 0) return false;
  auto d = f.diagonal();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0) return false;
    if (i + 1 < d.size()) {
      if (d[i] == 0 && d[i + 1] != 0) return false;
      if (d[i] != 0 && d[i + 1] % d[i] != 0) return false;
    }
  }
  auto du = determinant(f.U), dv = determinant(f.V);
  return (du == 1 || du == -1) && (dv == 1 || dv == -1);
}

/// Integer solutions of A x = b, reusing one Smith decomposition.
class IntegerSolver {
public:
  explicit IntegerSolver(const IntMatrix& A) : f_(smith_normal_form(A)), rows_(A.rows()), cols_(A.cols()) {}
  std::optional<std::vector<Integer>> solve(const std::vector<Integer>& b) const {
    if (b.size() != rows_) throw std::invalid_argument("IntegerSolver: rhs length mismatch");
    std::vector<Integer> ub = f_.U.apply(b);
    std::vector<Integer> y(cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      Integer s = (i < cols_) ? f_.S(i, i) : Integer(0);
      if (s == 0) {
        if (ub[i] != 0) return std::nullopt;
      } else {
        if (ub[i] % s != 0) return std::nullopt;
        y[i] = ub[i] / s;
      }
    }
    return f_.V.apply(y);
  }
  /// Z-basis of the kernel (columns of V beyond the rank).
  std::vector<std::vector<Integer>> kernel_basis() const {
    std::vector<std::vector<Integer>> ker;
    std::size_t r = f_.rank();
    for (std::size_t j = r; j < cols_; ++j) {
      std::vector<Integer> v(cols_);
      for (std::size_t i = 0; i < cols_; ++i) v[i] = f_.V(i, j);
      ker.push_back(std::move(v));
    }
    return ker;
  }

private:
  SmithForm f_;
  std::size_t rows_, cols_;
};

struct HomologyGroup {
  long long betti = 0;
  std::vector<Integer> torsion;
  bool is_zero() const { return betti == 0 && torsion.empty(); }
  friend bool operator==(const HomologyGroup&, const HomologyGroup&) = default;
};

/// Bounded cochain complex: ranks[i] in degree lo+i, diffs[i] maps degree lo+i
/// to lo+i+1 (ranks[i+1] x ranks[i]).
class IntChainComplex {
public:
  IntChainComplex() = default;
  IntChainComplex(int lo, std::vector<std::size_t> ranks, std::vector<IntMatrix> diffs)
      : lo_(lo), ranks_(std::move(ranks)), d_(std::move(diffs)) {
    if (ranks_.empty()) {
      if (!d_.empty()) throw std::invalid_argument("IntChainComplex: differentials without groups");
      return;
    }
    if (d_.size() + 1 != ranks_.size()) throw std::invalid_argument("IntChainComplex: need one differential between consecutive degrees");
    for (std::size_t i = 0; i < d_.size(); ++i)
      if (d_[i].rows() != ranks_[i + 1] || d_[i].cols() != ranks_[i])
        throw std::invalid_argument("IntChainComplex: differential shape mismatch at degree " + std::to_string(lo_ + int(i)));
  }
  int lo() const { return lo_; }
  int hi() const { return lo_ + int(ranks_.size()) - 1; }
  bool empty() const { return ranks_.empty(); }
  std::size_t rank(int k) const {
    if (k < lo_ || k > hi()) return 0;
    return ranks_[std::size_t(k - lo_)];
  }
  /// d_k: degree k -> k+1 (possibly with a zero dimension)
  IntMatrix diff(int k) const {
    if (k >= lo_ && k < hi()) return d_[std::size_t(k - lo_)];
    return IntMatrix(rank(k + 1), rank(k));
  }
  /// same groups, degrees moved up by s (no sign change)
  IntChainComplex regraded(int s) const {
    IntChainComplex c = *this;
    c.lo_ += s;
    return c;
  }
  /// d_{k+1} d_k = 0 for every k
  bool is_complex() const {
    for (int k = lo_; k + 1 < hi(); ++k)
      if (!(diff(k + 1) * diff(k)).is_zero()) return false;
    return true;
  }

private:
  int lo_ = 0;
  std::vector<std::size_t> ranks_;
  std::vector<IntMatrix> d_;
};

inline std::map<int, HomologyGroup> homology(const IntChainComplex& C) {
  if (!C.is_complex()) throw std::invalid_argument("homology: d^2 != 0");
  std::map<int, HomologyGroup> H;
  if (C.empty()) return H;
  const int lo = C.lo(), hi = C.hi();
  // invariant factors of each differential; independent per degree
  std::vector<std::vector<Integer>> inv(std::size_t(hi - lo + 2));
  parallel_for(inv.size(), [&](std::size_t i) { inv[i] = invariant_factors(C.diff(lo - 1 + int(i))); });
  auto factors = [&](int k) -> const std::vector<Integer>& { return inv[std::size_t(k - lo + 1)]; };
  for (int k = lo; k <= hi; ++k) {
    HomologyGroup g;
    g.betti = (long long)C.rank(k) - (long long)factors(k).size() - (long long)factors(k - 1).size();
    for (const auto& x : factors(k - 1))
      if (x > 1) g.torsion.push_back(x);
    H[k] = g;
  }
  return H;
}

inline bool is_acyclic(const IntChainComplex& C) {
  for (const auto& [k, g] : homology(C))
    if (!g.is_zero()) return false;
  return true;
}

inline IntChainComplex direct_sum(const IntChainComplex& A, const IntChainComplex& B) {
  if (A.empty()) return B;
  if (B.empty()) return A;
  int lo = std::min(A.lo(), B.lo()), hi = std::max(A.hi(), B.hi());
  std::vector<std::size_t> ranks;
  std::vector<IntMatrix> d;
  for (int k = lo; k <= hi; ++k) ranks.push_back(A.rank(k) + B.rank(k));
  for (int k = lo; k < hi; ++k) {
    IntMatrix m(A.rank(k + 1) + B.rank(k + 1), A.rank(k) + B.rank(k));
    IntMatrix a = A.diff(k), b = B.diff(k);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
    d.push_back(std::move(m));
  }
  return IntChainComplex(lo, std::move(ranks), std::move(d));
}

/// Degreewise maps f_k : C^k -> D^k; missing degrees are zero maps.
struct ChainMap {
  std::map<int, IntMatrix> components;
  IntMatrix at(int k, const IntChainComplex& C, const IntChainComplex& D) const {
    auto it = components.find(k);
    if (it != components.end()) return it->second;
    return IntMatrix(D.rank(k), C.rank(k));
  }
};

inline bool is_chain_map(const ChainMap& f, const IntChainComplex& C, const IntChainComplex& D) {
  for (const auto& [k, m] : f.components)
    if (m.rows() != D.rank(k) || m.cols() != C.rank(k)) return false;
  int lo = std::min(C.empty() ? 0 : C.lo(), D.empty() ? 0 : D.lo()) - 1;
  int hi = std::max(C.empty() ? 0 : C.hi(), D.empty() ? 0 : D.hi()) + 1;
  for (int k = lo; k <= hi; ++k)
    if (D.diff(k) * f.at(k, C, D) != f.at(k + 1, C, D) * C.diff(k)) return false;
  return true;
}

/// Cone^k = C^{k+1} (+) D^k, d(c, x) = (-d_C c, f c + d_D x).
inline IntChainComplex mapping_cone(const ChainMap& f, const IntChainComplex& C, const IntChainComplex& D) {
  if (C.empty() && D.empty()) return {};
  int lo = std::min(C.empty() ? D.lo() : C.lo() - 1, D.empty() ? C.lo() - 1 : D.lo());
  int hi = std::max(C.empty() ? D.hi() : C.hi() - 1, D.empty() ? C.hi() - 1 : D.hi());
  std::vector<std::size_t> ranks;
  std::vector<IntMatrix> d;
  for (int k = lo; k <= hi; ++k) ranks.push_back(C.rank(k + 1) + D.rank(k));
  for (int k = lo; k < hi; ++k) {
    std::size_t c0 = C.rank(k + 1), d0 = D.rank(k), c1 = C.rank(k + 2), d1 = D.rank(k + 1);
    IntMatrix m(c1 + d1, c0 + d0);
    IntMatrix dc = C.diff(k + 1), dd = D.diff(k), fk = f.at(k + 1, C, D);
    for (std::size_t i = 0; i < c1; ++i)
      for (std::size_t j = 0; j < c0; ++j) m(i, j) = -dc(i, j);
    for (std::size_t i = 0; i < d1; ++i) {
      for (std::size_t j = 0; j < c0; ++j) m(c1 + i, j) = fk(i, j);
      for (std::size_t j = 0; j < d0; ++j) m(c1 + i, c0 + j) = dd(i, j);
    }
    d.push_back(std::move(m));
  }
  return IntChainComplex(lo, std::move(ranks), std::move(d));
}

inline bool is_quasi_iso(const ChainMap& f, const IntChainComplex& C, const IntChainComplex& D) {
  if (!is_chain_map(f, C, D)) throw std::invalid_argument("is_quasi_iso: not a chain map");
  return is_acyclic(mapping_cone(f, C, D));
}

/// Second decision path, without cones: equal homology groups and every cycle
/// of D is f(cycle of C) plus a boundary. A surjection between isomorphic
/// finitely generated abelian groups is an isomorphism.
inline bool induces_homology_iso(const ChainMap& f, const IntChainComplex& C, const IntChainComplex& D) {
  if (!is_chain_map(f, C, D)) throw std::invalid_argument("induces_homology_iso: not a chain map");
  auto HC = homology(C), HD = homology(D);
  auto group = [](const std::map<int, HomologyGroup>& H, int k) {
    auto it = H.find(k);
    return it == H.end() ? HomologyGroup{} : it->second;
  };
  int lo = std::min(C.empty() ? 0 : C.lo(), D.empty() ? 0 : D.lo());
  int hi = std::max(C.empty() ? 0 : C.hi(), D.empty() ? 0 : D.hi());
  for (int k = lo; k <= hi; ++k) {
    if (!(group(HC, k) == group(HD, k))) return false;
    if (D.rank(k) == 0) continue;
    auto zc = IntegerSolver(C.diff(k)).kernel_basis();
    auto zd = IntegerSolver(D.diff(k)).kernel_basis();
    IntMatrix fk = f.at(k, C, D), bd = D.diff(k - 1);
    IntMatrix A(D.rank(k), zc.size() + bd.cols());
    for (std::size_t j = 0; j < zc.size(); ++j) {
      auto img = fk.apply(zc[j]);
      for (std::size_t i = 0; i < img.size(); ++i) A(i, j) = img[i];
    }
    for (std::size_t j = 0; j < bd.cols(); ++j)
      for (std::size_t i = 0; i < bd.rows(); ++i) A(i, zc.size() + j) = bd(i, j);
    IntegerSolver solver(A);
    for (const auto& z : zd)
      if (!solver.solve(z)) return false;
  }
  return true;
}

} // namespace kit
