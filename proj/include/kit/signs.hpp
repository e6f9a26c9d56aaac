#pragma once
// Orientation sign bookkeeping for the boundary of the two-sided disc
// moduli spaces. Every quantity is a parity in {0, 1}.

#include <array>
#include <atomic>
#include <stdexcept>
#include <string>
#include <vector>

#include "parallel.hpp"

namespace kit::signs {

enum class Case { i, ii, iii, iv };

inline std::string case_name(Case c) {
  switch (c) {
  case Case::i: return "i";
  case Case::ii: return "ii";
  case Case::iii: return "iii";
  case Case::iv: return "iv";
  }
  return "?";
}

inline Case parse_case(const std::string& s) {
  if (s == "i") return Case::i;
  if (s == "ii") return Case::ii;
  if (s == "iii") return Case::iii;
  if (s == "iv") return Case::iv;
  throw std::invalid_argument("unknown stratum case '" + s + "'");
}

inline int mod2(long long v) { return int(((v % 2) + 2) % 2); }

struct StratumDescriptor {
  Case kind = Case::i;
  int k = 0, l = 0, i = 0, j = 0;

  bool nonnegative() const { return k >= 0 && l >= 0 && i >= 0 && j >= 0; }
  /// index ranges of the four strata, with inputs a_1..a_{k+l+1} and the dual
  /// entry at k+1:
  ///   (i)   psi on a_{i+1}..a_j:              i <= k, k+1 <= j <= k+l+1
  ///   (ii)  mu^j on a_{i+1}..a_{i+j}:          j >= 1, i+j <= k
  ///   (iii) mu^j on a_{i+1}..a_{i+j}:          j >= 1, i >= k+1, i+j <= k+l+1
  ///   (iv)  mu^j around the dual entry:        j >= 1, i <= k, k+1 <= i+j <= k+l+1
  bool in_range() const {
    if (!nonnegative()) return false;
    switch (kind) {
    case Case::i: return i <= k && k + 1 <= j && j <= k + l + 1;
    case Case::ii: return j >= 1 && i + j <= k;
    case Case::iii: return j >= 1 && i >= k + 1 && i + j <= k + l + 1;
    case Case::iv: return j >= 1 && i <= k && k + 1 <= i + j && i + j <= k + l + 1;
    }
    return false;
  }
  std::string str() const {
    return "(" + case_name(kind) + ") k=" + std::to_string(k) + " l=" + std::to_string(l) + " i=" + std::to_string(i) + " j=" + std::to_string(j);
  }
};

/// degrees |x_1|, .., |x_{k+l+1}| and n
struct DegreeVector {
  std::vector<int> x;
  int n = 0;
  int at(int m) const { return x[std::size_t(m - 1)]; } // 1-based
};

/// The stratum sign *, evaluated literally.
inline int boundary_stratum_sign(const StratumDescriptor& d) {
  if (!d.nonnegative()) throw std::invalid_argument("boundary_stratum_sign: negative index in " + d.str());
  const long long k = d.k, l = d.l, i = d.i, j = d.j;
  switch (d.kind) {
  case Case::i: return mod2((i + 1) * (j + k + l) + j * (k + l) + 1);
  case Case::ii: return mod2(j * (i + k + l) + i + j);
  case Case::iii: return mod2(j * (i + k + l) + i + 1);
  case Case::iv: return mod2(j * l + j + k + 1);
  }
  return 0;
}

/// sum_m m |x_m|
inline int artificial_sign_d(const std::vector<int>& degrees) {
  long long s = 0;
  for (std::size_t m = 0; m < degrees.size(); ++m) s += (long long)(m + 1) * degrees[m];
  return mod2(s);
}

/// n|x_1| + .. + (n+k)|x_{k+1}| + (k+1)|x_{k+2}| + .. + (k+l)|x_{k+l+1}| + k
inline int artificial_sign_kl(int k, int l, const DegreeVector& v) {
  if (k < 0 || l < 0 || int(v.x.size()) != k + l + 1)
    throw std::invalid_argument("artificial_sign_kl: need k + l + 1 degrees");
  long long s = k;
  for (int m = 1; m <= k + 1; ++m) s += (long long)(v.n + m - 1) * v.at(m);
  for (int m = k + 2; m <= k + l + 1; ++m) s += (long long)(m - 1) * v.at(m);
  return mod2(s);
}

/// Signs of the four sums in the differential on CC*(A,2). `degrees` are
/// |a_1|, .., |a_{k+l+1}| with entry k+1 the degree of the dual input a^v_{k+1};
/// reduced degrees are |a| - 1 throughout.
inline int dag_sign(Case part, int psi_degree, int k, int l, int i, int j, const std::vector<int>& degrees) {
  if (int(degrees.size()) != k + l + 1) throw std::invalid_argument("dag_sign: need k + l + 1 degrees");
  auto red_sum = [&](int upto) {
    if (upto > k + l + 1) throw std::invalid_argument("dag_sign: index beyond the inputs");
    long long s = 0;
    for (int m = 1; m <= upto; ++m) s += degrees[std::size_t(m - 1)] - 1;
    return s;
  };
  switch (part) {
  case Case::i: return mod2((long long)psi_degree * red_sum(i));
  case Case::ii:
  case Case::iii: return mod2(psi_degree + 1 + red_sum(i));
  case Case::iv: return mod2(psi_degree + 1 + red_sum(i + j));
  }
  return 0;
}

/// |x| of the inner output in stratum (iv):
/// -|x_{i+1}| - .. - |x_k| + |x_{k+1}| - |x_{k+2}| - .. - |x_{i+j}| - 2 + j
inline long long inner_degree_iv(const StratumDescriptor& d, const DegreeVector& v) {
  long long s = v.at(d.k + 1) - 2 + d.j;
  for (int m = d.i + 1; m <= d.k; ++m) s -= v.at(m);
  for (int m = d.k + 2; m <= d.i + d.j; ++m) s -= v.at(m);
  return s;
}

struct SplittingTerms {
  int koszul1 = 0, koszul2 = 0, ddag_j = 0, ddag_outer = 0, star = 0;
  int dag = 0, remainder = 0;
  int lhs() const { return mod2(koszul1 + koszul2 + ddag_j + ddag_outer + star); }
  int rhs() const { return mod2(dag + remainder); }
  bool consistent() const { return lhs() == rhs(); }
};

/// Mutation switches for negative controls.
struct SignMutation {
  bool drop_k_in_star_iv = false;
};

/// Literal evaluation of the case (iv) Koszul computation, without a range
/// check. |psi| = n and the dual input has degree -|x_{k+1}|.
inline SplittingTerms evaluate_splitting(const StratumDescriptor& d, const DegreeVector& v, SignMutation mut = {}) {
  const int k = d.k, l = d.l, i = d.i, j = d.j, n = v.n;
  if (!d.nonnegative() || int(v.x.size()) != k + l + 1 || i + j > k + l + 1)
    throw std::invalid_argument("evaluate_splitting: indices do not fit the degree vector");
  const long long x = inner_degree_iv(d, v);
  SplittingTerms t;
  long long s = j;
  for (int m = i + 1; m <= k; ++m) s += v.at(m);
  t.koszul1 = mod2(s);
  s = 0;
  for (int m = k + 2; m <= i + j; ++m) s += v.at(m);
  long long s2 = (long long)n + k + l;
  for (int m = k + 1; m <= k + l + 1; ++m) s2 += v.at(m);
  t.koszul2 = mod2((long long)n * s + (long long)j * s2);
  // ddag_j on (x_{k+2}, .., x_{i+j}, x, x_{i+1}, .., x_k)
  s = 0;
  for (int m = k + 2; m <= i + j; ++m) s += (long long)(m - k - 1) * v.at(m);
  s += (long long)(i + j - k) * x;
  for (int m = i + 1; m <= k; ++m) s += (long long)(j - k + m) * v.at(m);
  t.ddag_j = mod2(s);
  // ddag_{i, k+l-i-j+1} on (x_1, .., x_i, x, x_{i+j+1}, .., x_{k+l+1})
  s = i;
  for (int m = 1; m <= i; ++m) s += (long long)(n + m - 1) * v.at(m);
  s += (long long)(n + i) * x;
  for (int m = i + j + 1; m <= k + l + 1; ++m) s += (long long)(m - j) * v.at(m);
  t.ddag_outer = mod2(s);
  t.star = mod2(j * l + j + (mut.drop_k_in_star_iv ? 0 : k) + 1);
  std::vector<int> deg = v.x;
  deg[std::size_t(k)] = -v.at(k + 1);
  t.dag = dag_sign(Case::iv, n, k, l, i, j, deg);
  long long sum = n;
  for (int m = 1; m <= k + l + 1; ++m) sum += v.at(m);
  t.remainder = mod2(artificial_sign_kl(k, l, v) + sum);
  return t;
}

/// True iff the stratum (iv) signs add up to dag_(iv) plus the splitting
/// independent remainder. Descriptors outside the (iv) range are rejected.
inline bool verify_splitting_consistency(const StratumDescriptor& d, const DegreeVector& v, SignMutation mut = {}) {
  if (d.kind != Case::iv) throw std::invalid_argument("verify_splitting_consistency: needs a case (iv) descriptor");
  if (!d.in_range()) throw std::invalid_argument("verify_splitting_consistency: indices outside the (iv) range: " + d.str());
  if (int(v.x.size()) != d.k + d.l + 1) throw std::invalid_argument("verify_splitting_consistency: need k + l + 1 degrees");
  return evaluate_splitting(d, v, mut).consistent();
}

struct SweepFailure {
  StratumDescriptor d;
  DegreeVector v;
};

struct SweepReport {
  long long instances = 0;    // descriptor and degree vector pairs checked
  long long descriptors = 0;  // valid (k,l,i,j,n) combinations
  long long skipped = 0;      // (k,l,i,j) in the box but outside the (iv) range
  long long failures = 0;
  long long remainder_mismatches = 0; // (i,j)-dependence of LHS - dag
  std::vector<SweepFailure> examples;
  bool ok() const { return failures == 0 && remainder_mismatches == 0; }
};

/// Exhaustive sweep over k,l,i,j <= max_index, n <= max_n, degrees in
/// [0, max_degree]. Also checks that lhs - dag_(iv) depends only on (k,l),
/// n and the degrees.
inline SweepReport splitting_sweep(int max_index = 3, int max_n = 3, int max_degree = 3, SignMutation mut = {}, std::size_t keep = 10) {
  struct Job {
    int k, l, n;
  };
  std::vector<Job> jobs;
  for (int k = 0; k <= max_index; ++k)
    for (int l = 0; l <= max_index; ++l)
      for (int n = 0; n <= max_n; ++n) jobs.push_back({k, l, n});
  std::vector<SweepReport> part(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t idx) {
    const auto [k, l, n] = jobs[idx];
    SweepReport& r = part[idx];
    std::vector<StratumDescriptor> ds;
    for (int i = 0; i <= max_index; ++i)
      for (int j = 0; j <= max_index; ++j) {
        StratumDescriptor d{Case::iv, k, l, i, j};
        if (d.in_range()) ds.push_back(d);
        else ++r.skipped;
      }
    r.descriptors = (long long)ds.size();
    const int L = k + l + 1;
    DegreeVector v;
    v.n = n;
    v.x.assign(std::size_t(L), 0);
    const int base = max_degree + 1;
    long long total = 1;
    for (int m = 0; m < L; ++m) total *= base;
    for (long long code = 0; code < total; ++code) {
      long long c = code;
      for (int m = 0; m < L; ++m) {
        v.x[std::size_t(m)] = int(c % base);
        c /= base;
      }
      int ref = -1;
      for (const auto& d : ds) {
        auto t = evaluate_splitting(d, v, mut);
        ++r.instances;
        if (!t.consistent()) {
          ++r.failures;
          if (r.examples.size() < keep) r.examples.push_back({d, v});
        }
        const int rem = mod2(t.lhs() - t.dag);
        if (ref < 0) ref = rem;
        else if (rem != ref) ++r.remainder_mismatches;
      }
    }
  });
  SweepReport out;
  for (auto& r : part) {
    out.instances += r.instances;
    out.descriptors += r.descriptors;
    out.skipped += r.skipped;
    out.failures += r.failures;
    out.remainder_mismatches += r.remainder_mismatches;
    for (auto& e : r.examples)
      if (out.examples.size() < keep) out.examples.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// The (k,l) symmetry of the two-sided discs

/// A pairing sends a descriptor for (k,l) to a descriptor for (l,k).
enum class Pairing {
  shift,   // (i)<->(iv), (ii)<->(iii), windows translated
  reflect, // (ii)<->(iii), (i) and (iv) to themselves, windows mirrored
};

inline std::string pairing_name(Pairing p) { return p == Pairing::shift ? "shift" : "reflect"; }

inline StratumDescriptor pair_descriptor(Pairing p, const StratumDescriptor& d) {
  const int k = d.k, l = d.l, i = d.i, j = d.j;
  StratumDescriptor r{d.kind, l, k, 0, 0};
  if (p == Pairing::shift) {
    switch (d.kind) {
    case Case::ii: r = {Case::iii, l, k, i + l + 1, j}; break;
    case Case::iii: r = {Case::ii, l, k, i - k - 1, j}; break;
    case Case::i: r = {Case::iv, l, k, j - k - 1, k + l + i - j + 2}; break;
    case Case::iv: r = {Case::i, l, k, i + j - k - 1, i + l + 1}; break; // inverse of the (i) map
    }
  } else {
    const int s = k + l + 1;
    switch (d.kind) {
    case Case::i: r = {Case::i, l, k, s - j, s - i}; break;
    case Case::ii: r = {Case::iii, l, k, s - i - j, j}; break;
    case Case::iii: r = {Case::ii, l, k, s - i - j, j}; break;
    case Case::iv: r = {Case::iv, l, k, s - i - j, j}; break;
    }
  }
  return r;
}

struct SymmetryReport {
  Pairing pairing = Pairing::shift;
  std::array<long long, 4> pass{}, fail{}, unmatched{};
  std::vector<StratumDescriptor> examples;
  long long total_fail() const { return fail[0] + fail[1] + fail[2] + fail[3]; }
  bool holds() const { return total_fail() == 0 && unmatched[0] + unmatched[1] + unmatched[2] + unmatched[3] == 0; }
};

/// Checks *(d) + *(pair(d)) = kl mod 2 over every in-range descriptor with
/// k, l <= max_index.
inline SymmetryReport symmetry_report(Pairing p, int max_index = 4, std::size_t keep = 10) {
  SymmetryReport rep;
  rep.pairing = p;
  for (int c = 0; c < 4; ++c)
    for (int k = 0; k <= max_index; ++k)
      for (int l = 0; l <= max_index; ++l)
        for (int i = 0; i <= k + l + 1; ++i)
          for (int j = 0; j <= k + l + 1; ++j) {
            StratumDescriptor d{Case(c), k, l, i, j};
            if (!d.in_range()) continue;
            StratumDescriptor e = pair_descriptor(p, d);
            if (!e.in_range()) {
              ++rep.unmatched[std::size_t(c)];
              continue;
            }
            if (mod2(boundary_stratum_sign(d) + boundary_stratum_sign(e)) == mod2((long long)k * l)) ++rep.pass[std::size_t(c)];
            else {
              ++rep.fail[std::size_t(c)];
              if (rep.examples.size() < keep) rep.examples.push_back(d);
            }
          }
  return rep;
}

} // namespace kit::signs
