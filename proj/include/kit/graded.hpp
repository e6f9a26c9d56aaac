#pragma once
// Scalars, graded bases and sparse elements.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace kit {

using Integer = boost::multiprecision::cpp_int;

inline constexpr int default_trunc_order = 8;

/// parity (any integer) -> +1 / -1
inline int sign_of(long long parity) { return (parity % 2 == 0) ? 1 : -1; }

/// Integer polynomial in q, truncated above q^N. Coefficients beyond the last
/// nonzero one are not stored.
class QSeries {
public:
  QSeries() = default;
  explicit QSeries(int order) : order_(order) {
    if (order < 0) throw std::invalid_argument("QSeries: negative truncation order");
  }
  QSeries(int order, std::vector<Integer> coeffs) : QSeries(order) {
    if (coeffs.size() > std::size_t(order) + 1) coeffs.resize(std::size_t(order) + 1);
    c_ = std::move(coeffs);
    trim();
  }
  static QSeries constant(int order, const Integer& v) { return QSeries(order, {v}); }
  static QSeries monomial(int order, const Integer& v, int power) {
    if (power < 0) throw std::invalid_argument("QSeries: negative power");
    if (power > order) return QSeries(order);
    std::vector<Integer> c(std::size_t(power) + 1);
    c[std::size_t(power)] = v;
    return QSeries(order, std::move(c));
  }

  int order() const { return order_; }
  bool is_zero() const { return c_.empty(); }
  /// index of the last stored coefficient, -1 for zero
  int degree_bound() const { return int(c_.size()) - 1; }
  Integer coeff(int p) const { return (p >= 0 && std::size_t(p) < c_.size()) ? c_[std::size_t(p)] : Integer(0); }
  const std::vector<Integer>& coeffs() const { return c_; }
  Integer at_zero() const { return coeff(0); }
  /// lowest power with nonzero coefficient, -1 for zero
  int valuation() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) return int(i);
    return -1;
  }
  QSeries reduce_q0() const { return constant(order_, at_zero()); }
  QSeries with_order(int order) const {
    std::vector<Integer> c = c_;
    return QSeries(order, std::move(c));
  }

  QSeries& operator+=(const QSeries& o) {
    check(o);
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  QSeries& operator-=(const QSeries& o) {
    check(o);
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  QSeries& operator*=(const Integer& s) {
    if (s == 0) {
      c_.clear();
      return *this;
    }
    for (auto& x : c_) x *= s;
    return *this;
  }
  QSeries& operator*=(int s) { return *this *= Integer(s); }
  QSeries operator-() const {
    QSeries r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend QSeries operator+(QSeries a, const QSeries& b) { return a += b; }
  friend QSeries operator-(QSeries a, const QSeries& b) { return a -= b; }
  friend QSeries operator*(QSeries a, const Integer& s) { return a *= s; }
  friend QSeries operator*(QSeries a, int s) { return a *= Integer(s); }
  friend QSeries operator*(const QSeries& a, const QSeries& b) {
    a.check(b);
    QSeries r(a.order_);
    if (a.c_.empty() || b.c_.empty()) return r;
    std::size_t top = std::min(a.c_.size() + b.c_.size() - 1, std::size_t(a.order_) + 1);
    r.c_.assign(top, Integer(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size() && i + j < top; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    r.trim();
    return r;
  }
  friend bool operator==(const QSeries& a, const QSeries& b) { return a.order_ == b.order_ && a.c_ == b.c_; }
  friend bool operator!=(const QSeries& a, const QSeries& b) { return !(a == b); }

private:
  void check(const QSeries& o) const {
    if (o.order_ != order_) throw std::invalid_argument("QSeries: mismatched truncation orders");
  }
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  int order_ = default_trunc_order;
  std::vector<Integer> c_;
};

inline QSeries q_mul(const QSeries& a, const QSeries& b) { return a * b; }

struct Generator {
  std::string name;
  int degree = 0;
  friend bool operator==(const Generator&, const Generator&) = default;
};

class GradedBasis {
public:
  GradedBasis() = default;
  explicit GradedBasis(std::vector<Generator> gens) : gens_(std::move(gens)) {
    for (std::size_t i = 0; i < gens_.size(); ++i)
      if (!index_.emplace(gens_[i].name, int(i)).second)
        throw std::invalid_argument("GradedBasis: duplicate generator name '" + gens_[i].name + "'");
  }
  std::size_t size() const { return gens_.size(); }
  bool empty() const { return gens_.empty(); }
  const Generator& operator[](std::size_t i) const { return gens_[i]; }
  const std::vector<Generator>& generators() const { return gens_; }
  int degree(std::size_t i) const { return gens_[i].degree; }
  /// -1 if absent
  int find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }
  friend bool operator==(const GradedBasis& a, const GradedBasis& b) { return a.gens_ == b.gens_; }

private:
  std::vector<Generator> gens_;
  std::unordered_map<std::string, int> index_;
};

/// B[k]: a degree-d generator sits in degree d-k.
inline GradedBasis shift_basis(const GradedBasis& b, int k) {
  std::vector<Generator> g = b.generators();
  for (auto& x : g) x.degree -= k;
  return GradedBasis(std::move(g));
}

inline const char* dual_suffix = "^v";

inline std::string dual_name(const std::string& n) {
  std::string suf = dual_suffix;
  if (n.size() > suf.size() && n.compare(n.size() - suf.size(), suf.size(), suf) == 0)
    return n.substr(0, n.size() - suf.size());
  return n + suf;
}

inline GradedBasis dual_basis(const GradedBasis& b) {
  std::vector<Generator> g = b.generators();
  for (auto& x : g) {
    x.name = dual_name(x.name);
    x.degree = -x.degree;
  }
  return GradedBasis(std::move(g));
}

/// (-1)^{sum over inverted pairs of degree products}. The permuted sequence is
/// (x_{perm[0]}, ..., x_{perm[n-1]}).
inline int koszul_sign(const std::vector<int>& degrees, const std::vector<int>& perm) {
  const std::size_t n = degrees.size();
  if (perm.size() != n) throw std::invalid_argument("koszul_sign: permutation length mismatch");
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || std::size_t(p) >= n || seen[std::size_t(p)])
      throw std::invalid_argument("koszul_sign: not a permutation");
    seen[std::size_t(p)] = 1;
  }
  long long par = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (perm[a] > perm[b]) par += (long long)(degrees[std::size_t(perm[a])] & 1) * (degrees[std::size_t(perm[b])] & 1);
  return sign_of(par);
}

/// Sparse vector over generator ids with QSeries coordinates. Kept sorted.
class Element {
public:
  using Entry = std::pair<int, QSeries>;
  Element() = default;

  bool is_zero() const { return e_.empty(); }
  std::size_t size() const { return e_.size(); }
  const std::vector<Entry>& entries() const { return e_; }
  auto begin() const { return e_.begin(); }
  auto end() const { return e_.end(); }

  QSeries coeff(int g, int order) const {
    auto it = lower(g);
    return (it != e_.end() && it->first == g) ? it->second : QSeries(order);
  }

  void add(int g, const QSeries& v) {
    if (v.is_zero()) return;
    auto it = std::lower_bound(e_.begin(), e_.end(), g, [](const Entry& a, int b) { return a.first < b; });
    if (it != e_.end() && it->first == g) {
      it->second += v;
      if (it->second.is_zero()) e_.erase(it);
    } else {
      e_.insert(it, {g, v});
    }
  }
  void add(const Element& o, int sign = 1) {
    for (const auto& [g, v] : o.e_) add(g, sign == 1 ? v : -v);
  }
  void add_scaled(const Element& o, const QSeries& s) {
    for (const auto& [g, v] : o.e_) add(g, v * s);
  }
  Element scaled(int sign) const {
    Element r = *this;
    if (sign != 1)
      for (auto& [g, v] : r.e_) v = -v;
    return r;
  }
  Element reduce_q0() const {
    Element r;
    for (const auto& [g, v] : e_) r.add(g, v.reduce_q0());
    return r;
  }
  friend bool operator==(const Element& a, const Element& b) { return a.e_ == b.e_; }
  friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

private:
  std::vector<Entry>::const_iterator lower(int g) const {
    return std::lower_bound(e_.begin(), e_.end(), g, [](const Entry& a, int b) { return a.first < b; });
  }
  std::vector<Entry> e_;
};

} // namespace kit
