#pragma once
// Piecewise/smoothed scalar profiles on the strip, b(s,t) and c(s,t).
//
// A profile is a sum of terms. Each term is a function of s times an optional
// factor in t. Smoothing uses a Gaussian mollifier of width `width`; width 0
// gives the sharp piecewise function.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kit {

constexpr double pi = boost::math::constants::pi<double>();

enum class TermKind { constant, step, tanh_step, indicator, abs, bump };
enum class TFactor { none, sin, cos };

struct ProfileTerm {
  TermKind kind = TermKind::constant;
  double value = 0; // constant value, indicator height, abs and bump scale
  double from = 0, to = 0; // step and tanh_step limits
  double at = 0;           // step centre, abs kink, bump centre
  double lo = 0, hi = 0;   // indicator interval
  double width = 0;        // smoothing radius, tanh width, bump half-width
  TFactor t = TFactor::none;

  double s_value(double s) const {
    const double w = width;
    switch (kind) {
    case TermKind::constant: return value;
    case TermKind::step: return from + (to - from) * heaviside(s - at, w);
    case TermKind::tanh_step: return from + (to - from) * 0.5 * (1 + std::tanh((s - at) / w));
    case TermKind::indicator: return value * (heaviside(s - lo, w) - heaviside(s - hi, w));
    case TermKind::abs: {
      const double x = s - at;
      if (w == 0) return value * std::fabs(x);
      return value * (x * std::erf(x / (w * std::sqrt(2.0))) + w * std::sqrt(2 / pi) * std::exp(-x * x / (2 * w * w)));
    }
    case TermKind::bump: {
      const double x = (s - at) / w;
      if (std::fabs(x) >= 1) return 0;
      return value * std::exp(1 - 1 / (1 - x * x));
    }
    }
    return 0;
  }

  double s_derivative(double s) const {
    const double w = width;
    switch (kind) {
    case TermKind::constant: return 0;
    case TermKind::step: return (to - from) * delta(s - at, w);
    case TermKind::tanh_step: {
      const double c = std::cosh((s - at) / w);
      return (to - from) * 0.5 / (w * c * c);
    }
    case TermKind::indicator: return value * (delta(s - lo, w) - delta(s - hi, w));
    case TermKind::abs: {
      const double x = s - at;
      if (w == 0) return value * (x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0);
      return value * std::erf(x / (w * std::sqrt(2.0)));
    }
    case TermKind::bump: {
      const double x = (s - at) / w;
      if (std::fabs(x) >= 1) return 0;
      const double d = 1 - x * x;
      return value * std::exp(1 - 1 / d) * (-2 * x / (d * d)) / w;
    }
    }
    return 0;
  }

  double t_factor(double tt) const {
    switch (t) {
    case TFactor::none: return 1;
    case TFactor::sin: return std::sin(pi * tt);
    case TFactor::cos: return std::cos(pi * tt);
    }
    return 1;
  }
  double t_average() const {
    switch (t) {
    case TFactor::none: return 1;
    case TFactor::sin: return 2 / pi;
    case TFactor::cos: return 0;
    }
    return 1;
  }

  /// limit as s -> -inf (sign < 0) or +inf; NaN if unbounded
  double limit(int sign) const {
    double v = 0;
    switch (kind) {
    case TermKind::constant: v = value; break;
    case TermKind::step:
    case TermKind::tanh_step: v = sign < 0 ? from : to; break;
    case TermKind::indicator:
    case TermKind::bump: v = 0; break;
    case TermKind::abs: return value == 0 ? 0 : std::numeric_limits<double>::quiet_NaN();
    }
    return v;
  }

  /// points where a sharp term is not smooth
  void breakpoints(std::vector<double>& out) const {
    switch (kind) {
    case TermKind::step:
    case TermKind::abs: out.push_back(at); break;
    case TermKind::indicator: out.push_back(lo), out.push_back(hi); break;
    case TermKind::bump: out.push_back(at - width), out.push_back(at + width); break;
    default: break;
    }
  }

  std::string validate() const {
    if (kind == TermKind::tanh_step && !(width > 0)) return "tanh_step needs width > 0";
    if (kind == TermKind::bump && !(width > 0)) return "bump needs width > 0";
    if (width < 0) return "negative width";
    if (kind == TermKind::indicator && !(lo < hi)) return "indicator needs lo < hi";
    return {};
  }

  static double heaviside(double x, double w) {
    if (w == 0) return x > 0 ? 1.0 : x < 0 ? 0.0 : 0.5;
    return 0.5 * (1 + std::erf(x / (w * std::sqrt(2.0))));
  }
  static double delta(double x, double w) {
    if (w == 0) return 0;
    return std::exp(-x * x / (2 * w * w)) / (w * std::sqrt(2 * pi));
  }
};

struct Profile {
  std::vector<ProfileTerm> terms;

  static Profile constant(double v) {
    Profile p;
    p.terms.push_back({});
    p.terms.back().value = v;
    return p;
  }
  Profile& add(const ProfileTerm& t) {
    terms.push_back(t);
    return *this;
  }
  Profile scaled(double f) const {
    Profile p = *this;
    for (auto& t : p.terms) {
      t.value *= f;
      t.from *= f;
      t.to *= f;
    }
    return p;
  }
  Profile shifted(double ds) const {
    Profile p = *this;
    for (auto& t : p.terms) {
      t.at += ds;
      t.lo += ds;
      t.hi += ds;
    }
    return p;
  }
  Profile operator+(const Profile& o) const {
    Profile p = *this;
    p.terms.insert(p.terms.end(), o.terms.begin(), o.terms.end());
    return p;
  }

  double operator()(double s, double t) const {
    double v = 0;
    for (const auto& x : terms) v += x.s_value(s) * x.t_factor(t);
    return v;
  }
  /// t-average over [0,1]
  double mean(double s) const {
    double v = 0;
    for (const auto& x : terms) v += x.s_value(s) * x.t_average();
    return v;
  }
  /// value for t-independent profiles
  double operator()(double s) const { return mean(s); }
  /// d/ds of the t-average
  double derivative(double s) const {
    double v = 0;
    for (const auto& x : terms) v += x.s_derivative(s) * x.t_average();
    return v;
  }
  bool t_independent() const {
    return std::all_of(terms.begin(), terms.end(), [](const ProfileTerm& x) { return x.t == TFactor::none; });
  }
  double limit(int sign) const {
    double v = 0;
    for (const auto& x : terms) v += x.limit(sign) * x.t_average();
    return v;
  }
  std::vector<double> breakpoints(double lo, double hi) const {
    std::vector<double> b{lo, hi};
    for (const auto& x : terms) x.breakpoints(b);
    std::erase_if(b, [&](double v) { return v < lo || v > hi; });
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }
  std::string validate() const {
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (auto e = terms[i].validate(); !e.empty()) return "term " + std::to_string(i) + ": " + e;
    return {};
  }
};

namespace detail {

/// bisection until the Kronrod error estimate is below `abs_tol`, or below the
/// noise of evaluating f near the edge of a bump
template <class F>
double gk_bisect(F& f, double a, double b, double abs_tol, int depth) {
  double err = 0, l1 = 0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (err <= abs_tol || err <= 1e-11 * l1 || depth == 0) return v;
  const double m = (a + b) / 2;
  return gk_bisect(f, a, m, abs_tol / 2, depth - 1) + gk_bisect(f, m, b, abs_tol / 2, depth - 1);
}

} // namespace detail

/// adaptive Gauss-Kronrod over [a, b], split at the profile breakpoints. The
/// tolerance is relative to the L1 norm of f, so cancelling integrands do not
/// force refinement to rounding level.
template <class F>
double integrate(F&& f, double a, double b, const std::vector<double>& cuts = {}, double tol = 1e-13) {
  if (a == b) return 0;
  if (a > b) return -integrate(f, b, a, cuts, tol);
  std::vector<double> pts{a, b};
  for (double c : cuts)
    if (c > a && c < b) pts.push_back(c);
  std::sort(pts.begin(), pts.end());
  double l1 = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i])
      l1 += boost::math::quadrature::gauss_kronrod<double, 61>::integrate([&](double x) { return std::fabs(f(x)); }, pts[i], pts[i + 1], 0, 0.0);
  const double abs_tol = tol * std::max(l1, std::numeric_limits<double>::min());
  double s = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) s += detail::gk_bisect(f, pts[i], pts[i + 1], abs_tol * (pts[i + 1] - pts[i]) / (b - a), 20);
  return s;
}

/// B(s) = int_0^s mean b
inline double primitive(const Profile& b, double s) {
  return integrate([&](double x) { return b.mean(x); }, 0.0, s, b.breakpoints(std::min(0.0, s), std::max(0.0, s)));
}

/// cumulative B on a sorted grid, exact up to quadrature tolerance
inline std::vector<double> primitive_on_grid(const Profile& b, const std::vector<double>& s) {
  std::vector<double> out(s.size());
  if (s.empty()) return out;
  out[0] = primitive(b, s[0]);
  auto cuts = b.breakpoints(s.front(), s.back());
  for (std::size_t k = 1; k < s.size(); ++k)
    out[k] = out[k - 1] + integrate([&](double x) { return b.mean(x); }, s[k - 1], s[k], cuts);
  return out;
}

} // namespace kit
