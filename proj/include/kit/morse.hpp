#pragma once
// Morse toy model on the collar coordinate w in [0,2] with a one-point fibre.
//
// f_{r,s}(w) = b'(s) phi(w) - r c(s) chi(w), with phi(w) = (w-1)^2/2 and
// chi(w) = w near w = 1. The gradient flow is
//   dw/ds = -b'(s) phi'(w) + r c(s) psi(w),   psi = chi'.
// phi' and psi are piecewise linear through the given knots.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "parallel.hpp"
#include "profile.hpp"

namespace kit::morse {

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CollarProfile {
  Profile b, c;
  double s_min = -8, s_max = 8;
};

struct ProfileCheck {
  bool slopes_ok = false;   // b' = +1 at s_min and -1 at s_max
  bool c_compact = false;   // c vanishes at both window edges
  bool small_r = false;     // c <= 0 everywhere, < 0 somewhere
  std::string message;
};

inline ProfileCheck check_profile(const CollarProfile& p, double tol = 1e-6, int samples = 4001) {
  ProfileCheck r;
  if (auto e = p.b.validate(); !e.empty()) r.message = "b: " + e;
  else if (auto e2 = p.c.validate(); !e2.empty()) r.message = "c: " + e2;
  if (!(p.s_min < p.s_max)) r.message = "window must have s_min < s_max";
  if (!r.message.empty()) return r;
  r.slopes_ok = std::fabs(p.b.derivative(p.s_min) - 1) < tol && std::fabs(p.b.derivative(p.s_max) + 1) < tol;
  r.c_compact = std::fabs(p.c(p.s_min)) < tol && std::fabs(p.c(p.s_max)) < tol;
  bool nonpos = true, neg = false;
  for (int k = 0; k < samples; ++k) {
    const double s = p.s_min + (p.s_max - p.s_min) * k / (samples - 1);
    const double v = p.c(s);
    if (v > tol) nonpos = false;
    if (v < -tol) neg = true;
  }
  r.small_r = nonpos && neg && r.c_compact;
  if (!r.slopes_ok) r.message = "db/ds must be +1 at the left edge and -1 at the right edge";
  else if (!r.c_compact) r.message = "c does not vanish at the window edges";
  return r;
}

inline void require_valid(const CollarProfile& p) {
  auto chk = check_profile(p);
  if (!chk.message.empty()) throw ArgumentError(chk.message);
}

/// C = int exp(b) c ds
inline double drift_constant(const CollarProfile& p) {
  require_valid(p);
  auto cuts = p.b.breakpoints(p.s_min, p.s_max);
  auto cc = p.c.breakpoints(p.s_min, p.s_max);
  cuts.insert(cuts.end(), cc.begin(), cc.end());
  return integrate([&](double s) { return std::exp(p.b(s)) * p.c(s); }, p.s_min, p.s_max, cuts);
}

struct Upsilon {
  std::vector<double> s, y;
  double residual = 0;      // max |dY/ds + b' Y - c| over interior samples
  double leading = 0;       // Y(s_max) exp(-s_max)
  double kappa = 0;         // lim (s + b(s)); Y ~ C exp(-kappa) exp(s)
  double left_value = 0;    // Y at the left edge
};

/// 20-point Gauss on each smooth piece of [a, b]
template <class F>
double cell_integral(F&& f, double a, double b, const std::vector<double>& cuts) {
  double lo = a, sum = 0;
  for (double c : cuts)
    if (c > a && c < b) {
      sum += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, c);
      lo = c;
    }
  return sum + boost::math::quadrature::gauss<double, 20>::integrate(f, lo, b);
}

/// Y(s) = exp(-b(s)) int_{-inf}^s exp(b) c on an even grid, by cumulative
/// Gauss quadrature; the residual uses the sixth-order central difference.
inline Upsilon explicit_upsilon(const CollarProfile& p, int points = 4001) {
  require_valid(p);
  if (points < 9) throw ArgumentError("need at least 9 sample points");
  Upsilon u;
  const double h = (p.s_max - p.s_min) / (points - 1);
  auto cuts = p.b.breakpoints(p.s_min, p.s_max);
  auto cc = p.c.breakpoints(p.s_min, p.s_max);
  cuts.insert(cuts.end(), cc.begin(), cc.end());
  double acc = 0;
  for (int k = 0; k < points; ++k) {
    const double s = p.s_min + k * h;
    if (k > 0) acc += cell_integral([&](double x) { return std::exp(p.b(x)) * p.c(x); }, s - h, s, cuts);
    u.s.push_back(s);
    u.y.push_back(std::exp(-p.b(s)) * acc);
  }
  std::vector<double> kinks;
  for (double c : cuts) kinks.push_back(c);
  for (int k = 3; k + 3 < points; ++k) {
    const double s = u.s[std::size_t(k)];
    bool near_kink = false;
    for (double c : kinks)
      if (std::fabs(c - s) < 3.5 * h && c > p.s_min && c < p.s_max) near_kink = true;
    if (near_kink) continue;
    const auto& y = u.y;
    const std::size_t i = std::size_t(k);
    const double dy = (-y[i - 3] + 9 * y[i - 2] - 45 * y[i - 1] + 45 * y[i + 1] - 9 * y[i + 2] + y[i + 3]) / (60 * h);
    const double res = std::fabs(dy + p.b.derivative(s) * y[i] - p.c(s));
    u.residual = std::max(u.residual, res);
  }
  u.kappa = p.s_max + p.b(p.s_max);
  u.leading = u.y.back() * std::exp(-p.s_max);
  u.left_value = u.y.front();
  return u;
}

// ---------------------------------------------------------------------------
// connecting orbits

struct Knots {
  std::vector<std::pair<double, double>> pts;
  double operator()(double w) const {
    if (pts.empty()) return 0;
    if (w <= pts.front().first) return pts.front().second;
    for (std::size_t k = 1; k < pts.size(); ++k)
      if (w <= pts[k].first) {
        const auto [x0, y0] = pts[k - 1];
        const auto [x1, y1] = pts[k];
        return y0 + (y1 - y0) * (w - x0) / (x1 - x0);
      }
    return pts.back().second;
  }
  double slope(double w) const {
    for (std::size_t k = 1; k < pts.size(); ++k)
      if (w <= pts[k].first) return (pts[k].second - pts[k - 1].second) / (pts[k].first - pts[k - 1].first);
    return 0;
  }
  /// zeros of the piecewise linear function
  std::vector<double> zeros() const {
    std::vector<double> z;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      const auto [x0, y0] = pts[k - 1];
      const auto [x1, y1] = pts[k];
      if (y0 == 0) z.push_back(x0);
      else if ((y0 < 0) != (y1 < 0) && y1 != 0) z.push_back(x0 - y0 * (x1 - x0) / (y1 - y0));
    }
    if (!pts.empty() && pts.back().second == 0) z.push_back(pts.back().first);
    return z;
  }
};

struct FlowSpec {
  CollarProfile profile;
  // phi'(w): slope +1 through w = 1, a second zero at 1.8 so that f_+ has a minimum there
  Knots dphi{{{0, -1}, {1.4, 0.4}, {2, -0.2}}};
  // psi = chi': 1 near w = 1, 0 near the boundary w = 0
  Knots psi{{{0, 0}, {0.5, 1}, {1.5, 1}, {2, 0}}};
};

/// Empty if valid. Checks the knots and d/ds d/dw f >= 0 at w = 0 for r in r_grid.
inline std::string validate(const FlowSpec& f, const std::vector<double>& r_grid, int samples = 2001) {
  auto chk = check_profile(f.profile);
  if (!chk.message.empty()) return chk.message;
  for (const Knots* k : {&f.dphi, &f.psi}) {
    if (k->pts.size() < 2) return "knot lists need two points";
    for (std::size_t i = 1; i < k->pts.size(); ++i)
      if (!(k->pts[i].first > k->pts[i - 1].first)) return "knots must increase in w";
    if (k->pts.front().first > 0 || k->pts.back().first < 2) return "knots must cover [0,2]";
  }
  if (std::fabs(f.dphi(1)) > 1e-12 || std::fabs(f.dphi.slope(1 - 1e-9) - 1) > 1e-9) return "phi' must vanish at w = 1 with slope 1";
  if (std::fabs(f.psi(1) - 1) > 1e-12) return "psi must equal 1 at w = 1";
  // d/ds d/dw f at w = 0 is b''(s) phi'(0) - r c'(s) psi(0); b'' by central differences
  const auto& p = f.profile;
  const double h = 1e-4;
  for (int k = 0; k < samples; ++k) {
    const double s = p.s_min + (p.s_max - p.s_min) * k / (samples - 1);
    const double b2 = (p.b.derivative(s + h) - p.b.derivative(s - h)) / (2 * h);
    const double c1 = (p.c(s + h) - p.c(s - h)) / (2 * h);
    for (double r : r_grid)
      if (b2 * f.dphi(0) - r * c1 * f.psi(0) < -1e-6) return "boundary condition d/ds d/dw f >= 0 fails at s = " + std::to_string(s);
  }
  return {};
}

enum class Outcome { connects, stays, exits, stalls };

inline std::string outcome_name(Outcome o) {
  switch (o) {
  case Outcome::connects: return "connects";
  case Outcome::stays: return "stays";
  case Outcome::exits: return "exits";
  case Outcome::stalls: return "stalls";
  }
  return "?";
}

struct Shot {
  double r = 0;
  Outcome outcome = Outcome::stalls;
  double w_end = 0, s_end = 0;
  double target = std::numeric_limits<double>::quiet_NaN(); // critical point reached
  bool exists() const { return outcome == Outcome::connects || outcome == Outcome::stays; }
};

struct ScanOptions {
  double horizon = 60;       // integrate up to s = horizon
  double neighbourhood = 1e-4;
  double abs_tol = 1e-12, rel_tol = 1e-10;
  double max_step = 0.02;
};

/// Shoot from w = 1 at the left edge, where c vanishes and the flow fixes w = 1.
/// A trajectory connects if it ends within the neighbourhood of a critical
/// point of f_+ whose linearization is contracting; it stays if it never
/// leaves the neighbourhood of w = 1 (then it converges to that critical point).
inline Shot shoot(const FlowSpec& f, double r, const ScanOptions& opt = {}) {
  using namespace boost::numeric::odeint;
  const auto& p = f.profile;
  Shot shot;
  shot.r = r;
  auto rhs = [&](const double& w, double& dw, double s) {
    const double bp = s < p.s_min ? 1.0 : s > p.s_max ? -1.0 : p.b.derivative(s);
    const double c = s < p.s_min || s > p.s_max ? 0.0 : p.c(s);
    dw = -bp * f.dphi(w) + r * c * f.psi(w);
  };
  double w = 1;
  double s = p.s_min;
  bool left = false;
  auto stepper = make_dense_output(opt.abs_tol, opt.rel_tol, opt.max_step, runge_kutta_dopri5<double>());
  stepper.initialize(w, s, 1e-3);
  while (stepper.current_time() < opt.horizon) {
    stepper.do_step(rhs);
    w = stepper.current_state();
    s = stepper.current_time();
    if (std::fabs(w - 1) > opt.neighbourhood) left = true;
    if (w < 0 || w > 2) {
      shot.outcome = Outcome::exits;
      shot.w_end = w;
      shot.s_end = s;
      return shot;
    }
  }
  shot.w_end = w;
  shot.s_end = s;
  if (!left) {
    shot.outcome = Outcome::stays;
    shot.target = 1;
    return shot;
  }
  // critical points of f_+ = -phi: zeros of phi'; contracting iff phi'' < 0
  for (double z : f.dphi.zeros()) {
    if (std::fabs(w - z) < opt.neighbourhood && f.dphi.slope(z - 1e-9) < 0 && f.dphi.slope(z + 1e-9) < 0) {
      shot.outcome = Outcome::connects;
      shot.target = z;
      return shot;
    }
  }
  shot.outcome = Outcome::stalls;
  return shot;
}

struct DriftReport {
  std::vector<Shot> shots;
  std::optional<double> smallest_r; // smallest r with a connecting orbit
  bool small_r_regime = false;
  double drift_constant = 0;
  int count() const {
    int n = 0;
    for (const auto& s : shots) n += s.exists();
    return n;
  }
};

inline DriftReport scan_connecting_orbits(const FlowSpec& f, const std::vector<double>& r_grid, const ScanOptions& opt = {}) {
  for (double r : r_grid)
    if (!(r > 0 && r <= 1)) throw ArgumentError("r-grid must lie in (0,1]");
  if (auto e = validate(f, r_grid); !e.empty()) throw ArgumentError("invalid flow spec: " + e);
  DriftReport rep;
  rep.small_r_regime = check_profile(f.profile).small_r;
  rep.drift_constant = drift_constant(f.profile);
  rep.shots.resize(r_grid.size());
  parallel_for(r_grid.size(), [&](std::size_t k) { rep.shots[k] = shoot(f, r_grid[k], opt); });
  for (const auto& s : rep.shots)
    if (s.exists() && (!rep.smallest_r || s.r < *rep.smallest_r)) rep.smallest_r = s.r;
  return rep;
}

inline std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(n == 1 ? hi : lo + (hi - lo) * k / (n - 1));
  return g;
}

} // namespace kit::morse
