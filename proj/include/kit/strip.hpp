#pragma once
// Linear Cauchy-Riemann operators d/ds + i d/dt + b(s,t) on R x [0,1] with
// imaginary boundary values.
//
// Discretization: Y = u + i v with u on the nodes t_i = i h_t (u = 0 at both
// ends) and v on the half nodes. Per s-slice the unknowns are interleaved as
// (v_0, u_1, v_1, .., u_{N-1}, v_{N-1}), so i d/dt becomes the symmetric
// tridiagonal matrix K with zero diagonal and off-diagonals +-1/h_t. Stepping
// in s is the trapezoidal rule. The two window ends carry spectral conditions:
// at s_min the components along eigenvectors of A(s_min) with positive
// eigenvalue vanish, at s_max those with negative eigenvalue.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "parallel.hpp"
#include "profile.hpp"

namespace kit::strip {

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct WindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StripProblem {
  Profile b, c;
  double s_min = -5, s_max = 5;
  double h_s = 0.02;
  int n_t = 8; // h_t = 1 / n_t

  double h_t() const { return 1.0 / n_t; }
  double alpha_minus() const { return b.limit(-1); }
  double alpha_plus() const { return b.limit(+1); }
  int slices() const { return int(std::lround((s_max - s_min) / h_s)); }
};

inline bool on_lattice(double a, double tol = 1e-9) {
  const double r = std::remainder(a, pi);
  return std::fabs(r) < tol;
}

/// Empty string if valid, otherwise the first problem.
inline std::string validate(const StripProblem& P, double tol = 1e-6) {
  if (auto e = P.b.validate(); !e.empty()) return "b: " + e;
  if (auto e = P.c.validate(); !e.empty()) return "c: " + e;
  if (!(P.s_min < P.s_max)) return "window must have s_min < s_max";
  if (!(P.h_s > 0) || P.slices() < 4) return "h_s too large for the window";
  if (P.n_t < 2) return "need at least two t-cells";
  for (int sign : {-1, 1}) {
    const double a = P.b.limit(sign);
    if (!std::isfinite(a)) return "b has no finite limit at " + std::string(sign < 0 ? "-inf" : "+inf");
    if (on_lattice(a)) return "asymptotic constant " + std::to_string(a) + " lies on pi Z";
    const double s = sign < 0 ? P.s_min : P.s_max;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
      if (std::fabs(P.b(s, t) - a) > tol) return "b has not reached its limit at the window edge s = " + std::to_string(s);
  }
  for (double s : {P.s_min, P.s_max})
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
      if (std::fabs(P.c(s, t)) > tol) return "c does not vanish at the window edge s = " + std::to_string(s);
  return {};
}

// ---------------------------------------------------------------------------
// the model operator Q = i d/dt + alpha

struct Eigenpair {
  int m = 0;
  double lambda = 0;
  std::vector<double> u, v; // samples on nodes / half nodes (real and imaginary part)
};

struct SpectrumResult {
  double alpha = 0;
  std::vector<Eigenpair> pairs;
  const Eigenpair* find(int m) const {
    for (const auto& p : pairs)
      if (p.m == m) return &p;
    return nullptr;
  }
};

inline void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha < pi)) throw ArgumentError("alpha must lie in (0, pi)");
}

/// lambda_m = pi m + alpha, Xi_m = i exp(-pi i m t), sampled on `samples` points
inline SpectrumResult q_spectrum(double alpha, int m_lo, int m_hi, int samples = 0) {
  check_alpha(alpha);
  SpectrumResult r;
  r.alpha = alpha;
  for (int m = m_lo; m <= m_hi; ++m) {
    Eigenpair e;
    e.m = m;
    e.lambda = pi * m + alpha;
    for (int k = 0; k < samples; ++k) {
      const double t = samples == 1 ? 0 : double(k) / (samples - 1);
      // i (cos - i sin)(pi m t) = sin + i cos
      e.u.push_back(std::sin(pi * m * t));
      e.v.push_back(std::cos(pi * m * t));
    }
    r.pairs.push_back(std::move(e));
  }
  return r;
}

inline int slice_size(int n_t) { return 2 * n_t - 1; }

/// off-diagonal of K in the interleaved ordering
inline std::vector<double> k_offdiag(int n_t) {
  const double h = n_t;
  std::vector<double> off(static_cast<std::size_t>(slice_size(n_t) - 1));
  for (std::size_t j = 0; j < off.size(); ++j) off[j] = j % 2 == 0 ? h : -h;
  return off;
}

/// t-coordinate of interleaved entry j (even j: half node, odd j: node)
inline double entry_t(int j, int n_t) { return j % 2 == 0 ? (j / 2 + 0.5) / n_t : ((j + 1) / 2) / double(n_t); }

/// eigenpairs of the discretized Q with h_t = 1 / n_t, labelled by the nearest m
inline SpectrumResult discrete_q_spectrum(double alpha, int n_t, bool vectors = false) {
  check_alpha(alpha);
  if (n_t < 2) throw ArgumentError("need n_t >= 2");
  const int M = slice_size(n_t);
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(M, alpha);
  auto off = k_offdiag(n_t);
  Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(off.data(), Eigen::Index(off.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  SpectrumResult r;
  r.alpha = alpha;
  for (int k = 0; k < M; ++k) {
    Eigenpair e;
    e.lambda = es.eigenvalues()(k);
    e.m = int(std::lround((e.lambda - alpha) / pi));
    if (vectors) {
      for (int j = 0; j < M; ++j) (j % 2 == 0 ? e.v : e.u).push_back(es.eigenvectors()(j, k));
    }
    r.pairs.push_back(std::move(e));
  }
  return r;
}

struct ConvergenceReport {
  double alpha = 0;
  int n_t = 0;
  int m_max = 0;
  std::vector<std::pair<int, double>> errors;      // at h_t
  std::vector<std::pair<int, double>> errors_half; // at h_t / 2
  double max_error = 0;
  double order = 0; // log2 of the max-error ratio over m with nonzero error
};

inline ConvergenceReport spectrum_convergence(double alpha, int n_t, int m_max) {
  ConvergenceReport r;
  r.alpha = alpha;
  r.n_t = n_t;
  r.m_max = m_max;
  auto err = [&](int nt, std::vector<std::pair<int, double>>& out) {
    auto S = discrete_q_spectrum(alpha, nt);
    double worst = 0;
    for (int m = -m_max; m <= m_max; ++m) {
      const auto* p = S.find(m);
      if (!p) throw std::runtime_error("discrete spectrum misses m = " + std::to_string(m));
      const double e = std::fabs(p->lambda - (pi * m + alpha));
      out.push_back({m, e});
      worst = std::max(worst, e);
    }
    return worst;
  };
  r.max_error = err(n_t, r.errors);
  const double half = err(2 * n_t, r.errors_half);
  r.order = half > 0 ? std::log2(r.max_error / half) : std::numeric_limits<double>::infinity();
  return r;
}

// ---------------------------------------------------------------------------
// weighted index

struct End {
  int sign = -1; // -1 negative end, +1 positive end
  int mu = 0;
};
using WeightVector = std::vector<End>;

/// 1 - |Sigma_-| + sum over negative ends of mu - sum over positive ends of mu
inline int weighted_index(const WeightVector& w) {
  if (w.empty()) throw ArgumentError("weighted_index needs at least one end");
  int neg = 0, s = 0;
  for (const auto& e : w) {
    if (e.sign != -1 && e.sign != 1) throw ArgumentError("end sign must be -1 or +1");
    if (e.sign < 0) ++neg, s += e.mu;
    else s -= e.mu;
  }
  return 1 - neg + s;
}

// ---------------------------------------------------------------------------
// assembly

namespace detail {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// A(s) = K + diag(b(s, t_j)) - shift
inline Eigen::MatrixXd slice_matrix(const Profile& b, double s, int n_t, double shift) {
  const int M = slice_size(n_t);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
  auto off = k_offdiag(n_t);
  for (int j = 0; j + 1 < M; ++j) A(j, j + 1) = A(j + 1, j) = off[std::size_t(j)];
  for (int j = 0; j < M; ++j) A(j, j) = b(s, entry_t(j, n_t)) - shift;
  return A;
}

struct System {
  int M = 0, S = 0;
  std::vector<double> s;
  Triplets trip;
  int rows = 0;
  Eigen::MatrixXd end_minus, end_plus; // eigenvectors of A at the two ends
  Eigen::VectorXd eval_minus, eval_plus;
};

/// trapezoidal equations plus spectral end conditions; shift(s) is the weight
inline System assemble(const Profile& b, double s_min, double s_max, double h_s, int n_t, const std::function<double(double)>& shift) {
  System sys;
  sys.M = slice_size(n_t);
  sys.S = int(std::lround((s_max - s_min) / h_s));
  const double h = (s_max - s_min) / sys.S;
  const int M = sys.M;
  for (int k = 0; k <= sys.S; ++k) sys.s.push_back(s_min + k * h);
  auto off = k_offdiag(n_t);
  std::vector<double> diag_prev(static_cast<std::size_t>(M)), diag_next(static_cast<std::size_t>(M));
  auto fill_diag = [&](double s, std::vector<double>& d) {
    const double sh = shift(s);
    for (int j = 0; j < M; ++j) d[std::size_t(j)] = b(s, entry_t(j, n_t)) - sh;
  };
  fill_diag(sys.s[0], diag_prev);
  int row = 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(slice_matrix(b, s_min, n_t, shift(s_min)));
  sys.end_minus = es.eigenvectors();
  sys.eval_minus = es.eigenvalues();
  for (int q = 0; q < M; ++q) {
    if (sys.eval_minus(q) <= 0) continue;
    for (int j = 0; j < M; ++j)
      if (sys.end_minus(j, q) != 0) sys.trip.emplace_back(row, j, sys.end_minus(j, q));
    ++row;
  }
  for (int k = 0; k < sys.S; ++k) {
    fill_diag(sys.s[std::size_t(k + 1)], diag_next);
    const int c0 = k * M, c1 = (k + 1) * M;
    for (int j = 0; j < M; ++j) {
      const int r = row + j;
      sys.trip.emplace_back(r, c1 + j, 1 / h + diag_next[std::size_t(j)] / 2);
      sys.trip.emplace_back(r, c0 + j, -1 / h + diag_prev[std::size_t(j)] / 2);
      if (j > 0) {
        sys.trip.emplace_back(r, c1 + j - 1, off[std::size_t(j - 1)] / 2);
        sys.trip.emplace_back(r, c0 + j - 1, off[std::size_t(j - 1)] / 2);
      }
      if (j + 1 < M) {
        sys.trip.emplace_back(r, c1 + j + 1, off[std::size_t(j)] / 2);
        sys.trip.emplace_back(r, c0 + j + 1, off[std::size_t(j)] / 2);
      }
    }
    row += M;
    std::swap(diag_prev, diag_next);
  }
  es.compute(slice_matrix(b, s_max, n_t, shift(s_max)));
  sys.end_plus = es.eigenvectors();
  sys.eval_plus = es.eigenvalues();
  const int last = sys.S * M;
  for (int q = 0; q < M; ++q) {
    if (sys.eval_plus(q) >= 0) continue;
    for (int j = 0; j < M; ++j)
      if (sys.end_plus(j, q) != 0) sys.trip.emplace_back(row, last + j, sys.end_plus(j, q));
    ++row;
  }
  sys.rows = row;
  return sys;
}

} // namespace detail

// ---------------------------------------------------------------------------
// kernel and cokernel in weighted spaces

struct IndexReport {
  WeightVector weights;
  int formula = 0;
  int kernel_dim = 0, cokernel_dim = 0;
  int rows = 0, cols = 0;
  double margin = 0;        // smallest singular value
  double largest_zero = 0;  // largest singular value below the threshold (0 if none)
  double smallest_nonzero = 0;
  double gap = 0;
  double threshold = 0;
  // Lambda at each weighted end: coefficients of the kernel basis along the
  // extra asymptotic modes admitted by the weight
  std::vector<Eigen::MatrixXd> lambda;
  std::vector<int> lambda_rank;
  int numerical_index() const { return kernel_dim - cokernel_dim; }
};

struct IndexOptions {
  double s_min = -3, s_max = 3, h_s = 0.05;
  int n_t = 6;
  double threshold = 1e-8;
  double transition_width = 0.5;
};

/// Numerical kernel and cokernel of D on the strip in the space weighted by
/// (mu_-, mu_+). The weight at an end with constant alpha is realised as the
/// conjugation Y = exp(-int sigma) Phi with sigma = alpha + pi (mu - 1/2).
inline IndexReport injectivity_margin(const StripProblem& P, const WeightVector& w, const IndexOptions& opt = {}) {
  int mu_minus = 0, mu_plus = 0, ends_minus = 0, ends_plus = 0;
  for (const auto& e : w) {
    if (e.sign < 0) mu_minus = e.mu, ++ends_minus;
    else mu_plus = e.mu, ++ends_plus;
  }
  if (ends_minus != 1 || ends_plus != 1) throw ArgumentError("the strip has exactly one negative and one positive end");
  const double am = P.alpha_minus(), ap = P.alpha_plus();
  if (!std::isfinite(am) || !std::isfinite(ap) || on_lattice(am) || on_lattice(ap))
    throw ArgumentError("asymptotic constants must be finite and avoid pi Z");
  const double sm = am + pi * (mu_minus - 0.5), sp = ap + pi * (mu_plus - 0.5);
  const double tw = opt.transition_width;
  auto shift = [&](double s) { return sm + (sp - sm) * 0.5 * (1 + std::tanh(s / tw)); };
  auto sys = detail::assemble(P.b, opt.s_min, opt.s_max, opt.h_s, opt.n_t, shift);
  const int cols = (sys.S + 1) * sys.M;
  Eigen::SparseMatrix<double> Sp(sys.rows, cols);
  Sp.setFromTriplets(sys.trip.begin(), sys.trip.end());
  Eigen::MatrixXd D(Sp);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  IndexReport r;
  r.weights = w;
  r.formula = weighted_index(w);
  r.rows = sys.rows;
  r.cols = cols;
  r.threshold = opt.threshold;
  int rank = 0;
  r.smallest_nonzero = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > opt.threshold) ++rank, r.smallest_nonzero = std::min(r.smallest_nonzero, sv(k));
    else r.largest_zero = std::max(r.largest_zero, sv(k));
  }
  r.margin = sv.size() ? sv(sv.size() - 1) : 0;
  if (cols > sys.rows) r.margin = 0;
  r.kernel_dim = cols - rank;
  r.cokernel_dim = sys.rows - rank;
  r.gap = r.smallest_nonzero - r.largest_zero;
  // kernel basis: the last kernel_dim right singular vectors
  const Eigen::MatrixXd ker = svd.matrixV().rightCols(r.kernel_dim);
  for (int side : {-1, 1}) {
    // extra modes admitted at an end: mu_- > 0 at the negative end, mu_+ < 0
    // at the positive end; their eigenvalues of A lie within pi |mu| of 0
    const int extra = side < 0 ? mu_minus : -mu_plus;
    if (extra <= 0 || r.kernel_dim == 0) continue;
    const auto& V = side < 0 ? sys.end_minus : sys.end_plus;
    const auto& ev = side < 0 ? sys.eval_minus : sys.eval_plus;
    std::vector<int> modes;
    for (int q = 0; q < ev.size(); ++q)
      if (side < 0 ? (ev(q) > -pi * extra && ev(q) < 0) : (ev(q) > 0 && ev(q) < pi * extra)) modes.push_back(q);
    const int off = side < 0 ? 0 : sys.S * sys.M;
    Eigen::MatrixXd L(r.kernel_dim, Eigen::Index(modes.size()));
    for (int k = 0; k < r.kernel_dim; ++k)
      for (std::size_t q = 0; q < modes.size(); ++q) L(k, Eigen::Index(q)) = V.col(modes[q]).dot(ker.col(k).segment(off, sys.M));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
    lu.setThreshold(1e-6);
    r.lambda.push_back(L);
    r.lambda_rank.push_back(int(lu.rank()));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Gamma

struct GammaLevel {
  double h_s = 0;
  double gamma = 0;
  double tail_drift = 0; // |Gamma(s_max) - Gamma(s_max - 1)|
};

struct GammaResult {
  double gamma = 0; // Richardson extrapolation of the levels
  std::vector<GammaLevel> history;
  std::vector<double> s;  // finest grid
  std::vector<double> y0; // mode-0 component <Y(s), Xi_0> on the finest grid
  bool sign_stable() const {
    if (history.size() < 2) return true;
    const double a = history[history.size() - 1].gamma, b = history[history.size() - 2].gamma;
    return (a > 0) == (b > 0) && (a < 0) == (b < 0);
  }
  int sign() const { return gamma > 0 ? 1 : gamma < 0 ? -1 : 0; }
};

struct GammaOptions {
  int levels = 3;            // h_s, h_s/2, h_s/4, ..
  double tail_tolerance = 1e-3;
  double tail_length = 1.0;
};

namespace detail {

struct GammaSolve {
  std::vector<double> s, y0;
  double gamma_at_end = 0, gamma_before = 0;
};

inline GammaSolve gamma_once(const StripProblem& P, double h_s, double tail_length) {
  const int n_t = P.n_t;
  auto sys = assemble(P.b, P.s_min, P.s_max, h_s, n_t, [](double) { return 0.0; });
  const int M = sys.M, cols = (sys.S + 1) * M;
  if (sys.rows != cols) throw std::runtime_error("Gamma system is not square; asymptotic constants on the lattice?");
  Eigen::SparseMatrix<double> A(cols, cols);
  A.setFromTriplets(sys.trip.begin(), sys.trip.end());
  A.makeCompressed();
  // right-hand side: i c forces the v components; rows of slice k are offset by the s_min conditions
  int n_minus = 0;
  for (int q = 0; q < M; ++q) n_minus += sys.eval_minus(q) > 0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(cols);
  for (int k = 0; k < sys.S; ++k)
    for (int j = 0; j < M; j += 2) {
      const double t = entry_t(j, n_t);
      rhs(n_minus + k * M + j) = 0.5 * (P.c(sys.s[std::size_t(k)], t) + P.c(sys.s[std::size_t(k + 1)], t));
    }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("Gamma system is singular");
  Eigen::VectorXd x = lu.solve(rhs);
  GammaSolve g;
  g.s = sys.s;
  for (int k = 0; k <= sys.S; ++k) {
    double m = 0;
    for (int j = 0; j < M; j += 2) m += x(k * M + j);
    g.y0.push_back(m / n_t);
  }
  const double hh = (P.s_max - P.s_min) / sys.S;
  const int back = std::clamp(int(std::lround(tail_length / hh)), 1, sys.S);
  const double B_end = primitive(P.b, P.s_max);
  const double B_before = primitive(P.b, g.s[std::size_t(sys.S - back)]);
  g.gamma_at_end = std::exp(B_end) * g.y0.back();
  g.gamma_before = std::exp(B_before) * g.y0[std::size_t(sys.S - back)];
  return g;
}

} // namespace detail

/// Gamma = lim exp(B(s)) <Y(s), Xi_0> / |Xi_0|^2 with D Y = i c, R = 1.
inline GammaResult gamma_pde(const StripProblem& P, const GammaOptions& opt = {}) {
  if (auto e = validate(P); !e.empty()) throw ArgumentError("invalid strip problem: " + e);
  if (opt.levels < 1) throw ArgumentError("need at least one refinement level");
  GammaResult r;
  std::vector<detail::GammaSolve> solves(static_cast<std::size_t>(opt.levels));
  parallel_for(solves.size(), [&](std::size_t l) { solves[l] = detail::gamma_once(P, P.h_s / double(1 << l), opt.tail_length); });
  for (std::size_t l = 0; l < solves.size(); ++l) {
    const auto& g = solves[l];
    r.history.push_back({P.h_s / double(1 << l), g.gamma_at_end, std::fabs(g.gamma_at_end - g.gamma_before)});
  }
  // Richardson in powers of h^2
  std::vector<double> T;
  for (const auto& h : r.history) T.push_back(h.gamma);
  for (std::size_t col = 1; col < T.size(); ++col) {
    const double f = std::pow(4.0, double(col));
    for (std::size_t k = T.size() - 1; k >= col; --k) T[k] = (f * T[k] - T[k - 1]) / (f - 1);
  }
  r.gamma = T.back();
  const auto& fine = solves.back();
  r.s = fine.s;
  r.y0 = fine.y0;
  const double scale = std::max({std::fabs(r.gamma), 1e-12});
  const double drift = r.history.back().tail_drift;
  if (drift > opt.tail_tolerance * std::max(scale, 1.0))
    throw WindowError("window too small: Gamma still moves by " + std::to_string(drift) + " over the last " +
                      std::to_string(opt.tail_length) + " of the window");
  return r;
}

/// int exp(B) c over [lo, hi] for t-independent profiles, by adaptive quadrature.
/// B is tabulated on anchors every 1/16 and completed by a short Gauss-Kronrod
/// Gauss rule from the nearest anchor.
inline double gamma_quadrature(const Profile& b, const Profile& c, double lo, double hi) {
  if (!b.t_independent() || !c.t_independent()) throw ArgumentError("gamma_quadrature needs t-independent profiles");
  auto cuts = b.breakpoints(lo, hi);
  auto cc = c.breakpoints(lo, hi);
  cuts.insert(cuts.end(), cc.begin(), cc.end());
  std::vector<double> anchors = b.breakpoints(lo, hi);
  for (double s = lo; s < hi; s += 1.0 / 16) anchors.push_back(s);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
  const auto B = primitive_on_grid(b, anchors);
  auto primitive_at = [&](double s) {
    auto it = std::upper_bound(anchors.begin(), anchors.end(), s);
    const std::size_t k = it == anchors.begin() ? 0 : std::size_t(it - anchors.begin()) - 1;
    return B[k] + boost::math::quadrature::gauss<double, 20>::integrate([&](double x) { return b(x); }, anchors[k], s);
  };
  return integrate([&](double s) { return std::exp(primitive_at(s)) * c(s); }, lo, hi, cuts, 1e-12);
}

inline double gamma_quadrature(const StripProblem& P) { return gamma_quadrature(P.b, P.c, P.s_min, P.s_max); }

// ---------------------------------------------------------------------------
// gluing

/// P1 followed by P2 at distance g, in P2's frame: features of P1 move to s - g.
inline StripProblem glue_strip_problems(const StripProblem& P1, const StripProblem& P2, double g, double tol = 1e-9) {
  const double a1 = P1.alpha_plus(), a2 = P2.alpha_minus();
  if (!std::isfinite(a1) || !std::isfinite(a2) || std::fabs(a1 - a2) > tol)
    throw ArgumentError("asymptotic mismatch: P1 ends at " + std::to_string(a1) + ", P2 starts at " + std::to_string(a2));
  if (!(g > 0)) throw ArgumentError("gluing length must be positive");
  StripProblem G;
  G.b = P1.b.shifted(-g) + P2.b + Profile::constant(-a1);
  G.c = P1.c.shifted(-g) + P2.c;
  G.s_min = P1.s_min - g;
  G.s_max = P2.s_max;
  G.h_s = std::min(P1.h_s, P2.h_s);
  G.n_t = std::max(P1.n_t, P2.n_t);
  return G;
}

struct ScalingRow {
  double g = 0;
  double gamma_glued = 0;
  double rescaled = 0;  // Gamma(glued) exp(lambda_0 g)
  double ratio = 0;     // rescaled / Gamma(P)
  double deviation = 0; // |ratio - ratio at the largest g|
};

struct ScalingReport {
  double lambda0 = 0;
  double gamma_reference = 0; // Gamma of whichever piece carries c
  bool reference_is_first = true;
  std::vector<ScalingRow> rows;
  bool sign_persists() const {
    for (const auto& r : rows)
      if ((r.gamma_glued > 0) != (gamma_reference > 0) || r.gamma_glued == 0) return false;
    return true;
  }
  bool monotone() const {
    for (std::size_t k = 1; k < rows.size(); ++k)
      if (!(rows[k].deviation < rows[k - 1].deviation)) return false;
    return true;
  }
};

inline bool carries_c(const StripProblem& P) {
  for (const auto& t : P.c.terms)
    if (t.value != 0 || t.from != 0 || t.to != 0) return true;
  return false;
}

/// Gamma(glued) exp(lambda_0 g) against Gamma of the piece carrying c, with
/// lambda_0 = alpha the lowest eigenvalue of Q at the glued end.
inline ScalingReport scaling_report(const StripProblem& P1, const StripProblem& P2, std::vector<double> gs, const GammaOptions& opt = {}) {
  if (gs.empty()) throw ArgumentError("empty g-list");
  std::sort(gs.begin(), gs.end());
  ScalingReport rep;
  rep.lambda0 = P1.alpha_plus();
  rep.reference_is_first = carries_c(P1) || !carries_c(P2);
  rep.gamma_reference = gamma_pde(rep.reference_is_first ? P1 : P2, opt).gamma;
  rep.rows.resize(gs.size());
  parallel_for(gs.size(), [&](std::size_t k) {
    auto G = glue_strip_problems(P1, P2, gs[k]);
    ScalingRow& row = rep.rows[k];
    row.g = gs[k];
    row.gamma_glued = gamma_pde(G, opt).gamma;
    // P1's frame sits at distance g only when P1 carries c
    row.rescaled = row.gamma_glued * (rep.reference_is_first ? std::exp(rep.lambda0 * gs[k]) : 1.0);
    row.ratio = rep.gamma_reference != 0 ? row.rescaled / rep.gamma_reference : 0;
  });
  for (auto& row : rep.rows) row.deviation = std::fabs(row.ratio - rep.rows.back().ratio);
  return rep;
}

} // namespace kit::strip
