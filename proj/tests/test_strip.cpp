#include <gtest/gtest.h>

#include <cmath>

#include "kit/numeric_io.hpp"

using namespace kit;
using namespace kit::strip;

namespace {

StripProblem load(const std::string& name) { return io::strip_from_json(io::read_json(std::string(KIT_FIXTURES) + "/" + name), name); }

/// int exp(B) c by composite Simpson on a uniform grid, B by cumulative Simpson from 0
double simpson_gamma(const StripProblem& P, int n = 200000) {
  const double lo = P.s_min, hi = P.s_max, h = (hi - lo) / n;
  auto b = [&](double s) { return P.b.mean(s); };
  auto c = [&](double s) { return P.c.mean(s); };
  // B at lo, integrating from 0
  auto integrate_b = [&](double a, double z) {
    const int m = 20000;
    const double k = (z - a) / m;
    double acc = b(a) + b(z);
    for (int i = 1; i < m; ++i) acc += (i % 2 ? 4 : 2) * b(a + i * k);
    return acc * k / 3;
  };
  std::vector<double> B(static_cast<std::size_t>(n) + 1);
  B[0] = integrate_b(0, lo);
  for (int i = 1; i <= n; ++i) {
    const double a = lo + (i - 1) * h;
    B[std::size_t(i)] = B[std::size_t(i - 1)] + h / 6 * (b(a) + 4 * b(a + h / 2) + b(a + h));
  }
  double acc = 0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    acc += w * std::exp(B[std::size_t(i)]) * c(lo + i * h);
  }
  return acc * h / 3;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

} // namespace

TEST(Spectrum, ContinuumEigenvaluesAreExact) {
  auto S = q_spectrum(pi / 3, -2, 2, 16);
  ASSERT_EQ(S.pairs.size(), 5u);
  for (const auto& p : S.pairs) EXPECT_DOUBLE_EQ(p.lambda, pi * p.m + pi / 3);
  EXPECT_THROW(q_spectrum(0, 0, 1), ArgumentError);
  EXPECT_THROW(q_spectrum(pi, 0, 1), ArgumentError);
}

TEST(Spectrum, DiscreteEigenvaluesConvergeAtSecondOrder) {
  auto r = spectrum_convergence(pi / 4, 400, 2);
  EXPECT_LT(r.max_error, 1e-3);
  EXPECT_GE(r.order, 1.9);
  for (const auto& [m, e] : r.errors) EXPECT_LT(e, 1e-3) << "m = " << m;
}

TEST(Spectrum, ErrorsShrinkUnderRefinement) {
  for (double alpha : {0.3, pi / 2, 2.9}) {
    auto a = discrete_q_spectrum(alpha, 20), b = discrete_q_spectrum(alpha, 40), c = discrete_q_spectrum(alpha, 80);
    for (int m = -3; m <= 3; ++m) {
      const double exact = pi * m + alpha;
      ASSERT_TRUE(a.find(m) && b.find(m) && c.find(m));
      const double ea = std::fabs(a.find(m)->lambda - exact), eb = std::fabs(b.find(m)->lambda - exact),
                   ec = std::fabs(c.find(m)->lambda - exact);
      if (ea < 1e-12) continue; // the lowest mode is reproduced to rounding
      EXPECT_LT(eb, ea) << alpha << " " << m;
      EXPECT_LT(ec, eb) << alpha << " " << m;
    }
  }
}

TEST(Index, FormulaValues) {
  EXPECT_EQ(weighted_index({{-1, 0}, {1, 0}}), 0);
  EXPECT_EQ(weighted_index({{-1, 2}, {1, 0}}), 2);
  EXPECT_EQ(weighted_index({{1, 1}}), 0);
  EXPECT_EQ(weighted_index({{-1, 1}, {-1, 1}, {1, 0}}), 1);
  EXPECT_THROW(weighted_index({}), ArgumentError);
  EXPECT_THROW(weighted_index({{0, 1}}), ArgumentError);
}

TEST(Index, NumericalIndexMatchesFormula) {
  auto P = load("strip_index.json");
  IndexOptions opt;
  opt.s_min = P.s_min;
  opt.s_max = P.s_max;
  opt.h_s = P.h_s;
  opt.n_t = P.n_t;
  for (int mu : {-1, 0, 1, 2}) {
    WeightVector w{{-1, mu}, {1, 0}};
    auto r = injectivity_margin(P, w, opt);
    EXPECT_EQ(r.formula, weighted_index(w));
    EXPECT_EQ(r.numerical_index(), r.formula) << "mu = " << mu;
    EXPECT_GE(r.gap, 1e-6) << "mu = " << mu;
    // for a constant operator one of kernel and cokernel vanishes
    EXPECT_EQ(std::min(r.kernel_dim, r.cokernel_dim), 0);
  }
}

TEST(Gamma, ConstantSlopeGivesEMinusOne) {
  auto P = load("strip_e_minus_1.json");
  auto r = gamma_pde(P);
  EXPECT_LT(rel(r.gamma, std::exp(1.0) - 1), 1e-4);
  EXPECT_LT(rel(r.gamma, gamma_quadrature(P)), 1e-6);
  EXPECT_TRUE(r.sign_stable());
}

TEST(Gamma, PdeQuadratureAndSimpsonAgree) {
  for (const auto* name : {"strip_e_minus_1.json", "strip_glue_left.json", "strip_bump.json"}) {
    auto P = load(name);
    const double pde = gamma_pde(P).gamma, quad = gamma_quadrature(P), simp = simpson_gamma(P);
    EXPECT_LT(rel(pde, quad), 1e-6) << name;
    EXPECT_LT(rel(quad, simp), 1e-6) << name;
  }
}

TEST(Gamma, SignStableUnderRefinementAndLargerWindow) {
  for (const auto* name : {"strip_e_minus_1.json", "strip_glue_left.json", "strip_bump.json"}) {
    auto P = load(name);
    auto r = gamma_pde(P, {4, 1e-3, 1.0});
    EXPECT_TRUE(r.sign_stable()) << name;
    for (const auto& l : r.history) EXPECT_EQ(l.gamma > 0, r.gamma > 0) << name;
    auto Q = P;
    const double grow = 0.25 * (P.s_max - P.s_min);
    Q.s_min -= std::round(grow / P.h_s) * P.h_s;
    Q.s_max += std::round(grow / P.h_s) * P.h_s;
    auto e = gamma_pde(Q);
    EXPECT_EQ(e.sign(), r.sign()) << name;
    EXPECT_LT(rel(e.gamma, r.gamma), 1e-4) << name;
  }
}

TEST(Gamma, ScalesLinearlyInC) {
  auto P = load("strip_bump.json");
  auto Q = P;
  Q.c = P.c.scaled(-2);
  EXPECT_NEAR(gamma_pde(Q).gamma, -2 * gamma_pde(P).gamma, 1e-8);
}

TEST(Gamma, TooSmallWindowIsReported) {
  auto P = load("strip_e_minus_1.json");
  P.s_max = 1.5;
  EXPECT_THROW(gamma_pde(P), WindowError);
}

TEST(Gamma, RejectsBadInput) {
  auto P = load("strip_bump.json");
  EXPECT_THROW(gamma_pde(P, {0, 1e-3, 1.0}), ArgumentError);
  auto Q = P;
  Q.c.terms[0].t = TFactor::sin;
  EXPECT_THROW(gamma_quadrature(Q), ArgumentError);
  Q = P;
  Q.s_max = Q.s_min;
  EXPECT_THROW(gamma_pde(Q), ArgumentError);
}

TEST(Gluing, RescaledGammaConvergesAndKeepsItsSign) {
  auto L = load("strip_glue_left.json"), R = load("strip_glue_right.json");
  auto rep = scaling_report(L, R, {5, 10, 15});
  EXPECT_NEAR(rep.lambda0, pi / 4, 1e-12);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_TRUE(rep.monotone());
  EXPECT_TRUE(rep.sign_persists());
  EXPECT_LT(rep.rows[0].deviation, 1e-6);
}

TEST(Gluing, MismatchedEndsAreRejected) {
  auto L = load("strip_glue_left.json"), B = load("strip_bump.json");
  EXPECT_THROW(glue_strip_problems(L, B, 5), ArgumentError);
  auto R = load("strip_glue_right.json");
  EXPECT_THROW(glue_strip_problems(L, R, 0), ArgumentError);
  auto G = glue_strip_problems(L, R, 5);
  EXPECT_DOUBLE_EQ(G.s_min, L.s_min - 5);
  EXPECT_DOUBLE_EQ(G.s_max, R.s_max);
  EXPECT_NEAR(G.alpha_minus(), L.alpha_minus(), 1e-12);
  EXPECT_NEAR(G.alpha_plus(), R.alpha_plus(), 1e-12);
}
