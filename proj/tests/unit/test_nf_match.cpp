#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sntk/error.hpp"
#include "sntk/nf_match.hpp"

using namespace sntk;

namespace {

double g(double y, double nu, double a) { return nu - y * y + a * y * y * y; }

SaddleNodePoint stommel_fold(const ScalarModel1P& s) { return locate_saddle_node(s, 0.93, 0.97); }

}  // namespace

TEST(NfEquilibria, ZeroCubic) {
  const NfEquilibria e = nf_equilibria(0.25, 0.0);
  EXPECT_EQ(e.y[0], -0.5);
  EXPECT_EQ(e.y[1], 0.5);
  EXPECT_EQ(e.multiplier[0], 1.0);
  EXPECT_EQ(e.multiplier[1], -1.0);
}

TEST(NfEquilibria, SeedIsThirdOrderAccurate) {
  const double a = 0.7;
  double worst = 0.0;
  for (double n : {1e-1, 5e-2, 2.5e-2, 1.25e-2}) {
    const NfEquilibria e = nf_equilibria(n * n, a);
    worst = std::max({worst, std::abs(e.y[0] - (-n + 0.5 * a * n * n)) / (n * n * n),
                      std::abs(e.y[1] - (n + 0.5 * a * n * n)) / (n * n * n)});
  }
  EXPECT_LT(worst, 2.0);
}

TEST(NfEquilibria, AgreesWithBisection) {
  const double nu = 0.01, a = 0.5;
  const NfEquilibria e = nf_equilibria(nu, a);
  const double y1 = oracle::bisect([&](double y) { return g(y, nu, a); }, -0.5, 0.0);
  const double y2 = oracle::bisect([&](double y) { return g(y, nu, a); }, 0.0, 0.5);
  EXPECT_NEAR(e.y[0], y1, 1e-12);
  EXPECT_NEAR(e.y[1], y2, 1e-12);
  EXPECT_NEAR(e.multiplier[0], -2.0 * y1 + 3.0 * a * y1 * y1, 1e-11);
}

TEST(NfEquilibria, GuardViolation) {
  EXPECT_THROW(nf_equilibria(1.0, 2.0), ConvergenceError);
  EXPECT_THROW(nf_equilibria(-0.1, 0.0), ConvergenceError);
}

TEST(MatchMultipliers, NormalFormMatchesItself) {
  for (double astar : {-0.4, 0.0, 0.6}) {
    const ScalarModel1P nf = builtin_scalar("normalform", {{"a", astar}});
    const SaddleNodePoint sn = locate_saddle_node(nf, 0.05, 0.01);
    for (double mu : {1e-2, 1e-3}) {
      const MatchedParams mp = match_multipliers(nf, sn, mu);
      EXPECT_NEAR(mp.nu, mu, 1e-12);
      EXPECT_NEAR(mp.a, astar, 1e-9);
      EXPECT_LT(std::abs(mp.residual1), kMatchTol);
      EXPECT_LT(std::abs(mp.residual2), kMatchTol);
    }
  }
}

TEST(MatchMultipliers, StommelNearTheFold) {
  const ScalarModel1P s = builtin_scalar("stommel1d");
  const SaddleNodePoint sn = stommel_fold(s);
  const MatchedParams mp = match_multipliers(s, sn, 1e-4);
  EXPECT_LT(std::abs(mp.nu / 1e-4 - 5.80948), 0.05);
  EXPECT_LT(std::abs(mp.a - (-0.22222)), 0.02);
  // The defining contract: multipliers agree at both equilibria.
  const NfEquilibria e = nf_equilibria(mp.nu, mp.a);
  for (int r = 0; r < 2; ++r) {
    const double fprime = s.jet(mp.x[r], fold_parameter(sn, 1e-4), 1).partial(1, 0);
    EXPECT_NEAR(fprime, e.multiplier[r], 1e-10);
  }
}

TEST(MatchMultipliers, NonPolynomialModelConvergesAtRootMuRate) {
  // A fold whose normal-form parameters genuinely move with mu.
  const ScalarModel1P f("sinfold", "x", "mu", {}, "mu + cos(x) - 1 + 0.3*sin(x)^3 + 0.2*mu*x");
  const SaddleNodePoint sn = locate_saddle_node(f, 0.01, 0.0);
  ASSERT_TRUE(sn.generic);
  double Cnu = 0.0, Ca = 0.0;
  double prev_nu = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double mu = std::ldexp(1e-2, -k);
    const MatchedParams mp = match_multipliers(f, sn, mu);
    EXPECT_LT(std::abs(mp.residual1), kMatchTol);
    EXPECT_LT(std::abs(mp.residual2), kMatchTol);
    EXPECT_LE(mp.iterations, 10);
    Cnu = std::max(Cnu, std::abs(mp.nu / mu - sn.p0sq) / std::sqrt(mu));
    Ca = std::max(Ca, std::abs(mp.a - sn.a0) / std::sqrt(mu));
    if (k > 0) EXPECT_LT(mp.nu, prev_nu);
    prev_nu = mp.nu;
  }
  EXPECT_TRUE(std::isfinite(Cnu));
  EXPECT_LT(Cnu, 100.0);
  EXPECT_LT(Ca, 100.0);
}

TEST(MatchMultipliers, WrongSide) {
  const ScalarModel1P s = builtin_scalar("stommel1d");
  const SaddleNodePoint sn = stommel_fold(s);
  EXPECT_THROW(match_multipliers(s, sn, -1e-3), std::invalid_argument);
}

TEST(MatchCurve, ThreadedEqualsSerial) {
  const ScalarModel1P s = builtin_scalar("stommel1d");
  const SaddleNodePoint sn = stommel_fold(s);
  std::vector<double> mus;
  for (int k = 0; k < 12; ++k) mus.push_back(std::ldexp(1e-2, -k));
  const NormalFormCurve a = match_curve(s, sn, mus, 1);
  const NormalFormCurve b = match_curve(s, sn, mus, 4);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].nu, b.samples[i].nu);
    EXPECT_EQ(a.samples[i].a, b.samples[i].a);
    if (i > 0) EXPECT_GT(a.samples[i].mu, a.samples[i - 1].mu);
  }
  EXPECT_EQ(a.p0sq, sn.p0sq);
}

TEST(ValidityRadius, StommelIsPositive) {
  const ScalarModel1P s = builtin_scalar("stommel1d");
  const SaddleNodePoint sn = stommel_fold(s);
  const double r = validity_radius(s, sn, 1.0);
  EXPECT_GT(r, 0.0);
  EXPECT_NO_THROW(match_multipliers(s, sn, r));
}

TEST(NegativeMatch, NormalFormIdentity) {
  const ScalarModel1P nf = builtin_scalar("normalform");
  const SaddleNodePoint sn = locate_saddle_node(nf, 0.05, 0.01);
  for (double mu : {-0.01, -0.003, -0.2}) {
    const NegativeMatch m = negative_mu_match(nf, sn, mu, std::pair{-0.1, 0.1}, std::pair{-0.1, 0.1});
    EXPECT_NEAR(m.nu, mu, 1e-10 * std::max(1.0, std::abs(mu)) + 1e-12);
    EXPECT_LT(std::abs(m.time_model - m.time_nf), 1e-10 * std::max(1.0, m.time_model));
  }
}

TEST(NegativeMatch, QuadraticModelIsItsOwnNormalForm) {
  const ScalarModel1P f("q", "x", "mu", {}, "mu - x^2");
  const SaddleNodePoint sn = locate_saddle_node(f, 0.05, 0.01);
  const NegativeMatch m = negative_mu_match(f, sn, -0.05, std::pair{-0.1, 0.1}, std::pair{-0.1, 0.1});
  EXPECT_NEAR(m.nu, -0.05, 1e-11);
}

TEST(NegativeMatch, StommelBelowTheFold) {
  const ScalarModel1P s = builtin_scalar("stommel1d");
  const SaddleNodePoint sn = stommel_fold(s);
  const double mu = -1e-4;
  const NegativeMatch m = negative_mu_match(s, sn, mu);
  EXPECT_LT(std::abs(m.nu / (sn.p0sq * mu) - 1.0), 0.05);
  // Transit time oracle: quadrature of dx / f across U.
  const double p = fold_parameter(sn, mu);
  const double t = std::abs(oracle::integrate([&](double x) { return 1.0 / s(x, p); }, m.U.first,
                                              m.U.second, 1e-12));
  EXPECT_NEAR(m.time_model, t, 1e-6 * t);
  const double tn = std::abs(oracle::integrate([&](double y) { return 1.0 / g(y, m.nu, m.a); },
                                               m.V.first, m.V.second, 1e-12));
  EXPECT_NEAR(tn, t, 1e-6 * t);
}

TEST(NegativeMatch, EquilibriumInsideU) {
  const ScalarModel1P s = builtin_scalar("stommel1d");
  const SaddleNodePoint sn = stommel_fold(s);
  // On the two-equilibria side U necessarily contains them; the caller must pass mu < 0.
  EXPECT_THROW(negative_mu_match(s, sn, 1e-3), std::invalid_argument);
  // A U reaching the lower stable branch contains an equilibrium.
  EXPECT_THROW(negative_mu_match(s, sn, -1e-4, std::pair{0.0, 1.2}), UnreachableError);
}
