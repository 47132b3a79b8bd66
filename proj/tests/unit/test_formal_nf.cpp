#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sntk/error.hpp"
#include "sntk/formal_nf.hpp"
#include "sntk/saddle_node.hpp"

using namespace sntk;

namespace {

using Poly = std::vector<double>;  // index = power

Poly truncate_mul(const Poly& p, const Poly& q, int K) {
  Poly r(static_cast<std::size_t>(K + 1), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size() && i + j <= static_cast<std::size_t>(K); ++j) {
      r[i + j] += p[i] * q[j];
    }
  }
  return r;
}

Poly eval_at(const Poly& g, const Poly& y, int K) {
  Poly acc(static_cast<std::size_t>(K + 1), 0.0), power(static_cast<std::size_t>(K + 1), 0.0);
  power[0] = 1.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (int i = 0; i <= K; ++i) acc[static_cast<std::size_t>(i)] += g[k] * power[static_cast<std::size_t>(i)];
    power = truncate_mul(power, y, K);
  }
  return acc;
}

// zdot for z = y + beta y^j, by fixed-point inversion y = z - beta y^j and
// explicit truncated polynomial products.
Poly transform(const Poly& g, int j, double beta, int K) {
  Poly y(static_cast<std::size_t>(K + 1), 0.0);
  y[1] = 1.0;
  for (int it = 0; it <= K; ++it) {
    Poly yj(static_cast<std::size_t>(K + 1), 0.0);
    yj[0] = 1.0;
    for (int p = 0; p < j; ++p) yj = truncate_mul(yj, y, K);
    Poly next(static_cast<std::size_t>(K + 1), 0.0);
    next[1] = 1.0;
    for (int i = 0; i <= K; ++i) next[static_cast<std::size_t>(i)] -= beta * yj[static_cast<std::size_t>(i)];
    y = next;
  }
  Poly dt(static_cast<std::size_t>(j), 0.0);
  dt[0] = 1.0;
  dt[static_cast<std::size_t>(j - 1)] += j * beta;  // T'(y) = 1 + j beta y^(j-1)
  const Poly rhs = truncate_mul(dt, g, K);
  return eval_at(rhs, y, K);
}

PolySeries random_series(std::mt19937_64& rng, int K, double c2) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> c{c2};
  for (int k = 3; k <= K; ++k) c.push_back(u(rng));
  return PolySeries(c);
}

}  // namespace

TEST(ScaleQuadratic, AlreadyNormalised) {
  const auto [s, alpha] = scale_quadratic(PolySeries({-1.0, 0.7}));
  EXPECT_EQ(alpha, 1.0);
  EXPECT_EQ(s, PolySeries({-1.0, 0.7}));
}

TEST(ScaleQuadratic, TakensCoefficientFromDerivatives) {
  // 1/2 f_xx x^2 + 1/6 f_xxx x^3 with f_xx = -2, f_xxx = 6.
  const auto [s, alpha] = scale_quadratic(PolySeries({-1.0, 1.0}));
  EXPECT_EQ(s[3], 2.0 * 6.0 / (3.0 * 4.0));
  (void)alpha;
}

TEST(ScaleQuadratic, CubicIsC3OverC2Squared) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> c2d(-5.0, -0.1), c3d(-5.0, 5.0);
  for (int n = 0; n < 200; ++n) {
    const double c2 = c2d(rng), c3 = c3d(rng);
    const auto [s, alpha] = scale_quadratic(PolySeries({c2, c3}));
    EXPECT_EQ(s[2], -1.0);
    EXPECT_NEAR(s[3], c3 / (c2 * c2), 1e-12 * std::max(1.0, std::abs(c3 / (c2 * c2))));
    EXPECT_EQ(alpha, -c2);
  }
}

TEST(ScaleQuadratic, RejectsZeroQuadratic) {
  EXPECT_THROW(scale_quadratic(PolySeries({0.0, 1.0})), GenericityError);
}

TEST(Reduce, TakensFormIsFixed) {
  const auto [s, log] = reduce_to_takens(PolySeries({-1.0, 1.0}));
  EXPECT_EQ(s, PolySeries({-1.0, 1.0}));
  EXPECT_TRUE(log.removals.empty());
  EXPECT_EQ(log.a, 1.0);
}

TEST(Reduce, FirstRemovalStep) {
  const auto [s, log] = reduce_to_takens(PolySeries({-1.0, 1.0, 1.0, 0.0}));
  ASSERT_FALSE(log.removals.empty());
  EXPECT_EQ(log.removals.front().coefficient, 1.0);
  EXPECT_EQ(log.removals.front().power, 3);
  EXPECT_EQ(s[4], 0.0);
  // Hand computation of the single step z = y + y^3 applied to -y^2 + y^3 + y^4.
  const PolySeries one = apply_near_identity(PolySeries({-1.0, 1.0, 1.0, 0.0}), 3, 1.0);
  EXPECT_NEAR(one[4], 0.0, 1e-15);
  EXPECT_NEAR(one[3], 1.0, 1e-15);
}

TEST(Reduce, NearIdentityMatchesExplicitPolynomialAlgebra) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 20; ++n) {
    const int K = 8;
    const PolySeries s = random_series(rng, K, -1.0);
    Poly g(static_cast<std::size_t>(K + 1), 0.0);
    for (int k = 2; k <= K; ++k) g[static_cast<std::size_t>(k)] = s[k];
    const int j = 2 + n % 5;
    const double beta = u(rng);
    const PolySeries lib = apply_near_identity(s, j, beta);
    const Poly ref = transform(g, j, beta, K);
    EXPECT_NEAR(ref[0], 0.0, 1e-12);
    EXPECT_NEAR(ref[1], 0.0, 1e-12);
    for (int k = 2; k <= K; ++k) {
      EXPECT_NEAR(lib[k], ref[static_cast<std::size_t>(k)], 1e-10 * std::max(1.0, std::abs(ref[static_cast<std::size_t>(k)])));
    }
  }
}

TEST(Reduce, RandomDegreeEightWithBruteForceReplay) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 20; ++n) {
    const int K = 8;
    const PolySeries s = random_series(rng, K, -1.0);
    const auto [red, log] = reduce_to_takens(s);
    for (int k = 4; k <= K; ++k) EXPECT_LT(std::abs(red[k]), 1e-10);
    EXPECT_NEAR(log.a, s[3], 1e-12);
    // Replay the logged steps with the independent polynomial algebra.
    Poly g(static_cast<std::size_t>(K + 1), 0.0);
    for (int k = 2; k <= K; ++k) g[static_cast<std::size_t>(k)] = s[k] / std::pow(log.alpha, k - 1);
    for (const NormalFormStep& step : log.removals) g = transform(g, step.power, step.coefficient, K);
    EXPECT_NEAR(g[2], -1.0, 1e-10);
    EXPECT_NEAR(g[3], log.a, 1e-10);
    for (int k = 4; k <= K; ++k) EXPECT_LT(std::abs(g[static_cast<std::size_t>(k)]), 1e-9);
    // And with the library replay.
    const PolySeries rep = replay(s, log);
    for (int k = 2; k <= K; ++k) EXPECT_NEAR(rep[k], red[k], 1e-12);
  }
}

TEST(Reduce, CubicPersistsUnderQuadraticTransforms) {
  // z = y + beta y^2 on -y^2 + a y^3: the cubic coefficient is untouched.
  for (double beta : {-3.0, -0.5, 0.25, 1.0, 7.0}) {
    const PolySeries t = apply_near_identity(PolySeries({-1.0, 0.375, 0.0, 0.0}), 2, beta);
    EXPECT_EQ(t[2], -1.0);
    EXPECT_EQ(t[3], 0.375);
  }
}

TEST(Reduce, AgreesWithTakensNumbersOfTheModel) {
  const ScalarModel1P f("cubic", "x", "mu", {}, "mu - 0.8*x^2 + 0.3*x^3 - 0.2*x^4 + exp(x) - 1 - x");
  // f_x = 0 at x = 0, so the fold is at (0, 0).
  const SaddleNodePoint sn = locate_saddle_node(f, 0.0, 0.0);
  const auto [red, log] = reduce_to_takens(PolySeries::at_fold(f, sn.x, sn.mu, 8));
  EXPECT_NEAR(log.a, sn.a0, 1e-12);
}

TEST(Reduce, OrderLimit) {
  std::vector<double> c(17, 0.1);
  c[0] = -1.0;
  EXPECT_THROW(reduce_to_takens(PolySeries(c)), std::invalid_argument);
}
