#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sntk/error.hpp"
#include "sntk/jet.hpp"

using namespace sntk;

namespace {

Jet2 random_jet(std::mt19937_64& rng, int order) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Jet2 j(order);
  for (int i = 0; i <= order; ++i) {
    for (int k = 0; i + k <= order; ++k) j.coeff(i, k) = u(rng);
  }
  return j;
}

void expect_near(const Jet2& a, const Jet2& b, double tol) {
  ASSERT_EQ(a.order(), b.order());
  for (int i = 0; i <= a.order(); ++i) {
    for (int k = 0; i + k <= a.order(); ++k) EXPECT_NEAR(a.coeff(i, k), b.coeff(i, k), tol);
  }
}

}  // namespace

TEST(Jet2, SquareOfVariable) {
  const Jet2 x = Jet2::variable0(2, 3.0);
  const Jet2 sq = jet_arith(x, x, JetOp::mul);
  EXPECT_EQ(sq.partial(0, 0), 9.0);
  EXPECT_EQ(sq.partial(1, 0), 6.0);
  EXPECT_EQ(sq.partial(2, 0), 2.0);
  EXPECT_EQ(sq.coeff(2, 0), 1.0);
}

TEST(Jet2, AdditiveIdentity) {
  std::mt19937_64 rng(1);
  const Jet2 a = random_jet(rng, 4);
  EXPECT_EQ(jet_arith(a, Jet2(4), JetOp::add), a);
}

TEST(Jet2, PartialExtraction) {
  EXPECT_EQ(Jet2::constant(4, 7.0).partial(0, 0), 7.0);
  const Jet2 x = Jet2::variable0(4, 0.0);
  EXPECT_EQ((x * x).partial(2, 0), 2.0);
  const Jet2 mux = Jet2::variable1(4, 2.0) * Jet2::variable0(4, 1.0);
  EXPECT_EQ(mux.partial(1, 1), 1.0);
  EXPECT_THROW((void)mux.partial(3, 2), std::out_of_range);
}

TEST(Jet2, ConstantLiftHasOnlyValue) {
  const Jet2 c = Jet2::constant(5, -3.5);
  for (int i = 0; i <= 5; ++i) {
    for (int k = 0; i + k <= 5; ++k) EXPECT_EQ(c.coeff(i, k), (i == 0 && k == 0) ? -3.5 : 0.0);
  }
}

TEST(Jet2, DivisionBySingularJetThrows) {
  const Jet2 x = Jet2::variable0(3, 0.0);
  EXPECT_THROW(jet_arith(Jet2::constant(3, 1.0), x, JetOp::div), SingularJetError);
  EXPECT_THROW(log(x), SingularJetError);
  EXPECT_THROW(sqrt(x), SingularJetError);
  EXPECT_THROW(abs(x), SingularJetError);
}

TEST(Jet2, OrderMismatchRejected) {
  EXPECT_THROW(jet_arith(Jet2(3), Jet2(4), JetOp::add), std::invalid_argument);
}

TEST(Jet2, XExpXThirdDerivativeMatchesFiniteDifferences) {
  const Jet2 x = Jet2::variable0(3, 0.5);
  const Jet2 j = x * exp(x);
  const double fd = oracle::partial([](double t, double) { return t * std::exp(t); }, 0.5, 0.0, 3,
                                    0, 1e-2, 1.0);
  EXPECT_NEAR(j.partial(3, 0), fd, 1e-6 * std::abs(fd));
  // Closed form (x + 3) e^x as a second reference.
  EXPECT_NEAR(j.partial(3, 0), 3.5 * std::exp(0.5), 1e-13);
}

TEST(Jet2, RingAxioms) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Jet2 a = random_jet(rng, 5), b = random_jet(rng, 5), c = random_jet(rng, 5);
    expect_near((a + b) + c, a + (b + c), 1e-14);
    expect_near(a * b, b * a, 1e-14);
    expect_near(a * (b + c), a * b + a * c, 1e-13);
  }
}

TEST(Jet2, LeibnizRule) {
  // Polynomial jets with integer coefficients make the identity exact.
  Jet2 a(4), b(4);
  for (int i = 0; i <= 4; ++i) {
    for (int k = 0; i + k <= 4; ++k) {
      a.coeff(i, k) = i - 2 * k + 1;
      b.coeff(i, k) = 3 - i + k;
    }
  }
  const Jet2 ab = a * b;
  auto binom = [](int n, int r) {
    double v = 1;
    for (int t = 1; t <= r; ++t) v = v * (n - r + t) / t;
    return v;
  };
  for (int i = 0; i <= 4; ++i) {
    for (int k = 0; i + k <= 4; ++k) {
      double sum = 0.0;
      for (int p = 0; p <= i; ++p) {
        for (int q = 0; q <= k; ++q) {
          sum += binom(i, p) * binom(k, q) * a.partial(p, q) * b.partial(i - p, k - q);
        }
      }
      EXPECT_EQ(ab.partial(i, k), sum) << i << "," << k;
    }
  }
}

TEST(Jet2, ElementaryFunctionsAgreeWithFiniteDifferences) {
  struct Case {
    const char* name;
    Jet2 (*jet)(const Jet2&, const Jet2&);
    double (*f)(double, double);
  };
  const Case cases[] = {
      {"exp", [](const Jet2& x, const Jet2& m) { return exp(x * m); },
       [](double x, double m) { return std::exp(x * m); }},
      {"log", [](const Jet2& x, const Jet2& m) { return log(x + m * m); },
       [](double x, double m) { return std::log(x + m * m); }},
      {"sqrt", [](const Jet2& x, const Jet2& m) { return sqrt(x * m); },
       [](double x, double m) { return std::sqrt(x * m); }},
      {"sin", [](const Jet2& x, const Jet2& m) { return sin(x - 2.0 * m); },
       [](double x, double m) { return std::sin(x - 2.0 * m); }},
      {"cos", [](const Jet2& x, const Jet2& m) { return cos(x * m); },
       [](double x, double m) { return std::cos(x * m); }},
      {"tanh", [](const Jet2& x, const Jet2& m) { return tanh(x + m); },
       [](double x, double m) { return std::tanh(x + m); }},
      {"abs", [](const Jet2& x, const Jet2& m) { return abs(x - m); },
       [](double x, double m) { return std::abs(x - m); }},
      {"pow2.5", [](const Jet2& x, const Jet2& m) { return pow(x + m, 2.5); },
       [](double x, double m) { return std::pow(x + m, 2.5); }},
      {"pow-3", [](const Jet2& x, const Jet2& m) { return pow(x * m, -3); },
       [](double x, double m) { return std::pow(x * m, -3.0); }},
      {"quotient", [](const Jet2& x, const Jet2& m) { return x / (1.0 + m * m); },
       [](double x, double m) { return x / (1.0 + m * m); }},
  };
  const double x0 = 0.7, m0 = 1.3;
  for (const Case& c : cases) {
    const Jet2 j = c.jet(Jet2::variable0(4, x0), Jet2::variable1(4, m0));
    EXPECT_NEAR(j.value(), c.f(x0, m0), 1e-14 * std::max(1.0, std::abs(j.value()))) << c.name;
    for (int i = 0; i <= 3; ++i) {
      for (int k = 0; i + k <= 3; ++k) {
        const double fd = oracle::partial(c.f, x0, m0, i, k, 1e-2, 1e-2);
        const double scale = std::max(1.0, std::abs(j.partial(i, k)));
        EXPECT_NEAR(j.partial(i, k), fd, 1e-6 * scale) << c.name << " (" << i << "," << k << ")";
      }
    }
  }
}

TEST(Jet1, ComposeWithIdentityIsUnchanged) {
  const Jet1 inner(4, {0.0, 2.0, -1.0, 0.5, 3.0});
  const Jet1 id(4, {0.0, 1.0, 0.0, 0.0, 0.0});
  EXPECT_EQ(compose(id, inner), inner);
}

TEST(Jet1, ComposeSquareOfYPlusYSquared) {
  const Jet1 outer(4, {0.0, 0.0, 1.0, 0.0, 0.0});
  const Jet1 inner(4, {0.0, 1.0, 1.0, 0.0, 0.0});
  EXPECT_EQ(compose(outer, inner), Jet1(4, {0.0, 0.0, 1.0, 2.0, 1.0}));
}

TEST(Jet1, ComposeRejectsNonzeroInnerConstant) {
  EXPECT_THROW(compose(Jet1(2, {0, 1, 0}), Jet1(2, {1, 1, 0})), std::invalid_argument);
}

TEST(Jet1, ComposeMatchesBruteForceExpansion) {
  // Brute force: expand outer(inner) as sum_k o_k inner^k with explicit
  // polynomial products (no truncation until the end).
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto polymul = [](const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    }
    return r;
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> o(7), in(7);
    for (auto& v : o) v = u(rng);
    for (auto& v : in) v = u(rng);
    in[0] = 0.0;
    std::vector<double> full(1, 0.0), power(1, 1.0);
    for (int k = 0; k <= 6; ++k) {
      if (full.size() < power.size()) full.resize(power.size(), 0.0);
      for (std::size_t i = 0; i < power.size(); ++i) full[i] += o[k] * power[i];
      power = polymul(power, in);
    }
    const Jet1 c = compose(Jet1(6, o), Jet1(6, in));
    for (int i = 0; i <= 6; ++i) EXPECT_NEAR(c[i], full[static_cast<std::size_t>(i)], 1e-12);
  }
}

TEST(Jet1, RevertInvertsComposition) {
  const Jet1 s(6, {0.0, 2.0, -1.0, 0.5, 0.25, -0.3, 0.1});
  const Jet1 r = revert(s);
  const Jet1 id = compose(s, r);
  EXPECT_NEAR(id[1], 1.0, 1e-14);
  for (int i = 2; i <= 6; ++i) EXPECT_NEAR(id[i], 0.0, 1e-13);
}
