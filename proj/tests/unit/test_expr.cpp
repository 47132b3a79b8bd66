#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>

#include "oracles.hpp"
#include "sntk/error.hpp"
#include "sntk/expr.hpp"

using namespace sntk;

TEST(Parse, StommelRightHandSide) {
  const Expr e = Expr::parse("p - y*(1+m*(1-y)^2)", {"p", "y", "m"});
  EXPECT_EQ(e.evaluate(std::map<std::string, double>{{"y", 0.0}, {"p", 1.0}, {"m", 7.5}}), 1.0);
}

TEST(Parse, Precedence) {
  EXPECT_EQ(Expr::parse("1+2*3", {}).evaluate(std::map<std::string, double>{}), 7.0);
  EXPECT_EQ(Expr::parse("-2^2", {}).evaluate(std::map<std::string, double>{}), -4.0);
  EXPECT_EQ(Expr::parse("2^3^2", {}).evaluate(std::map<std::string, double>{}), 64.0);
  EXPECT_EQ(Expr::parse("8/4/2", {}).evaluate(std::map<std::string, double>{}), 1.0);
  EXPECT_EQ(Expr::parse("1-2-3", {}).evaluate(std::map<std::string, double>{}), -4.0);
  EXPECT_EQ(Expr::parse("2*-3", {}).evaluate(std::map<std::string, double>{}), -6.0);
}

TEST(Parse, UndeclaredIdentifierNamesIt) {
  try {
    (void)Expr::parse("x + q", {"x"});
    FAIL() << "expected an error";
  } catch (const UndeclaredIdentifierError& e) {
    EXPECT_EQ(e.name(), "q");
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(Parse, SyntaxErrorsCarryPosition) {
  EXPECT_THROW((void)Expr::parse("", {}), ParseError);
  EXPECT_THROW((void)Expr::parse("2x", {"x"}), ParseError);
  EXPECT_THROW((void)Expr::parse("(1+2", {}), ParseError);
  EXPECT_THROW((void)Expr::parse("foo(1)", {}), ParseError);
  EXPECT_THROW((void)Expr::parse("x^x", {"x"}), ParseError);
  try {
    (void)Expr::parse("1 + * 2", {});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(Parse, RoundTrip) {
  const std::vector<std::string> names = {"x", "mu", "a"};
  for (const char* text : {"p - y*(1+m*(1-y)^2)", "-x^2 + a*x^3 - mu", "exp(-x)/(1+mu)",
                           "sqrt(abs(x)) * tanh(mu) - cos(a)^-2", "x - -x - (x - mu) - a"}) {
    std::vector<std::string> decl = names;
    decl.insert(decl.end(), {"p", "y", "m"});
    const Expr e = Expr::parse(text, decl);
    const Expr again = Expr::parse(e.to_string(), decl);
    EXPECT_TRUE(e == again) << text << " -> " << e.to_string();
  }
}

TEST(EvalJet, SquareAtThree) {
  const Expr e = Expr::parse("x^2", {"x"});
  const Jet2 j = e.evaluate(std::map<std::string, Jet2>{{"x", Jet2::variable0(2, 3.0)}});
  EXPECT_EQ(j.partial(0, 0), 9.0);
  EXPECT_EQ(j.partial(1, 0), 6.0);
  EXPECT_EQ(j.partial(2, 0), 2.0);
}

TEST(EvalJet, StommelDerivativesAtYOne) {
  const Expr e = Expr::parse("p - y*(1+m*(1-y)^2)", {"p", "y", "m"});
  const Jet2 j = e.evaluate(std::map<std::string, Jet2>{{"y", Jet2::variable0(4, 1.0)},
                                                        {"p", Jet2::variable1(4, 0.3)},
                                                        {"m", Jet2::constant(4, 7.5)}});
  EXPECT_DOUBLE_EQ(j.partial(1, 0), -1.0);
  // f_yy = 4m - 6my at y = 1.
  EXPECT_DOUBLE_EQ(j.partial(2, 0), 4.0 * 7.5 - 6.0 * 7.5);
  EXPECT_DOUBLE_EQ(j.partial(0, 1), 1.0);
}

TEST(EvalJet, AbsAtKinkIsRejected) {
  const Expr e = Expr::parse("abs(x)", {"x"});
  EXPECT_THROW(e.evaluate(std::map<std::string, Jet2>{{"x", Jet2::variable0(3, 0.0)}}),
               SingularJetError);
  EXPECT_EQ(e.evaluate(std::map<std::string, double>{{"x", 0.0}}), 0.0);
}

TEST(EvalJet, FractionalPowerNeedsPositiveBase) {
  const Expr e = Expr::parse("x^0.5", {"x"});
  EXPECT_THROW(e.evaluate(std::map<std::string, Jet2>{{"x", Jet2::variable0(3, -1.0)}}),
               SingularJetError);
}

namespace {

// Random expression over x, mu built from a small grammar, both as text and
// as a directly evaluated value.
struct RandomExpr {
  std::mt19937_64& rng;

  std::string gen(int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 8 : 2);
    std::uniform_real_distribution<double> num(0.1, 3.0);
    switch (pick(rng)) {
      case 0: return "x";
      case 1: return "mu";
      case 2: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", num(rng));
        return buf;
      }
      case 3: return "(" + gen(depth - 1) + " + " + gen(depth - 1) + ")";
      case 4: return "(" + gen(depth - 1) + " - " + gen(depth - 1) + ")";
      case 5: return "(" + gen(depth - 1) + " * " + gen(depth - 1) + ")";
      case 6: return "sin(" + gen(depth - 1) + ")";
      case 7: return "exp(" + gen(depth - 1) + "/4)";
      default: return "(" + gen(depth - 1) + ")^2";
    }
  }
};

}  // namespace

TEST(EvalJet, ValueMatchesPlainEvaluation) {
  std::mt19937_64 rng(3);
  RandomExpr g{rng};
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const std::string text = g.gen(4);
    const Expr e = Expr::parse(text, {"x", "mu"});
    const double x = pt(rng), mu = pt(rng);
    const double plain = e.evaluate(std::map<std::string, double>{{"x", x}, {"mu", mu}});
    const Jet2 j = e.evaluate(std::map<std::string, Jet2>{{"x", Jet2::variable0(3, x)},
                                                          {"mu", Jet2::variable1(3, mu)}});
    EXPECT_NEAR(j.partial(0, 0), plain, 1e-14 * std::max(1.0, std::abs(plain))) << text;
  }
}

TEST(EvalJet, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  RandomExpr g{rng};
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  for (int n = 0; n < 40; ++n) {
    const std::string text = g.gen(3);
    const Expr e = Expr::parse(text, {"x", "mu"});
    const double x = pt(rng), mu = pt(rng);
    const Jet2 j = e.evaluate(std::map<std::string, Jet2>{{"x", Jet2::variable0(3, x)},
                                                          {"mu", Jet2::variable1(3, mu)}});
    auto f = [&](double a, double b) {
      return e.evaluate(std::map<std::string, double>{{"x", a}, {"mu", b}});
    };
    for (int i = 0; i <= 3; ++i) {
      for (int k = 0; i + k <= 3; ++k) {
        const double fd = oracle::partial(f, x, mu, i, k, 1e-2, 1e-2);
        EXPECT_NEAR(j.partial(i, k), fd, 1e-6 * std::max(1.0, std::abs(fd)))
            << text << " (" << i << "," << k << ")";
      }
    }
  }
}
