#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sntk/error.hpp"
#include "sntk/flow.hpp"

using namespace sntk;

namespace {

ScalarModel1P nf(double a = 0.0) { return builtin_scalar("normalform", {{"a", a}}); }

}  // namespace

TEST(Integrate, TanhSolution) {
  const FlowResult r = integrate(nf(), 0.0, 1.0, 1.0);
  EXPECT_EQ(r.status, FlowStatus::ok);
  EXPECT_NEAR(r.x(), std::tanh(1.0), 1e-8);
}

TEST(Integrate, ZeroTimeReturnsInitialStateExactly) {
  const FlowResult r = integrate(nf(0.3), 0.123456789, 0.5, 0.0);
  EXPECT_EQ(r.x(), 0.123456789);
  EXPECT_EQ(r.time, 0.0);
}

TEST(Integrate, BoundaryHitInArctanTime) {
  FlowOptions o;
  o.lower = -10.0;
  const FlowResult r = integrate(nf(), 0.0, -1.0, 5.0, o);
  EXPECT_EQ(r.status, FlowStatus::boundary_hit);
  EXPECT_NEAR(r.x(), -10.0, 1e-9);
  EXPECT_NEAR(r.time, std::atan(10.0), 1e-8);
}

TEST(Integrate, Blowup) {
  FlowOptions o;
  o.blowup_bound = 1e6;
  const FlowResult r = integrate(nf(), 0.0, -1.0, 5.0, o);
  EXPECT_EQ(r.status, FlowStatus::blowup);
  EXPECT_LT(r.time, std::numbers::pi / 2.0 + 1e-3);
}

TEST(Integrate, BackwardTime) {
  // ydot = 1 - y^2 from tanh(1) backwards for unit time returns to 0.
  const FlowResult r = integrate(nf(), std::tanh(1.0), 1.0, -1.0);
  EXPECT_NEAR(r.x(), 0.0, 1e-8);
}

TEST(Integrate, FlowProperty) {
  const ScalarModel1P g = nf(0.4);
  const double t1 = 0.7, t2 = 1.9;
  const FlowResult a = integrate(g, 0.2, 0.3, t1);
  const FlowResult b = integrate(g, a.x(), 0.3, t2);
  const FlowResult c = integrate(g, 0.2, 0.3, t1 + t2);
  EXPECT_NEAR(b.x(), c.x(), 1e-9);
  const FlowResult back = integrate(g, c.x(), 0.3, -(t1 + t2));
  EXPECT_NEAR(back.x(), 0.2, 1e-9);
}

TEST(Integrate, SensitivityMatchesClosedForm) {
  // For ydot = 1 - y^2, y(t) = tanh(t + atanh(y0)), dy/dy0 = sech^2(t + s)/(1 - y0^2).
  FlowOptions o;
  o.sensitivity = true;
  const double y0 = 0.3, t = 0.8;
  const FlowResult r = integrate(nf(), y0, 1.0, t, o);
  const double s = std::atanh(y0);
  const double expected = 1.0 / (std::cosh(t + s) * std::cosh(t + s)) / (1.0 - y0 * y0);
  ASSERT_TRUE(r.sensitivity.has_value());
  EXPECT_NEAR(*r.sensitivity, expected, 1e-8);
}

TEST(Integrate, PlanarLinearSystem) {
  // x' = -x + p, y' = -2 y: exact solution.
  const PlanarModel2P lin("lin", {"x", "y"}, {"p", "m"}, {}, "-x + p", "-m*y", 2.0);
  const FlowResult r = integrate(lin, {0.0, 1.0}, 1.0, 2.0, 1.5);
  EXPECT_NEAR(r.state[0], 1.0 - std::exp(-1.5), 1e-9);
  EXPECT_NEAR(r.state[1], std::exp(-3.0), 1e-9);
}

TEST(TimeOfFlight, SameStateIsZero) { EXPECT_EQ(time_of_flight(nf(), 0.5, 0.5, -1.0), 0.0); }

TEST(TimeOfFlight, ArctanCrossingTime) {
  // ydot = mu - y^2, mu = -0.01, from 0.1 to -0.1.
  const double mu = -0.01, L = 0.1;
  const double expected = (2.0 / std::sqrt(-mu)) * std::atan(L / std::sqrt(-mu));
  EXPECT_NEAR(time_of_flight(nf(), L, -L, mu), expected, 1e-8);
  EXPECT_NEAR(expected, 15.70796, 1e-5);
  // Quadrature of dy / g(y) as a second reference.
  const double quad = oracle::integrate([&](double y) { return 1.0 / (y * y - mu); }, -L, L);
  EXPECT_NEAR(time_of_flight(nf(), L, -L, mu), quad, 1e-8);
}

TEST(TimeOfFlight, Unreachable) {
  // Equilibrium at y = 1 between 0.5 and 1.5.
  EXPECT_THROW((void)time_of_flight(nf(), 0.5, 1.5, 1.0), UnreachableError);
  // Wrong direction.
  EXPECT_THROW((void)time_of_flight(nf(), 0.5, 0.0, 1.0), UnreachableError);
  // Starting at an equilibrium.
  EXPECT_THROW((void)time_of_flight(nf(), 1.0, 0.5, 1.0), UnreachableError);
}
