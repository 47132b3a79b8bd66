#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sntk/centre_manifold.hpp"
#include "sntk/continuation.hpp"
#include "sntk/error.hpp"
#include "sntk/flow.hpp"
#include "sntk/saddle_node.hpp"
#include "synthetic.hpp"

using namespace sntk;
using namespace synthetic;

namespace {

// Small dense solve by partial pivoting.
std::vector<double> solve(std::vector<std::vector<double>> M, std::vector<double> r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(M[i][c]) > std::abs(M[piv][c])) piv = i;
    std::swap(M[c], M[piv]);
    std::swap(r[c], r[piv]);
    for (std::size_t i = c + 1; i < n; ++i) {
      const double f = M[i][c] / M[c][c];
      for (std::size_t j = c; j < n; ++j) M[i][j] -= f * M[c][j];
      r[i] -= f * r[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = r[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= M[i][j] * x[j];
    x[i] = acc / M[i][i];
  }
  return x;
}

}  // namespace

TEST(Jordanize, DecoupledSystemReadsBackExactly) {
  const PlanarModel2P m("dec", {"x", "y"}, {"p", "m"}, {}, "p - 0.5*x^2 + 0.25*x^3 + 0*m", "-2*y", 0.0);
  const JordanizedSystem J = jordanize(m, {0.0, 0.0, 0.0, 0.0});
  EXPECT_EQ(J.lambda, -2.0);
  EXPECT_EQ(J.basis, (std::array<double, 4>{1.0, 0.0, 0.0, 1.0}));
  EXPECT_EQ(J.b[0], 1.0);
  EXPECT_EQ(J.b[1], -0.5);
  EXPECT_EQ(J.b[7], 0.25);
  EXPECT_EQ(J.c[1], 0.0);
  const CmReduction r = cm_reduce(J);
  EXPECT_EQ(r.d1, 0.0);
  EXPECT_EQ(r.a0, 0.25 / 0.25);
  EXPECT_EQ(r.p0sq, 0.5);
}

TEST(Jordanize, RotatedCopyKeepsInvariants) {
  Synthetic s;
  s.b[0] = 1.0;
  s.b[1] = -0.5;
  s.b[7] = 0.25;
  s.lambda = -2.0;
  const double c = std::sqrt(0.5);
  const CmReduction r0 = cm_reduce(jordanize(build(s), {0, 0, 0, 0}));
  const JordanizedSystem J = jordanize(recoded(s, {c, -c, c, c}), {0, 0, 0, 0});
  const CmReduction r1 = cm_reduce(J);
  EXPECT_NEAR(J.lambda, -2.0, 1e-9);
  EXPECT_NEAR(r1.p0sq, r0.p0sq, 1e-9);
  EXPECT_NEAR(r1.a0, r0.a0, 1e-9);
}

TEST(Jordanize, NotAFold) {
  const PlanarModel2P m("hyp", {"x", "y"}, {"p", "m"}, {}, "-x + p + 0*m", "-2*y", 0.0);
  EXPECT_THROW(jordanize(m, {0, 0, 0, 0}), GenericityError);
}

TEST(CmReduce, HandEvaluatedCoupling) {
  // lambda = -1, c1 = 1, b2 = 1, b1 = -1, b0 = 1, b7 = 0.
  const PlanarModel2P m("hand", {"x", "y"}, {"p", "m"}, {}, "p - x^2 + x*y + 0*m", "-y + x^2", 0.0);
  const CmReduction r = cm_reduce(jordanize(m, {0, 0, 0, 0}));
  EXPECT_NEAR(r.cubic, 1.0, 1e-14);
  EXPECT_NEAR(r.a0, 1.0, 1e-14);
  EXPECT_NEAR(r.d1, 1.0, 1e-14);
}

TEST(CmReduce, PrescribedManifoldsAreRecovered) {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 20; ++n) {
    const Synthetic s = random_synthetic(rng);
    const CmReduction r = cm_reduce(jordanize(build(s), {0, 0, 0, 0}));
    // On y = d1 x^2 + ..., x' = b1 x^2 + (b7 + b2 d1) x^3 + ... at p = 0.
    EXPECT_NEAR(r.d1, s.d1, 1e-8);
    EXPECT_NEAR(r.cubic, s.b[7] + s.b[2] * s.d1, 1e-8);
    EXPECT_NEAR(r.lambda, s.lambda, 1e-12);
  }
}

TEST(CmReduce, LinearRecodingInvariance) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 0; n < 20; ++n) {
    const Synthetic s = random_synthetic(rng);
    std::array<double, 4> A{};
    do {
      for (double& a : A) a = u(rng);
    } while (std::abs(A[0] * A[3] - A[1] * A[2]) < 0.3);
    const CmReduction r0 = cm_reduce(jordanize(build(s), {0, 0, 0, 0}));
    const CmReduction r1 = cm_reduce(jordanize(recoded(s, A), {0, 0, 0, 0}));
    EXPECT_NEAR(r1.p0sq, r0.p0sq, 1e-8 * std::max(1.0, r0.p0sq));
    EXPECT_NEAR(r1.a0, r0.a0, 1e-8 * std::max(1.0, std::abs(r0.a0)));
  }
}

TEST(CmReduce, ReducedModelHasTheSameNumbers) {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 5; ++n) {
    const CmReduction r = cm_reduce(jordanize(build(random_synthetic(rng)), {0, 0, 0, 0}));
    const TakensNumbers t = takens_numbers(r.reduced.derivative_bundle(0.0, 0.0));
    EXPECT_NEAR(t.p0sq, r.p0sq, 1e-10);
    EXPECT_NEAR(t.a0, r.a0, 1e-10);
  }
}

TEST(CmReduce, DerivativeFormHasTheDerivedSign) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 5; ++n) {
    const Synthetic s = random_synthetic(rng);
    const CmReduction r = cm_reduce(jordanize(build(s), {0, 0, 0, 0}));
    // In Jordan coordinates F_xx = 2 b1, F_xxx = 6 b7, F_xy = b2, G_xx = 2 c1.
    const double c1 = -s.lambda * s.d1;
    const double a = a0_from_planar_derivatives(2 * s.b[1], 6 * s.b[7], s.b[2], 2 * c1, s.lambda);
    EXPECT_NEAR(a, r.a0, 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST(CmReduce, Stommel2dUpperFoldAtAlpha36) {
  const PlanarModel2P model = builtin_planar("stommel2d", {{"alpha", 36.0}});
  // The fold at the larger p is the one continued from y_-.
  const BranchPoint bp = seed_stommel_fold(model, 7.5, FoldBranch::minus);
  const PlanarPoint at{bp.x, bp.y, bp.p, bp.m};
  const JordanizedSystem J = jordanize(model, at);
  const CmReduction r = cm_reduce(J);
  EXPECT_LT(J.lambda, 0.0);
  EXPECT_LT(std::abs(r.a0 - (-0.2222)), 0.1);

  // Slow-manifold oracle: at the fold parameter, orbits collapse onto the
  // centre manifold, where u' = B u^2 + K u^3 + ...; fit B, K from the flow.
  const auto& P = J.basis;
  const auto& Q = J.inverse;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (double u0 : {-0.008, -0.004, 0.004, 0.008}) {
    const std::array<double, 2> start{at.x + u0 * P[0], at.y + u0 * P[2]};
    const FlowResult fr = integrate(model, start, at.p, at.m, 2.0);
    const double dx = fr.state[0] - at.x, dy = fr.state[1] - at.y;
    const double u = Q[0] * dx + Q[1] * dy;
    const auto v = model({fr.state[0], fr.state[1], at.p, at.m});
    rows.push_back({u * u, u * u * u, u * u * u * u, u * u * u * u * u});
    rhs.push_back(Q[0] * v[0] + Q[1] * v[1]);
  }
  const std::vector<double> fit = solve(rows, rhs);
  EXPECT_NEAR(fit[0], r.b1, 1e-4 * std::abs(r.b1));
  EXPECT_NEAR(fit[1] / (fit[0] * fit[0]), r.a0, 1e-3 * std::abs(r.a0));
}
