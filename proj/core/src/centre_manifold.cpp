#include "sntk/centre_manifold.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "sntk/error.hpp"
#include "sntk/saddle_node.hpp"

namespace sntk {

namespace {

constexpr int kMaxNewton = 50;

struct PairJet {
  Jet2 F;
  Jet2 G;
};

PairJet pair_jet(const PlanarModel2P& model, const PlanarPoint& at, PlanarVar a, PlanarVar b,
                 int order) {
  auto j = model.jet(at, a, b, order);
  return {j[0], j[1]};
}

void normalise(Eigen::Vector2d& v) {
  v.normalize();
  if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) v = -v;
}

}  // namespace

FoldSystem fold_system(const PlanarModel2P& model, const PlanarPoint& at) {
  using V = PlanarVar;
  const PairJet xy = pair_jet(model, at, V::x, V::y, 2);
  const PairJet xp = pair_jet(model, at, V::x, V::p, 2);
  const PairJet yp = pair_jet(model, at, V::y, V::p, 2);
  const PairJet xm = pair_jet(model, at, V::x, V::m, 2);
  const PairJet ym = pair_jet(model, at, V::y, V::m, 2);

  const double Fx = xy.F.partial(1, 0), Fy = xy.F.partial(0, 1);
  const double Gx = xy.G.partial(1, 0), Gy = xy.G.partial(0, 1);
  const double Fxx = xy.F.partial(2, 0), Fxy = xy.F.partial(1, 1), Fyy = xy.F.partial(0, 2);
  const double Gxx = xy.G.partial(2, 0), Gxy = xy.G.partial(1, 1), Gyy = xy.G.partial(0, 2);
  const double Fp = xp.F.partial(0, 1), Gp = xp.G.partial(0, 1);
  const double Fxp = xp.F.partial(1, 1), Gxp = xp.G.partial(1, 1);
  const double Fyp = yp.F.partial(1, 1), Gyp = yp.G.partial(1, 1);
  const double Fm = xm.F.partial(0, 1), Gm = xm.G.partial(0, 1);
  const double Fxm = xm.F.partial(1, 1), Gxm = xm.G.partial(1, 1);
  const double Fym = ym.F.partial(1, 1), Gym = ym.G.partial(1, 1);

  FoldSystem s;
  s.residual = {xy.F.value(), xy.G.value(), Fx * Gy - Fy * Gx};
  s.jacobian = {Fx, Fy, Fp, Fm,  //
                Gx, Gy, Gp, Gm,  //
                Fxx * Gy + Fx * Gxy - Fxy * Gx - Fy * Gxx,
                Fxy * Gy + Fx * Gyy - Fyy * Gx - Fy * Gxy,
                Fxp * Gy + Fx * Gyp - Fyp * Gx - Fy * Gxp,
                Fxm * Gy + Fx * Gym - Fym * Gx - Fy * Gxm};
  return s;
}

PlanarPoint polish_fold_point(const PlanarModel2P& model, PlanarPoint pt) {
  auto norm = [](const std::array<double, 3>& r) { return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]); };
  FoldSystem s = fold_system(model, pt);
  for (int it = 0; it < kMaxNewton; ++it) {
    Eigen::Matrix3d J;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) J(r, c) = s.jacobian[static_cast<std::size_t>(4 * r + c)];
    }
    const Eigen::Vector3d rhs(-s.residual[0], -s.residual[1], -s.residual[2]);
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
    if (!lu.isInvertible()) throw ConvergenceError("singular fold system (cusp suspected)");
    const Eigen::Vector3d d = lu.solve(rhs);
    if (!d.allFinite()) throw ConvergenceError("non-finite Newton step on the fold system");

    const double r0 = norm(s.residual);
    double step = 1.0;
    PlanarPoint trial;
    FoldSystem ts;
    bool decreased = false;
    for (int h = 0; h < 20; ++h, step *= 0.5) {
      trial = pt;
      trial.x += step * d[0];
      trial.y += step * d[1];
      trial.p += step * d[2];
      ts = fold_system(model, trial);
      if (norm(ts.residual) < r0) {
        decreased = true;
        break;
      }
    }
    const bool tiny = std::abs(d[0]) <= 1e-14 * (1.0 + std::abs(pt.x)) &&
                      std::abs(d[1]) <= 1e-14 * (1.0 + std::abs(pt.y)) &&
                      std::abs(d[2]) <= 1e-14 * (1.0 + std::abs(pt.p));
    if (!decreased) {
      if (tiny) break;
      throw ConvergenceError("damped Newton stalled on the fold system");
    }
    pt = trial;
    s = ts;
    if (tiny || (s.residual[0] == 0.0 && s.residual[1] == 0.0 && s.residual[2] == 0.0)) break;
    if (it == kMaxNewton - 1) throw ConvergenceError("fold system Newton did not converge");
  }
  if (!(std::abs(s.residual[0]) < 1e-10 && std::abs(s.residual[1]) < 1e-10 &&
        std::abs(s.residual[2]) < 1e-9)) {
    throw ConvergenceError("fold point residuals exceed tolerance");
  }
  return pt;
}

JordanizedSystem jordanize(const PlanarModel2P& model, const PlanarPoint& point) {
  const auto jac = model.jacobian(point);
  Eigen::Matrix2d A;
  A << jac[0], jac[1], jac[2], jac[3];
  const Eigen::EigenSolver<Eigen::Matrix2d> es(A);
  const auto ev = es.eigenvalues();
  if (ev[0].imag() != 0.0 || ev[1].imag() != 0.0) {
    throw GenericityError("complex eigenvalues: not a fold point");
  }
  const int zero = std::abs(ev[0].real()) <= std::abs(ev[1].real()) ? 0 : 1;
  const int other = 1 - zero;
  JordanizedSystem J;
  J.base = point;
  J.small_eigenvalue = ev[zero].real();
  J.lambda = ev[other].real();
  if (!(std::abs(J.lambda) > 1e-8)) throw GenericityError("both eigenvalues vanish (defective fold)");
  if (!(std::abs(J.small_eigenvalue) < 1e-8 * std::abs(J.lambda))) {
    throw GenericityError("no zero eigenvalue: not a fold point");
  }
  Eigen::Vector2d v0 = es.eigenvectors().col(zero).real();
  Eigen::Vector2d v1 = es.eigenvectors().col(other).real();
  normalise(v0);
  normalise(v1);
  Eigen::Matrix2d P;
  P.col(0) = v0;
  P.col(1) = v1;
  const Eigen::Matrix2d Pi = P.inverse();
  J.basis = {P(0, 0), P(0, 1), P(1, 0), P(1, 1)};
  J.inverse = {Pi(0, 0), Pi(0, 1), Pi(1, 0), Pi(1, 1)};

  // Transformed field as jets in two of (u, v, mu).
  auto transformed = [&](int first, int second) {
    constexpr int order = 3;
    std::array<Jet2, 3> w;  // u, v, mu
    for (int k = 0; k < 3; ++k) {
      if (k == first) {
        w[static_cast<std::size_t>(k)] = Jet2::variable0(order, 0.0);
      } else if (k == second) {
        w[static_cast<std::size_t>(k)] = Jet2::variable1(order, 0.0);
      } else {
        w[static_cast<std::size_t>(k)] = Jet2::constant(order, 0.0);
      }
    }
    const std::array<Jet2, 4> xypm = {point.x + P(0, 0) * w[0] + P(0, 1) * w[1],
                                      point.y + P(1, 0) * w[0] + P(1, 1) * w[1],
                                      point.p + w[2], Jet2::constant(order, point.m)};
    const auto fg = model.compose(xypm);
    return std::array<Jet2, 2>{Pi(0, 0) * fg[0] + Pi(0, 1) * fg[1],
                               Pi(1, 0) * fg[0] + Pi(1, 1) * fg[1]};
  };
  const auto uv = transformed(0, 1);
  const auto um = transformed(0, 2);
  const auto vm = transformed(1, 2);

  J.b = {um[0].coeff(0, 1), uv[0].coeff(2, 0), uv[0].coeff(1, 1), uv[0].coeff(0, 2),
         um[0].coeff(1, 1), vm[0].coeff(1, 1), um[0].coeff(0, 2), uv[0].coeff(3, 0)};
  J.c = {0.0,               uv[1].coeff(2, 0), uv[1].coeff(1, 1), uv[1].coeff(0, 2),
         um[1].coeff(1, 1), vm[1].coeff(1, 1), um[1].coeff(0, 2), uv[1].coeff(3, 0)};

  const double tol = 1e-9 * std::max(1.0, std::abs(J.lambda));
  if (!(std::abs(uv[0].coeff(1, 0)) < tol && std::abs(uv[0].coeff(0, 1)) < tol &&
        std::abs(uv[1].coeff(1, 0)) < tol && std::abs(uv[1].coeff(0, 1) - J.lambda) < tol)) {
    throw NumericalError("transformed Jacobian is not diag(0, lambda)");
  }
  return J;
}

CmReduction cm_reduce(const JordanizedSystem& J) {
  const auto& b = J.b;
  const auto& c = J.c;
  if (!(std::abs(b[1]) > kGenericityTol) || !(std::abs(b[0]) > kGenericityTol)) {
    throw GenericityError("reduced equation is degenerate (|b0| or |b1| too small): cusp suspected");
  }
  const double d1 = -c[1] / J.lambda;
  const double cubic = b[7] - b[2] * c[1] / J.lambda;
  ScalarModel1P reduced("centre_manifold", "u", "mu",
                        {{"b0", b[0]}, {"b1", b[1]}, {"b4", b[4]}, {"b6", b[6]}, {"k3", cubic}},
                        "b0*mu + b1*u^2 + b4*mu*u + b6*mu^2 + k3*u^3");
  reduced.fold_guess = std::pair{0.0, 0.0};
  return CmReduction{J.lambda, d1,   cubic, b[0], b[1], b[4], b[6], std::abs(b[0] * b[1]),
                     cubic / (b[1] * b[1]), std::move(reduced)};
}

double a0_from_planar_derivatives(double F_xx, double F_xxx, double F_xy, double G_xx,
                                  double lambda) {
  return (2.0 * F_xxx - 6.0 * F_xy * G_xx / lambda) / (3.0 * F_xx * F_xx);
}

}  // namespace sntk
