#pragma once

#include <array>

#include "sntk/model.hpp"

namespace sntk {

/// Residual (F, G, det J) of the fold conditions and its Jacobian with
/// respect to (x, y, p, m), row-major 3x4.
struct FoldSystem {
  std::array<double, 3> residual{};
  std::array<double, 12> jacobian{};
};

FoldSystem fold_system(const PlanarModel2P& model, const PlanarPoint& at);

/// Damped Newton on (F, G, det J) = 0 in (x, y, p) with m frozen. Throws
/// ConvergenceError unless |F|, |G| < 1e-10 and |det J| < 1e-9 at the end.
PlanarPoint polish_fold_point(const PlanarModel2P& model, PlanarPoint guess);

/// The planar field in eigen-coordinates (u, v) about a fold, with
/// mu = p - p*:  u' = b0 mu + b1 u^2 + b2 u v + b3 v^2 + b4 mu u + b5 mu v + b6 mu^2 + b7 u^3 + ...
///               v' = lambda v + c1 u^2 + c2 u v + c3 v^2 + c4 mu u + c5 mu v + c6 mu^2 + c7 u^3 + ...
struct JordanizedSystem {
  PlanarPoint base;
  double lambda = 0.0;
  /// The eigenvalue taken as zero.
  double small_eigenvalue = 0.0;
  /// Columns: null vector, lambda-eigenvector; row-major 2x2.
  std::array<double, 4> basis{};
  std::array<double, 4> inverse{};
  /// Index 0..7; c[0] is unused and zero.
  std::array<double, 8> b{};
  std::array<double, 8> c{};
};

/// Eigenvectors are unit length with positive first component (second, if
/// the first vanishes). Throws GenericityError when no eigenvalue is within
/// 1e-8 |lambda| of zero, or when |lambda| <= 1e-8.
JordanizedSystem jordanize(const PlanarModel2P& model, const PlanarPoint& point);

struct CmReduction {
  double lambda = 0.0;
  double d1 = 0.0;     // manifold curvature: v = d1 u^2 + ...
  double cubic = 0.0;  // b7 - b2 c1 / lambda
  double b0 = 0.0;
  double b1 = 0.0;
  double b4 = 0.0;
  double b6 = 0.0;
  double p0sq = 0.0;   // |b0 b1|
  double a0 = 0.0;     // cubic / b1^2
  /// u' = b0 mu + b1 u^2 + b4 mu u + b6 mu^2 + cubic u^3, fold at (0, 0).
  ScalarModel1P reduced;
};

/// Throws GenericityError when |b0| or |b1| <= kGenericityTol.
CmReduction cm_reduce(const JordanizedSystem& J);

/// a0 written with derivatives of the Jordanised F, G:
/// (2 F_xxx - 6 F_xy G_xx / lambda) / (3 F_xx^2).
double a0_from_planar_derivatives(double F_xx, double F_xxx, double F_xy, double G_xx,
                                  double lambda);

}  // namespace sntk
