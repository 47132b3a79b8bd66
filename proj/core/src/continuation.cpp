#include "sntk/continuation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "sntk/error.hpp"
#include "sntk/saddle_node.hpp"

namespace sntk {

namespace {

using Vec4 = Eigen::Vector4d;

constexpr int kMaxCorrector = 10;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec4 to_vec(const PlanarPoint& p) { return {p.x, p.y, p.p, p.m}; }
PlanarPoint to_point(const Vec4& u) { return {u[0], u[1], u[2], u[3]}; }

bool invariants_hold(const std::array<double, 3>& r) {
  return std::abs(r[0]) < 1e-10 && std::abs(r[1]) < 1e-10 && std::abs(r[2]) < 1e-9;
}

Eigen::Matrix<double, 3, 4> jacobian_of(const FoldSystem& s) {
  Eigen::Matrix<double, 3, 4> J;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) J(r, c) = s.jacobian[static_cast<std::size_t>(4 * r + c)];
  }
  return J;
}

// Unit null vector of J, oriented to have positive projection on `orient`.
Vec4 tangent(const Eigen::Matrix<double, 3, 4>& J, const Vec4& orient) {
  Eigen::Matrix4d A;
  A.topRows<3>() = J;
  A.row(3) = orient.transpose();
  const Vec4 rhs(0.0, 0.0, 0.0, 1.0);
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
  if (!lu.isInvertible()) throw ConvergenceError("tangent of the fold curve is undefined");
  Vec4 t = lu.solve(rhs);
  t.normalize();
  if (t.dot(orient) < 0.0) t = -t;
  return t;
}

struct Corrected {
  Vec4 u;
  int iterations;
};

std::optional<Corrected> correct(const PlanarModel2P& model, Vec4 u, const Vec4& u_pred,
                                 const Vec4& t) {
  for (int it = 1; it <= kMaxCorrector; ++it) {
    const FoldSystem s = fold_system(model, to_point(u));
    Eigen::Matrix4d A;
    A.topRows<3>() = jacobian_of(s);
    A.row(3) = t.transpose();
    const Vec4 rhs(-s.residual[0], -s.residual[1], -s.residual[2], -t.dot(u - u_pred));
    const Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
    if (!lu.isInvertible()) return std::nullopt;
    const Vec4 d = lu.solve(rhs);
    if (!d.allFinite()) return std::nullopt;
    u += d;
    if (d.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + u.lpNorm<Eigen::Infinity>())) {
      if (invariants_hold(fold_system(model, to_point(u)).residual)) return Corrected{u, it};
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::range_end:
      return "range-end";
    case Termination::cusp_suspect:
      return "cusp-suspect";
    case Termination::step_failure:
      return "step-failure";
  }
  return "unknown";
}

BranchPoint make_branch_point(const PlanarModel2P& model, const PlanarPoint& at) {
  const PlanarPoint pt = polish_fold_point(model, at);
  const JordanizedSystem J = jordanize(model, pt);
  const CmReduction R = cm_reduce(J);
  BranchPoint bp;
  bp.m = pt.m;
  bp.p = pt.p;
  bp.x = pt.x;
  bp.y = pt.y;
  bp.lambda = R.lambda;
  bp.p0sq = R.p0sq;
  bp.a0 = R.a0;
  return bp;
}

Branch continue_branch(const PlanarModel2P& model, const BranchPoint& start,
                       const ContinuationOptions& o) {
  if (o.direction != 1 && o.direction != -1) throw std::invalid_argument("direction must be +-1");
  if (!(o.m_min < o.m_max) || start.m < o.m_min || start.m > o.m_max) {
    throw std::invalid_argument("start point outside the continuation range");
  }
  if (!(o.step_min > 0.0 && o.step_min <= o.step_initial && o.step_initial <= o.step_max)) {
    throw std::invalid_argument("inconsistent step controls");
  }
  const double bound = o.direction > 0 ? o.m_max : o.m_min;
  Branch branch;

  auto accept = [&](const PlanarPoint& pt, double step, int iterations) -> bool {
    try {
      const PlanarPoint polished = polish_fold_point(model, pt);
      const JordanizedSystem J = jordanize(model, polished);
      if (std::abs(J.b[0]) < o.cusp_tol || std::abs(J.b[1]) < o.cusp_tol) {
        branch.termination = Termination::cusp_suspect;
        branch.message = "|b0| or |b1| below tolerance near m = " + std::to_string(polished.m);
        return false;
      }
      const CmReduction R = cm_reduce(J);
      branch.points.push_back({polished.m, polished.p, polished.x, polished.y, R.lambda, R.p0sq,
                               R.a0, step, iterations});
      return true;
    } catch (const GenericityError& e) {
      branch.termination = Termination::cusp_suspect;
      branch.message = e.what();
    } catch (const NumericalError& e) {
      branch.termination = Termination::step_failure;
      branch.message = e.what();
    }
    return false;
  };

  if (!accept({start.x, start.y, start.p, start.m}, 0.0, 0)) return branch;

  Vec4 u = to_vec({branch.points.back().x, branch.points.back().y, branch.points.back().p,
                   branch.points.back().m});
  Vec4 orient(0.0, 0.0, 0.0, static_cast<double>(o.direction));
  Vec4 t = tangent(jacobian_of(fold_system(model, to_point(u))), orient);
  std::optional<Vec4> previous;
  double h = o.step_initial;
  int easy = 0;

  while (static_cast<int>(branch.points.size()) < o.max_points) {
    if (u[3] == bound) {
      branch.termination = Termination::range_end;
      return branch;
    }
    Vec4 dir = t;
    if (previous) {
      dir = (u - *previous).normalized();
    }
    const Vec4 u_pred = u + h * dir;
    std::optional<Corrected> c = correct(model, u_pred, u_pred, dir);
    if (c && (c->u - u).norm() > 2.0 * h) c.reset();
    if (!c) {
      h *= 0.5;
      easy = 0;
      if (h < o.step_min) {
        branch.termination = Termination::step_failure;
        branch.message = "corrector failed at the minimum step near m = " + std::to_string(u[3]);
        return branch;
      }
      continue;
    }

    if ((c->u[3] - u[3]) * o.direction <= 0.0) {
      // A fold curve turns back in m only at a cusp.
      branch.termination = Termination::cusp_suspect;
      branch.message = "branch turns back in m near m = " + std::to_string(u[3]);
      return branch;
    }
    const bool crosses = (c->u[3] - bound) * o.direction >= 0.0;
    if (crosses) {
      // Land exactly on the range end.
      const double s = (bound - u[3]) / (c->u[3] - u[3]);
      Vec4 guess = u + s * (c->u - u);
      guess[3] = bound;
      if (!accept(to_point(guess), h, c->iterations)) return branch;
      branch.termination = Termination::range_end;
      return branch;
    }
    if (!accept(to_point(c->u), h, c->iterations)) return branch;

    previous = u;
    u = to_vec({branch.points.back().x, branch.points.back().y, branch.points.back().p,
                branch.points.back().m});
    t = tangent(jacobian_of(fold_system(model, to_point(u))), dir);
    if (c->iterations <= o.easy_iterations) {
      if (++easy >= 4) {
        h = std::min(o.step_max, 2.0 * h);
        easy = 0;
      }
    } else {
      easy = 0;
    }
  }
  branch.termination = Termination::step_failure;
  branch.message = "maximum number of points reached";
  return branch;
}

StommelLocus analytic_locus_stommel(double m) {
  if (!(m > 3.0)) throw InputError("the fold locus exists only for m > 3");
  const double r = std::sqrt(1.0 - 3.0 / m);
  StommelLocus L;
  L.y_plus = (2.0 + r) / 3.0;
  L.y_minus = (2.0 - r) / 3.0;
  L.p_plus = 2.0 / 3.0 + (2.0 * m / 27.0) * (1.0 - r * r * r);
  L.p_minus = 2.0 / 3.0 + (2.0 * m / 27.0) * (1.0 + r * r * r);
  return L;
}

BranchPoint seed_stommel_fold(const PlanarModel2P& model, double m, FoldBranch which) {
  const double target = model.constant("alpha");
  if (!(target > 0.0)) throw InputError("alpha must be positive");
  const StommelLocus L = analytic_locus_stommel(m);
  PlanarPoint pt{1.0, which == FoldBranch::plus ? L.y_plus : L.y_minus,
                 which == FoldBranch::plus ? L.p_plus : L.p_minus, m};
  double alpha = std::max(1e5, target);
  for (;;) {
    pt = polish_fold_point(model.with_constant("alpha", alpha), pt);
    if (alpha == target) break;
    alpha = std::max(target, 0.5 * alpha);
  }
  return make_branch_point(model, pt);
}

Branch scalar_fold_branch(const ScalarModel1P& model, const std::string& constant,
                          const std::vector<double>& values, double x_guess, double mu_guess) {
  Branch branch;
  double x = x_guess;
  double mu = mu_guess;
  for (double v : values) {
    try {
      const SaddleNodePoint sn = locate_saddle_node(model.with_constant(constant, v), x, mu);
      if (!sn.generic) {
        branch.termination = Termination::cusp_suspect;
        branch.message = "non-generic fold at " + constant + " = " + std::to_string(v);
        return branch;
      }
      branch.points.push_back({v, sn.mu, sn.x, kNaN, kNaN, sn.p0sq, sn.a0, 0.0, sn.iterations});
      x = sn.x;
      mu = sn.mu;
    } catch (const GenericityError& e) {
      branch.termination = Termination::cusp_suspect;
      branch.message = e.what();
      return branch;
    } catch (const NumericalError& e) {
      branch.termination = Termination::step_failure;
      branch.message = e.what();
      return branch;
    }
  }
  branch.termination = Termination::range_end;
  return branch;
}

std::vector<BranchNumbers> branch_numbers(const Branch& branch) {
  std::vector<BranchNumbers> rows;
  rows.reserve(branch.points.size());
  for (const BranchPoint& p : branch.points) rows.push_back({p.m, p.p, p.p0sq, 1.0 / p.a0});
  return rows;
}

}  // namespace sntk
