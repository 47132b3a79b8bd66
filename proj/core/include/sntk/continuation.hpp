#pragma once

#include <string>
#include <vector>

#include "sntk/centre_manifold.hpp"
#include "sntk/model.hpp"

namespace sntk {

struct BranchPoint {
  double m = 0.0;
  double p = 0.0;
  double x = 0.0;
  /// NaN on branches of scalar models, whose single state is stored in x.
  double y = 0.0;
  double lambda = 0.0;  // NaN for scalar models
  double p0sq = 0.0;
  double a0 = 0.0;
  double step = 0.0;
  int iterations = 0;
};

enum class Termination { range_end, cusp_suspect, step_failure };

const char* to_string(Termination t) noexcept;

struct Branch {
  std::vector<BranchPoint> points;
  Termination termination = Termination::range_end;
  std::string message;
};

struct ContinuationOptions {
  double m_min = 3.2;
  double m_max = 12.0;
  /// +1 continues towards m_max, -1 towards m_min.
  int direction = 1;
  double step_min = 1e-4;
  double step_max = 0.2;
  double step_initial = 0.05;
  int max_points = 20000;
  /// Newton iterations counted as an easy step.
  int easy_iterations = 3;
  /// |b0| or |b1| below this ends the branch as cusp-suspect, as does a
  /// step on which m turns back.
  double cusp_tol = 1e-8;
};

/// Polishes `at` at fixed m and fills lambda, p0sq and a0 from the centre
/// manifold reduction.
BranchPoint make_branch_point(const PlanarModel2P& model, const PlanarPoint& at);

/// Pseudo-arclength continuation of (F, G, det J) = 0 in (x, y, p, m):
/// secant predictor, Newton corrector, adaptive arclength step.
Branch continue_branch(const PlanarModel2P& model, const BranchPoint& start,
                       const ContinuationOptions& options = {});

struct StommelLocus {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double y_plus = 0.0;
  double y_minus = 0.0;
};

/// Folds of the alpha -> infinity limit, p - y(1 + m(1-y)^2) = 0. Throws
/// InputError for m <= 3.
StommelLocus analytic_locus_stommel(double m);

enum class FoldBranch { plus, minus };

/// Fold of the planar model near the analytic (y_+-, p_+-) at secondary
/// value m, reached by a homotopy in the constant `alpha` from 1e5 (or the
/// target, if larger) down to the model's alpha, halving each time.
BranchPoint seed_stommel_fold(const PlanarModel2P& model, double m, FoldBranch which);

/// Folds of a scalar model as one constant varies over `values`, each
/// located from the previous one. The state is stored in BranchPoint::x and
/// the constant in BranchPoint::m.
Branch scalar_fold_branch(const ScalarModel1P& model, const std::string& constant,
                          const std::vector<double>& values, double x_guess, double mu_guess);

struct BranchNumbers {
  double m = 0.0;
  double p = 0.0;
  double p0sq = 0.0;
  double inv_a0 = 0.0;
};

std::vector<BranchNumbers> branch_numbers(const Branch& branch);

}  // namespace sntk
