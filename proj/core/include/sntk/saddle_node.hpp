#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "sntk/model.hpp"

namespace sntk {

/// |f_mu| and |f_xx| must exceed this (model units) for a fold to count as generic.
inline constexpr double kGenericityTol = 1e-8;

struct StationaryPoint {
  double x = 0.0;
  double mu = 0.0;
  double multiplier = 0.0;  // f_x(x, mu)
  double residual = 0.0;    // f(x, mu)
};

/// Speed coefficient (squared) and Takens' coefficient of a fold.
struct TakensNumbers {
  double p0sq = 0.0;  // |f_mu f_xx| / 2
  double a0 = 0.0;    // 2 f_xxx / (3 f_xx^2)
};

struct SaddleNodePoint {
  double x = 0.0;
  double mu = 0.0;
  DerivativeBundle bundle;
  /// NaN unless generic.
  double p0sq = 0.0;
  double a0 = 0.0;
  int sign_fmu = 0;
  int sign_fxx = 0;
  bool generic = false;
  /// |f_xx| below tolerance: the fold is close to a cusp.
  bool cusp_suspect = false;
  int iterations = 0;
};

/// Sign bookkeeping that maps a fold onto the orientation f_mu > 0, f_xx < 0.
///
/// With X = s (x - x*) and mu - mu* = s_mu M the field s f(x*+sX, mu*+s_mu M)
/// has F_M > 0 and F_XX < 0. Multipliers are unchanged by this recoding, so
/// equilibria can be paired by the sign of f_x. The two-equilibria side is
/// M > 0, i.e. mu = mu* + s_mu M.
struct FoldOrientation {
  int state_sign = 1;  // s = -sign(f_xx)
  int param_sign = 1;  // s_mu = s sign(f_mu)
};

FoldOrientation fold_orientation(const DerivativeBundle& bundle);

/// Model parameter at fold-local distance mu_local (positive: two equilibria).
double fold_parameter(const SaddleNodePoint& sn, double mu_local);

/// Newton on f(., mu) with damping; falls back to bisection on `bracket`
/// (which must straddle a sign change) when Newton fails or f_x vanishes.
StationaryPoint find_stationary(const ScalarModel1P& model, double mu, double x_guess,
                                std::optional<std::pair<double, double>> bracket = std::nullopt);

/// All roots of f(., mu) in [lo, hi] detected by sign changes on a uniform scan.
std::vector<StationaryPoint> find_all_stationary(const ScalarModel1P& model, double mu, double lo,
                                                 double hi, int samples = 400);

/// 2x2 damped Newton on (f, f_x) = 0 in (x, mu).
SaddleNodePoint locate_saddle_node(const ScalarModel1P& model, double x_guess, double mu_guess);

/// Throws GenericityError when |f_mu| or |f_xx| <= kGenericityTol.
TakensNumbers takens_numbers(const DerivativeBundle& bundle);

struct AsymptoticPrediction {
  double m = 0.0;   // sqrt of the distance into the two-equilibria side
  double mu = 0.0;  // model parameter value mu* + s_mu m^2
  /// Entry 0: the repelling equilibrium (multiplier > 0); entry 1: the attracting one.
  std::array<double, 2> x{};
  std::array<double, 2> multiplier{};
  /// mu - mu* ~ locus_coefficient (x - x*)^2 along the stationary branch.
  double locus_coefficient = 0.0;
};

/// Second-order expansions of the two equilibria and their multipliers at
/// distance m^2 past the fold. Throws GenericityError for non-generic folds.
AsymptoticPrediction asymptotic_predictions(const SaddleNodePoint& sn, double m);

/// The two equilibria at fold-local mu_local > 0: entry 0 repelling, entry 1
/// attracting. Each is bracketed by scanning outward from the fold point.
std::array<StationaryPoint, 2> fold_equilibria(const ScalarModel1P& model,
                                               const SaddleNodePoint& sn, double mu_local);

}  // namespace sntk
