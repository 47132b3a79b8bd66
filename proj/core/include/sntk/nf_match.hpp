#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "sntk/flow.hpp"
#include "sntk/model.hpp"
#include "sntk/saddle_node.hpp"

namespace sntk {

/// Equilibria of g(y) = nu - y^2 + a y^3 continuing from -sqrt(nu) and +sqrt(nu).
struct NfEquilibria {
  std::array<double, 2> y{};
  std::array<double, 2> multiplier{};  // g'(y) = -2y + 3ay^2
};

/// Throws ConvergenceError when nu <= 0 or a root leaves |a y| < 1/3.
NfEquilibria nf_equilibria(double nu, double a);

/// Normal-form parameters whose equilibria carry the model's multipliers.
/// mu is fold-local: the model parameter is fold_parameter(sn, mu).
struct MatchedParams {
  double mu = 0.0;
  double nu = 0.0;
  double a = 0.0;
  double residual1 = 0.0;  // f'(x_1) - g'(y_1)
  double residual2 = 0.0;
  int iterations = 0;
  std::array<double, 2> x{};
  std::array<double, 2> y{};
  std::array<double, 2> multiplier{};
};

struct NormalFormCurve {
  double p0sq = 0.0;
  double a0 = 0.0;
  std::vector<MatchedParams> samples;  // sorted by mu
};

inline constexpr double kMatchTol = 1e-10;

/// Newton on (nu, a) with residuals G_1/m and (G_1 + G_2)/m^2, m = sqrt(mu),
/// seeded at (p0^2 mu, a0).
MatchedParams match_multipliers(const ScalarModel1P& model, const SaddleNodePoint& sn, double mu);

/// Independent solves over mus (any order); jobs > 1 runs them on threads.
NormalFormCurve match_curve(const ScalarModel1P& model, const SaddleNodePoint& sn,
                            std::vector<double> mus, int jobs = 1);

/// Largest mu_start 2^-k (k < max_halvings) at which the match converges and
/// both equilibria lie inside interval (if given); 0 when none does.
double validity_radius(const ScalarModel1P& model, const SaddleNodePoint& sn, double mu_start = 1.0,
                       std::optional<std::pair<double, double>> interval = std::nullopt,
                       int max_halvings = 40);

struct NegativeMatch {
  double mu = 0.0;
  double nu = 0.0;
  double a = 0.0;
  double time_model = 0.0;  // transit time across U
  double time_nf = 0.0;     // transit time across V at nu
  std::pair<double, double> U;
  std::pair<double, double> V;
  int iterations = 0;
};

/// Default V: radius 2 sqrt(p0^2 |mu|) about 0. Default U: V pulled back to
/// model coordinates by the quadratic scaling, i.e. radius R_V / (|f_xx|/2)
/// about x*.
std::pair<std::pair<double, double>, std::pair<double, double>> default_transit_intervals(
    const SaddleNodePoint& sn, double mu);

/// nu < 0 (with a = a0) such that the normal form crosses V in the time the
/// model needs to cross U. Secant-type solve in log(-nu).
NegativeMatch negative_mu_match(const ScalarModel1P& model, const SaddleNodePoint& sn, double mu,
                                std::optional<std::pair<double, double>> U = std::nullopt,
                                std::optional<std::pair<double, double>> V = std::nullopt);

/// g(y) = nu - y^2 + a y^3 as a model with state y, parameter nu and constant a.
ScalarModel1P normal_form_model(double a);

}  // namespace sntk
