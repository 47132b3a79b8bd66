#include "sntk/saddle_node.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sntk/error.hpp"

namespace sntk {

namespace {

constexpr int kMaxNewton = 50;
constexpr int kMaxHalvings = 20;
constexpr double kStationaryTol = 1e-12;

int sign(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

StationaryPoint make_point(const ScalarModel1P& model, double x, double mu) {
  const Jet2 j = model.jet(x, mu, 1);
  return {x, mu, j.coeff(1, 0), j.coeff(0, 0)};
}

// Roundoff scale of f near x: |f| cannot be resolved below this.
double residual_floor(const ScalarModel1P& model, double x, double mu, double fx) {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::max(kStationaryTol, 64.0 * eps * (std::abs(fx) * std::max(1.0, std::abs(x)) +
                                                std::abs(model(x, mu))));
}

std::optional<StationaryPoint> newton(const ScalarModel1P& model, double mu, double x) {
  double f = model(x, mu);
  for (int it = 0; it < kMaxNewton; ++it) {
    if (std::abs(f) < kStationaryTol) return make_point(model, x, mu);
    const Jet2 j = model.jet(x, mu, 1);
    const double fx = j.coeff(1, 0);
    if (fx == 0.0 || !std::isfinite(fx)) return std::nullopt;
    const double dx = -f / fx;
    double step = 1.0;
    double x_new = x + dx;
    double f_new = model(x_new, mu);
    for (int h = 0; h < kMaxHalvings && !(std::abs(f_new) < std::abs(f)); ++h) {
      step *= 0.5;
      x_new = x + step * dx;
      f_new = model(x_new, mu);
    }
    if (!std::isfinite(f_new)) return std::nullopt;
    if (!(std::abs(f_new) < std::abs(f))) {
      // No decrease at all: either converged to roundoff or stuck.
      if (std::abs(dx) <= 1e-14 * std::max(1.0, std::abs(x)) &&
          std::abs(f) <= residual_floor(model, x, mu, fx)) {
        return make_point(model, x, mu);
      }
      return std::nullopt;
    }
    x = x_new;
    f = f_new;
    if (std::abs(step * dx) <= 1e-15 * std::max(1.0, std::abs(x)) &&
        std::abs(f) <= residual_floor(model, x, mu, fx)) {
      return make_point(model, x, mu);
    }
  }
  return std::nullopt;
}

StationaryPoint bisect(const ScalarModel1P& model, double mu, double lo, double hi) {
  double flo = model(lo, mu);
  double fhi = model(hi, mu);
  if (flo == 0.0) return make_point(model, lo, mu);
  if (fhi == 0.0) return make_point(model, hi, mu);
  if ((flo > 0.0) == (fhi > 0.0)) throw ConvergenceError("bracket does not straddle a root");
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() *
                                             std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = model(mid, mu);
    if (fm == 0.0) return make_point(model, mid, mu);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double x = std::abs(flo) < std::abs(model(hi, mu)) ? lo : hi;
  if (auto polished = newton(model, mu, x)) {
    if (polished->x >= lo - 1e-12 && polished->x <= hi + 1e-12) return *polished;
  }
  return make_point(model, x, mu);
}

}  // namespace

FoldOrientation fold_orientation(const DerivativeBundle& b) {
  FoldOrientation o;
  o.state_sign = b.f_xx > 0.0 ? -1 : 1;
  o.param_sign = o.state_sign * (b.f_mu < 0.0 ? -1 : 1);
  return o;
}

double fold_parameter(const SaddleNodePoint& sn, double mu_local) {
  return sn.mu + fold_orientation(sn.bundle).param_sign * mu_local;
}

StationaryPoint find_stationary(const ScalarModel1P& model, double mu, double x_guess,
                                std::optional<std::pair<double, double>> bracket) {
  if (auto p = newton(model, mu, x_guess)) {
    if (!bracket || (p->x >= bracket->first && p->x <= bracket->second)) return *p;
  }
  if (bracket) return bisect(model, mu, bracket->first, bracket->second);
  throw ConvergenceError("Newton iteration for a stationary point did not converge");
}

std::vector<StationaryPoint> find_all_stationary(const ScalarModel1P& model, double mu, double lo,
                                                 double hi, int samples) {
  if (!(hi > lo) || samples < 2) throw std::invalid_argument("invalid scan interval");
  std::vector<StationaryPoint> roots;
  double x_prev = lo;
  double f_prev = model(lo, mu);
  for (int i = 1; i <= samples; ++i) {
    const double x = lo + (hi - lo) * i / samples;
    const double f = model(x, mu);
    if (f_prev == 0.0) {
      roots.push_back(make_point(model, x_prev, mu));
    } else if (f != 0.0 && (f > 0.0) != (f_prev > 0.0) && std::isfinite(f) && std::isfinite(f_prev)) {
      roots.push_back(bisect(model, mu, x_prev, x));
    }
    x_prev = x;
    f_prev = f;
  }
  if (f_prev == 0.0) roots.push_back(make_point(model, x_prev, mu));
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  return roots;
}

TakensNumbers takens_numbers(const DerivativeBundle& b) {
  if (!(std::abs(b.f_mu) > kGenericityTol)) {
    throw GenericityError("fold is not transversal in the parameter (|f_mu| too small)");
  }
  if (!(std::abs(b.f_xx) > kGenericityTol)) {
    throw GenericityError("fold is degenerate (|f_xx| too small): cusp suspected");
  }
  return {0.5 * std::abs(b.f_mu * b.f_xx), 2.0 * b.f_xxx / (3.0 * b.f_xx * b.f_xx)};
}

SaddleNodePoint locate_saddle_node(const ScalarModel1P& model, double x_guess, double mu_guess) {
  double x = x_guess;
  double mu = mu_guess;
  auto residual = [&](double xv, double muv) {
    const Jet2 j = model.jet(xv, muv, 2);
    return std::array<double, 2>{j.coeff(0, 0), j.coeff(1, 0)};
  };
  auto norm = [](const std::array<double, 2>& r) { return std::hypot(r[0], r[1]); };

  int it = 0;
  bool converged = false;
  for (; it < kMaxNewton; ++it) {
    const Jet2 j = model.jet(x, mu, 2);
    const double f = j.partial(0, 0);
    const double fx = j.partial(1, 0);
    const double fmu = j.partial(0, 1);
    const double fxx = j.partial(2, 0);
    const double fxmu = j.partial(1, 1);
    if (!std::isfinite(f) || !std::isfinite(fx)) throw ConvergenceError("non-finite residual");
    // [fx fmu; fxx fxmu] [dx dmu] = -[f fx]
    const double det = fx * fxmu - fmu * fxx;
    if (det == 0.0 || !std::isfinite(det)) {
      throw ConvergenceError("singular Jacobian while locating a saddle-node (cusp suspected)");
    }
    const double dx = -(f * fxmu - fmu * fx) / det;
    const double dmu = -(fx * fx - f * fxx) / det;

    const double r0 = std::hypot(f, fx);
    double step = 1.0;
    std::array<double, 2> r_new = residual(x + dx, mu + dmu);
    for (int h = 0; h < kMaxHalvings && !(norm(r_new) < r0); ++h) {
      step *= 0.5;
      r_new = residual(x + step * dx, mu + step * dmu);
    }
    const bool tiny = std::abs(dx) <= 1e-14 * std::max(1.0, std::abs(x)) &&
                      std::abs(dmu) <= 1e-14 * std::max(1.0, std::abs(mu));
    if (!(norm(r_new) < r0)) {
      if (tiny) {
        converged = true;
        break;
      }
      throw ConvergenceError("damped Newton stalled while locating a saddle-node");
    }
    x += step * dx;
    mu += step * dmu;
    if (tiny || (r_new[0] == 0.0 && r_new[1] == 0.0)) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) throw ConvergenceError("saddle-node Newton did not converge in 50 iterations");

  SaddleNodePoint sn;
  sn.x = x;
  sn.mu = mu;
  sn.iterations = it;
  sn.bundle = model.derivative_bundle(x, mu);
  if (!(std::abs(sn.bundle.f) < 1e-10) || !(std::abs(sn.bundle.f_x) < 1e-10)) {
    throw ConvergenceError("saddle-node residuals exceed 1e-10");
  }
  sn.sign_fmu = sign(sn.bundle.f_mu);
  sn.sign_fxx = sign(sn.bundle.f_xx);
  sn.cusp_suspect = !(std::abs(sn.bundle.f_xx) > kGenericityTol);
  sn.generic = std::abs(sn.bundle.f_mu) > kGenericityTol && !sn.cusp_suspect;
  if (sn.generic) {
    const TakensNumbers t = takens_numbers(sn.bundle);
    sn.p0sq = t.p0sq;
    sn.a0 = t.a0;
  } else {
    sn.p0sq = std::numeric_limits<double>::quiet_NaN();
    sn.a0 = std::numeric_limits<double>::quiet_NaN();
  }
  return sn;
}

AsymptoticPrediction asymptotic_predictions(const SaddleNodePoint& sn, double m) {
  const DerivativeBundle& b = sn.bundle;
  takens_numbers(b);  // genericity check
  if (!(m >= 0.0)) throw std::invalid_argument("m must be non-negative");
  const FoldOrientation o = fold_orientation(b);
  const double s = o.state_sign;
  // Derivatives in the normalised orientation.
  const double Fm = std::abs(b.f_mu);
  const double Fxx = -std::abs(b.f_xx);
  const double Fxxx = b.f_xxx;
  const double Fxm = o.param_sign * b.f_xmu;

  const double lead = std::sqrt(-2.0 * Fm / Fxx);
  const double second = (Fm * Fxxx - 3.0 * Fxm * Fxx) / (3.0 * Fxx * Fxx);
  const double mult_lead = std::sqrt(-2.0 * Fm * Fxx);
  const double mult_second = -(2.0 / 3.0) * Fm * Fxxx / Fxx;

  AsymptoticPrediction p;
  p.m = m;
  p.mu = sn.mu + o.param_sign * m * m;
  for (int r = 1; r <= 2; ++r) {
    const double sgn = (r % 2) ? -1.0 : 1.0;  // (-1)^r
    const double X = sgn * lead * m + second * m * m;
    p.x[static_cast<std::size_t>(r - 1)] = sn.x + s * X;
    p.multiplier[static_cast<std::size_t>(r - 1)] = -sgn * mult_lead * m + mult_second * m * m;
  }
  p.locus_coefficient = -b.f_xx / (2.0 * b.f_mu);
  return p;
}

std::array<StationaryPoint, 2> fold_equilibria(const ScalarModel1P& model,
                                               const SaddleNodePoint& sn, double mu_local) {
  if (!(mu_local > 0.0)) throw std::invalid_argument("fold equilibria need mu_local > 0");
  const AsymptoticPrediction pred = asymptotic_predictions(sn, std::sqrt(mu_local));
  const double s = fold_orientation(sn.bundle).state_sign;
  const double mu = pred.mu;
  const double f0 = model(sn.x, mu);
  const double delta = 0.25 * std::abs(pred.x[1] - pred.x[0]);

  std::array<StationaryPoint, 2> out;
  for (int r = 0; r < 2; ++r) {
    // r = 0 lies on the X < 0 side, i.e. at x* - s t.
    const double dir = r == 0 ? -s : s;
    std::optional<std::pair<double, double>> bracket;
    if ((f0 > 0.0) == (s > 0.0) && f0 != 0.0 && delta > 0.0) {
      double t_prev = 0.0;
      double t = delta;
      for (int k = 0; k < 60; ++k, t_prev = t, t *= 2.0) {
        const double fv = model(sn.x + dir * t, mu);
        if (!std::isfinite(fv)) break;
        if ((fv > 0.0) != (f0 > 0.0)) {
          const double a = sn.x + dir * t_prev;
          const double b = sn.x + dir * t;
          bracket = std::make_pair(std::min(a, b), std::max(a, b));
          break;
        }
      }
    }
    out[static_cast<std::size_t>(r)] =
        find_stationary(model, mu, pred.x[static_cast<std::size_t>(r)], bracket);
  }
  if (!(out[0].multiplier > 0.0) || !(out[1].multiplier < 0.0) || out[0].x == out[1].x) {
    throw ConvergenceError("could not resolve the equilibrium pair near the fold");
  }
  return out;
}

}  // namespace sntk
