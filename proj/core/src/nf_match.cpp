#include "sntk/nf_match.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "sntk/error.hpp"

namespace sntk {

namespace {

constexpr int kMaxIterations = 50;

double g_value(double y, double nu, double a) { return nu - y * y + a * y * y * y; }
double g_prime(double y, double a) { return -2.0 * y + 3.0 * a * y * y; }
double g_second(double y, double a) { return -2.0 + 6.0 * a * y; }

// Newton safeguarded by the bracket [lo, hi] on which g changes sign.
double bracketed_root(double nu, double a, double lo, double hi, double x) {
  double glo = g_value(lo, nu, a);
  for (int it = 0; it < 200; ++it) {
    const double gx = g_value(x, nu, a);
    if (gx == 0.0) return x;
    if ((gx > 0.0) == (glo > 0.0)) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
    }
    const double d = g_prime(x, a);
    double next = d != 0.0 ? x - gx / d : 0.5 * (lo + hi);
    if (!(next > std::min(lo, hi) && next < std::max(lo, hi))) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x) ||
        std::abs(hi - lo) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      return next;
    }
    x = next;
  }
  return x;
}

struct MatchState {
  NfEquilibria eq;
  std::array<double, 2> G{};
  std::array<double, 2> F{};
};

MatchState evaluate(double nu, double a, const std::array<double, 2>& fmult, double m) {
  MatchState s;
  s.eq = nf_equilibria(nu, a);
  for (std::size_t r = 0; r < 2; ++r) s.G[r] = fmult[r] - s.eq.multiplier[r];
  s.F = {s.G[0] / m, (s.G[0] + s.G[1]) / (m * m)};
  return s;
}

double time_across(const ScalarModel1P& model, std::pair<double, double> interval, double param,
                   const FlowOptions& opts) {
  const double mid = 0.5 * (interval.first + interval.second);
  const double fm = model(mid, param);
  if (fm == 0.0) throw UnreachableError("equilibrium detected inside the transit interval");
  const double from = fm < 0.0 ? interval.second : interval.first;
  const double to = fm < 0.0 ? interval.first : interval.second;
  return time_of_flight(model, from, to, param, opts);
}

}  // namespace

NfEquilibria nf_equilibria(double nu, double a) {
  if (!(nu > 0.0)) throw ConvergenceError("normal-form equilibria need nu > 0");
  NfEquilibria out;
  const double n = std::sqrt(nu);
  if (a == 0.0) {
    out.y = {-n, n};
    out.multiplier = {2.0 * n, -2.0 * n};
    return out;
  }
  // On |y| < 1/(3|a|) g is concave (g'' < 0), so it has at most one root on
  // each side of 0, where g(0) = nu > 0.
  const double Y = 1.0 / (3.0 * std::abs(a));
  if (!(g_value(-Y, nu, a) < 0.0) || !(g_value(Y, nu, a) < 0.0)) {
    throw ConvergenceError("normal-form roots leave the region |a y| < 1/3");
  }
  const std::array<double, 2> seed = {-n + 0.5 * a * nu, n + 0.5 * a * nu};
  out.y[0] = bracketed_root(nu, a, -Y, 0.0, std::clamp(seed[0], -Y, 0.0));
  out.y[1] = bracketed_root(nu, a, 0.0, Y, std::clamp(seed[1], 0.0, Y));
  for (std::size_t r = 0; r < 2; ++r) out.multiplier[r] = g_prime(out.y[r], a);
  if (!(out.y[0] < out.y[1]) || !(out.multiplier[0] > 0.0) || !(out.multiplier[1] < 0.0)) {
    throw ConvergenceError("normal-form equilibria coalesce");
  }
  return out;
}

MatchedParams match_multipliers(const ScalarModel1P& model, const SaddleNodePoint& sn, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("multiplier matching needs mu > 0");
  if (!sn.generic) throw GenericityError("multiplier matching needs a generic fold");
  const double m = std::sqrt(mu);
  const auto xs = fold_equilibria(model, sn, mu);
  const std::array<double, 2> fmult = {xs[0].multiplier, xs[1].multiplier};

  double nu = sn.p0sq * mu;
  double a = sn.a0;
  MatchState st = evaluate(nu, a, fmult, m);
  int it = 0;
  for (; it <= kMaxIterations; ++it) {
    if (std::abs(st.G[0]) < kMatchTol && std::abs(st.G[1]) < kMatchTol) break;
    if (it == kMaxIterations) {
      throw ConvergenceError("multiplier matching did not converge");
    }
    // dG_r/dnu = g''/g', dG_r/da = -3y^2 + g'' y^3 / g'.
    std::array<double, 2> dnu{};
    std::array<double, 2> da{};
    for (std::size_t r = 0; r < 2; ++r) {
      const double y = st.eq.y[r];
      const double gp = st.eq.multiplier[r];
      const double gpp = g_second(y, a);
      dnu[r] = gpp / gp;
      da[r] = -3.0 * y * y + gpp * y * y * y / gp;
    }
    const double j11 = dnu[0] / m;
    const double j12 = da[0] / m;
    const double j21 = (dnu[0] + dnu[1]) / (m * m);
    const double j22 = (da[0] + da[1]) / (m * m);
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) throw ConvergenceError("singular matching Jacobian");
    const double step_nu = -(st.F[0] * j22 - j12 * st.F[1]) / det;
    const double step_a = -(j11 * st.F[1] - j21 * st.F[0]) / det;

    const double norm0 = std::hypot(st.F[0], st.F[1]);
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h < 30; ++h, lambda *= 0.5) {
      const double nu_new = nu + lambda * step_nu;
      const double a_new = a + lambda * step_a;
      if (!(nu_new > 0.0)) continue;
      try {
        MatchState trial = evaluate(nu_new, a_new, fmult, m);
        if (std::hypot(trial.F[0], trial.F[1]) < norm0) {
          nu = nu_new;
          a = a_new;
          st = trial;
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
      }
    }
    if (!accepted) throw ConvergenceError("multiplier matching step rejected");
    if (lambda * (std::abs(step_nu) + std::abs(step_a)) == 0.0) {
      throw ConvergenceError("multiplier matching stalled");
    }
  }

  MatchedParams out;
  out.mu = mu;
  out.nu = nu;
  out.a = a;
  out.residual1 = st.G[0];
  out.residual2 = st.G[1];
  out.iterations = it;
  out.x = {xs[0].x, xs[1].x};
  out.y = st.eq.y;
  out.multiplier = fmult;
  return out;
}

NormalFormCurve match_curve(const ScalarModel1P& model, const SaddleNodePoint& sn,
                            std::vector<double> mus, int jobs) {
  std::sort(mus.begin(), mus.end());
  NormalFormCurve curve;
  curve.p0sq = sn.p0sq;
  curve.a0 = sn.a0;
  curve.samples.resize(mus.size());
  std::vector<std::exception_ptr> errors(mus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < mus.size(); i = next++) {
      try {
        curve.samples[i] = match_multipliers(model, sn, mus[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, mus.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return curve;
}

double validity_radius(const ScalarModel1P& model, const SaddleNodePoint& sn, double mu_start,
                       std::optional<std::pair<double, double>> interval, int max_halvings) {
  double mu = mu_start;
  for (int k = 0; k < max_halvings; ++k, mu *= 0.5) {
    try {
      const MatchedParams mp = match_multipliers(model, sn, mu);
      if (interval) {
        const bool inside = std::all_of(mp.x.begin(), mp.x.end(), [&](double x) {
          return x >= interval->first && x <= interval->second;
        });
        if (!inside) continue;
      }
      return mu;
    } catch (const NumericalError&) {
    }
  }
  return 0.0;
}

ScalarModel1P normal_form_model(double a) {
  return ScalarModel1P("normalform", "y", "nu", {{"a", a}}, "nu - y^2 + a*y^3");
}

std::pair<std::pair<double, double>, std::pair<double, double>> default_transit_intervals(
    const SaddleNodePoint& sn, double mu) {
  const double rv = 2.0 * std::sqrt(sn.p0sq * std::abs(mu));
  const double ru = rv / (0.5 * std::abs(sn.bundle.f_xx));
  return {{sn.x - ru, sn.x + ru}, {-rv, rv}};
}

NegativeMatch negative_mu_match(const ScalarModel1P& model, const SaddleNodePoint& sn, double mu,
                                std::optional<std::pair<double, double>> U,
                                std::optional<std::pair<double, double>> V) {
  if (!(mu < 0.0)) throw std::invalid_argument("transit-time matching needs mu < 0");
  if (!sn.generic) throw GenericityError("transit-time matching needs a generic fold");
  const auto defaults = default_transit_intervals(sn, mu);
  NegativeMatch out;
  out.mu = mu;
  out.a = sn.a0;
  out.U = U.value_or(defaults.first);
  out.V = V.value_or(defaults.second);
  if (!(out.U.first < out.U.second) || !(out.V.first < out.V.second)) {
    throw std::invalid_argument("transit intervals must be non-empty");
  }

  FlowOptions opts;
  opts.abs_tol = 1e-12;
  opts.rel_tol = 1e-12;
  try {
    out.time_model = time_across(model, out.U, fold_parameter(sn, mu), opts);
  } catch (const UnreachableError&) {
    throw UnreachableError("equilibrium detected inside U");
  }

  const ScalarModel1P g = normal_form_model(out.a);
  auto h = [&](double L) { return time_across(g, out.V, -std::exp(L), opts) - out.time_model; };
  const double tol = kMatchTol * std::max(1.0, out.time_model);

  // h decreases in L = log(-nu): a larger |nu| means a faster crossing.
  double L_lo = std::log(sn.p0sq * std::abs(mu));
  double h_lo = h(L_lo);
  int evals = 1;
  double L_hi = L_lo;
  double h_hi = h_lo;
  for (int k = 0; k < 200 && (h_lo > 0.0) == (h_hi > 0.0) && h_lo != 0.0; ++k) {
    if (h_lo > 0.0) {
      L_hi = L_hi + std::log(2.0);
      h_hi = h(L_hi);
    } else {
      L_lo = L_lo - std::log(2.0);
      h_lo = h(L_lo);
    }
    ++evals;
  }
  if (h_lo == 0.0 || h_hi == 0.0) {
    const double L = h_lo == 0.0 ? L_lo : L_hi;
    out.nu = -std::exp(L);
    out.time_nf = out.time_model;
    out.iterations = evals;
    return out;
  }
  if ((h_lo > 0.0) == (h_hi > 0.0)) throw ConvergenceError("transit-time bracket not found");

  // Illinois iteration.
  double L = L_lo;
  double hL = h_lo;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    L = (L_lo * h_hi - L_hi * h_lo) / (h_hi - h_lo);
    hL = h(L);
    ++evals;
    if (std::abs(hL) < tol || std::abs(L_hi - L_lo) < 1e-15 * std::max(1.0, std::abs(L))) break;
    if ((hL > 0.0) == (h_lo > 0.0)) {
      L_lo = L;
      h_lo = hL;
      if (side == -1) h_hi *= 0.5;
      side = -1;
    } else {
      L_hi = L;
      h_hi = hL;
      if (side == 1) h_lo *= 0.5;
      side = 1;
    }
  }
  if (!(std::abs(hL) < tol)) throw ConvergenceError("transit-time matching did not converge");
  out.nu = -std::exp(L);
  out.time_nf = hL + out.time_model;
  out.iterations = evals;
  return out;
}

}  // namespace sntk
