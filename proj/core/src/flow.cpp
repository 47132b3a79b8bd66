#include "sntk/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sntk/error.hpp"

namespace sntk {

const char* to_string(FlowStatus s) noexcept {
  switch (s) {
    case FlowStatus::ok: return "ok";
    case FlowStatus::blowup: return "blowup";
    case FlowStatus::boundary_hit: return "boundary-hit";
  }
  return "?";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
  const VectorField& field;
  std::size_t n;
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp;

  Stepper(const VectorField& f, std::size_t dim)
      : field(f), n(dim), k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim) {}

  void eval(std::span<const double> y, std::vector<double>& out) { field(y, out); }

  // One step of size h from y with k1 = F(y) preset; fills y_new and the error estimate.
  void step(const std::vector<double>& y, double h, std::vector<double>& y_new,
            std::vector<double>& err) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    eval(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    eval(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    eval(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    eval(tmp, k5);
    for (std::size_t i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    eval(tmp, k6);
    for (std::size_t i = 0; i < n; ++i) {
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    eval(y_new, k7);
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
  }
};

double error_norm(const std::vector<double>& y, const std::vector<double>& y_new,
                  const std::vector<double>& err, const FlowOptions& o) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sc = o.abs_tol + o.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    const double r = err[i] / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

bool all_finite(const std::vector<double>& y) {
  for (double v : y) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool within(const std::vector<double>& y, std::size_t checked, double bound) {
  for (std::size_t i = 0; i < checked; ++i) {
    if (std::abs(y[i]) > bound) return false;
  }
  return true;
}

double initial_step(Stepper& st, const std::vector<double>& y, double dir, double span,
                    const FlowOptions& o) {
  double d0 = 0.0;
  double d1 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sc = o.abs_tol + o.rel_tol * std::abs(y[i]);
    d0 += (y[i] / sc) * (y[i] / sc);
    d1 += (st.k1[i] / sc) * (st.k1[i] / sc);
  }
  d0 = std::sqrt(d0 / static_cast<double>(y.size()));
  d1 = std::sqrt(d1 / static_cast<double>(y.size()));
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  std::vector<double> y1(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) y1[i] = y[i] + dir * h0 * st.k1[i];
  std::vector<double> f1(y.size());
  st.eval(y1, f1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sc = o.abs_tol + o.rel_tol * std::abs(y[i]);
    d2 += ((f1[i] - st.k1[i]) / sc) * ((f1[i] - st.k1[i]) / sc);
  }
  d2 = std::sqrt(d2 / static_cast<double>(y.size())) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, span});
}

// Only the first `checked` components are subject to the blowup bound.
FlowResult integrate_impl(const VectorField& field, std::vector<double> y0, double t,
                          const FlowOptions& o, std::size_t checked) {
  if (!(o.abs_tol > 0.0) || !(o.rel_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!std::isfinite(t)) throw std::invalid_argument("integration time must be finite");
  for (double v : y0) {
    if (!std::isfinite(v)) throw std::invalid_argument("initial state must be finite");
  }

  FlowResult res;
  res.state = std::move(y0);
  if (t == 0.0) return res;

  const std::size_t n = res.state.size();
  const double dir = t > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(t);
  const double lower = o.lower.value_or(-std::numeric_limits<double>::infinity());
  const double upper = o.upper.value_or(std::numeric_limits<double>::infinity());
  auto outside = [&](double v) { return v < lower || v > upper; };
  if (outside(res.state[0])) throw std::invalid_argument("initial state outside the boundary");

  Stepper st(field, n);
  std::vector<double>& y = res.state;
  std::vector<double> y_new(n), err(n);
  st.eval(y, st.k1);

  double elapsed = 0.0;  // |time| travelled
  double h = initial_step(st, y, dir, span, o);
  bool last_rejected = false;

  while (elapsed < span) {
    if (res.steps >= o.max_steps) throw ConvergenceError("flow exceeded the maximum number of steps");
    const bool final_step = h >= span - elapsed;
    if (final_step) h = span - elapsed;
    st.step(y, dir * h, y_new, err);
    const double en = error_norm(y, y_new, err, o);
    if (!std::isfinite(en) || !all_finite(y_new)) {
      if (h < 1e-14 * std::max(1.0, elapsed)) {
        res.status = FlowStatus::blowup;
        res.time = dir * elapsed;
        return res;
      }
      h *= 0.25;
      last_rejected = true;
      continue;
    }
    if (en > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
      if (h < 1e-15 * std::max(1.0, elapsed)) throw ConvergenceError("flow step size underflow");
      continue;
    }

    if (outside(y_new[0])) {
      // Shrink the accepted step so that it lands on the boundary (Illinois).
      const double target = y_new[0] < lower ? lower : upper;
      double s_in = 0.0, f_in = y[0] - target;
      double s_out = h, f_out = y_new[0] - target;
      std::vector<double> y_try(n), err_try(n);
      double s = h;
      int side = 0;
      for (int it = 0; it < 200; ++it) {
        s = (s_in * f_out - s_out * f_in) / (f_out - f_in);
        st.step(y, dir * s, y_try, err_try);
        const double fs = y_try[0] - target;
        if (std::abs(fs) <= 1e-3 * o.abs_tol || std::abs(s_out - s_in) <= 1e-15 * (1.0 + elapsed)) break;
        if ((fs < 0.0) == (f_in < 0.0)) {
          s_in = s;
          f_in = fs;
          if (side == -1) f_out *= 0.5;
          side = -1;
        } else {
          s_out = s;
          f_out = fs;
          if (side == 1) f_in *= 0.5;
          side = 1;
        }
      }
      y = y_try;
      elapsed += s;
      ++res.steps;
      res.status = FlowStatus::boundary_hit;
      res.time = dir * elapsed;
      return res;
    }

    elapsed = final_step ? span : elapsed + h;
    y.swap(y_new);
    st.k1.swap(st.k7);
    ++res.steps;
    if (!within(y, checked, o.blowup_bound)) {
      res.status = FlowStatus::blowup;
      res.time = dir * elapsed;
      return res;
    }
    double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
    h *= fac;
    last_rejected = false;
  }
  res.time = t;
  return res;
}

}  // namespace

FlowResult integrate_system(const VectorField& field, std::vector<double> y0, double t,
                            const FlowOptions& o) {
  const std::size_t n = y0.size();
  return integrate_impl(field, std::move(y0), t, o, n);
}

FlowResult integrate(const ScalarModel1P& model, double x0, double mu, double t,
                     const FlowOptions& options) {
  if (!options.sensitivity) {
    VectorField field = [&](std::span<const double> y, std::span<double> dy) {
      dy[0] = model(y[0], mu);
    };
    return integrate_system(field, {x0}, t, options);
  }
  // Variational equation s' = f_x(x) s alongside the state.
  VectorField field = [&](std::span<const double> y, std::span<double> dy) {
    const Jet2 j = model.jet(y[0], mu, 1);
    dy[0] = j.coeff(0, 0);
    dy[1] = j.coeff(1, 0) * y[1];
  };
  FlowResult r = integrate_impl(field, {x0, 1.0}, t, options, 1);
  r.sensitivity = r.state[1];
  r.state.resize(1);
  return r;
}

FlowResult integrate(const PlanarModel2P& model, std::array<double, 2> state, double p, double m,
                     double t, const FlowOptions& options) {
  if (options.sensitivity) throw std::invalid_argument("planar flows do not carry sensitivities");
  VectorField field = [&](std::span<const double> y, std::span<double> dy) {
    const auto v = model(PlanarPoint{y[0], y[1], p, m});
    dy[0] = v[0];
    dy[1] = v[1];
  };
  return integrate_system(field, {state[0], state[1]}, t, options);
}

FlowResult flow_to(const ScalarModel1P& model, double from, double to, double mu,
                   const FlowOptions& options) {
  if (from == to) {
    FlowResult r;
    r.state = {from};
    if (options.sensitivity) r.sensitivity = 1.0;
    return r;
  }
  const double f0 = model(from, mu);
  if (!std::isfinite(f0) || std::abs(f0) < 1e-12) {
    throw UnreachableError("starting point is (numerically) an equilibrium");
  }
  if ((to > from) != (f0 > 0.0)) throw UnreachableError("target lies against the direction of the flow");

  // Reject segments containing an equilibrium, and bound the transit time.
  constexpr int kSamples = 256;
  double min_speed = std::abs(f0);
  for (int i = 1; i <= kSamples; ++i) {
    const double x = from + (to - from) * i / kSamples;
    const double f = model(x, mu);
    if (!std::isfinite(f) || std::abs(f) < 1e-12 || (f > 0.0) != (f0 > 0.0)) {
      throw UnreachableError("equilibrium between start and target");
    }
    min_speed = std::min(min_speed, std::abs(f));
  }
  const double t_max = 100.0 * std::abs(to - from) / min_speed + 1.0;

  FlowOptions o = options;
  if (to > from) {
    o.upper = to;
    o.lower = std::nullopt;
  } else {
    o.lower = to;
    o.upper = std::nullopt;
  }
  const FlowResult r = integrate(model, from, mu, t_max, o);
  if (r.status != FlowStatus::boundary_hit) {
    throw UnreachableError("orbit did not reach the target");
  }
  return r;
}

double time_of_flight(const ScalarModel1P& model, double from, double to, double mu,
                      const FlowOptions& options) {
  FlowOptions o = options;
  o.sensitivity = false;
  return flow_to(model, from, to, mu, o).time;
}

}  // namespace sntk
