#include "sntk/conjugacy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "sntk/error.hpp"
#include "sntk/jet.hpp"
#include "sntk/nf_match.hpp"

namespace sntk {

namespace {

constexpr double kMultiplierTol = 1e-8;
constexpr double kPatchRemainder = 1e-8;

Jet1 taylor_in_state(const ScalarModel1P& model, double x, double param, int order) {
  const Jet2 j = model.jet(x, param, order);
  Jet1 out(order);
  for (int k = 1; k <= order; ++k) out[k] = j.coeff(k, 0);
  return out;
}

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

double LocalConjugacy::operator()(double x) const {
  const double d = x - x0;
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * d + coeffs[k];
  return acc;
}

double LocalConjugacy::derivative(double x) const {
  const double d = x - x0;
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * d + static_cast<double>(k) * coeffs[k];
  return acc;
}

LocalConjugacy local_taylor_conjugacy(const ConjugacyPair& pair, double x_star, double y_star,
                                      int order, double orientation) {
  if (order < 1 || order + 1 > Jet2::kMaxOrder) {
    throw std::invalid_argument("local conjugacy order must lie in [1, 7]");
  }
  if (orientation != 1.0 && orientation != -1.0) {
    throw std::invalid_argument("orientation must be +1 or -1");
  }
  const int K = order + 1;
  const Jet1 f = taylor_in_state(pair.f, x_star, pair.mu, K);
  const Jet1 g = taylor_in_state(pair.g, y_star, pair.nu, K);
  if (!(f[1] != 0.0)) throw NumericalError("equilibrium is not hyperbolic");
  if (!(std::abs(f[1] - g[1]) <= kMultiplierTol)) {
    throw MultiplierMismatchError("multipliers differ (" + std::to_string(f[1]) + " vs " +
                                  std::to_string(g[1]) +
                                  "): the linear terms of g(h) = h'f are inconsistent");
  }
  // Order k: g_1 h_k + L_k = k h_k f_1 + R_k, where L_k collects g_j, j >= 2,
  // and R_k = sum_{i<k} i h_i f_{k+1-i}.
  Jet1 h(K);
  h[1] = orientation;
  for (int k = 2; k <= K; ++k) {
    h[k] = 0.0;
    const double L = compose(g, h)[k];
    double R = 0.0;
    for (int i = 1; i < k; ++i) R += i * h[i] * f[k + 1 - i];
    h[k] = (L - R) / (k * f[1] - g[1]);
  }

  LocalConjugacy out;
  out.x0 = x_star;
  out.y0 = y_star;
  out.coeffs.assign(h.coeffs().begin(), h.coeffs().end() - 1);
  out.coeffs[0] = y_star;
  const double tail = std::abs(h[K]);
  out.radius = tail > 0.0 ? std::pow(kPatchRemainder / tail, 1.0 / K)
                          : std::numeric_limits<double>::infinity();
  return out;
}

FlowOptions Conjugacy::precise() {
  FlowOptions o;
  o.abs_tol = 1e-12;
  o.rel_tol = 1e-12;
  return o;
}

Conjugacy Conjugacy::on_basin(ConjugacyPair pair, LocalConjugacy local,
                              std::pair<double, double> basin, FlowOptions options) {
  if (!(basin.first < local.x0 && local.x0 < basin.second)) {
    throw std::invalid_argument("basin must contain the equilibrium");
  }
  local.radius = std::min(local.radius,
                          0.5 * std::min(local.x0 - basin.first, basin.second - local.x0));
  Conjugacy c(std::move(pair), basin, options);
  for (double p : {local.x0 - local.radius, local.x0 + local.radius}) {
    c.anchors_.push_back({p, local(p), local.derivative(p)});
  }
  c.local_ = std::move(local);
  return c;
}

Conjugacy Conjugacy::flow_box(ConjugacyPair pair, std::pair<double, double> U,
                              std::pair<double, double> V, FlowOptions options) {
  const double fm = pair.f(0.5 * (U.first + U.second), pair.mu);
  const double gm = pair.g(0.5 * (V.first + V.second), pair.nu);
  if (fm == 0.0 || gm == 0.0) throw UnreachableError("flow box interval contains an equilibrium");
  const double p = fm < 0.0 ? U.second : U.first;
  const double q = gm < 0.0 ? V.second : V.first;
  const double dh = pair.g(q, pair.nu) / pair.f(p, pair.mu);
  Conjugacy c(std::move(pair), U, options);
  c.anchors_.push_back({p, q, dh});
  return c;
}

std::pair<double, double> Conjugacy::anchor() const {
  if (local_) return {local_->x0, local_->y0};
  return {anchors_.front().p, anchors_.front().q};
}

const Conjugacy::Anchor& Conjugacy::anchor_for(double x) const {
  if (anchors_.size() == 1) return anchors_.front();
  return x < local_->x0 ? anchors_[0] : anchors_[1];
}

std::pair<double, double> Conjugacy::transport(double x, const Anchor& a) const {
  if (x == a.p) return {a.q, a.dh};
  FlowOptions o = options_;
  o.sensitivity = true;
  const double fx = pair_.f(x, pair_.mu);
  const bool x_to_p = (fx > 0.0) == (a.p > x);
  if (x_to_p) {
    // x = phi_{-T}(p): h(x) = psi_{-T}(q), h'(x) = psi'_{-T}(q) h'(p) phi'_T(x).
    const FlowResult rf = flow_to(pair_.f, x, a.p, pair_.mu, o);
    const FlowResult rg = integrate(pair_.g, a.q, pair_.nu, -rf.time, o);
    if (rg.status != FlowStatus::ok) throw NumericalError("normal-form flow failed during transport");
    return {rg.x(), *rg.sensitivity * a.dh * *rf.sensitivity};
  }
  // x = phi_T(p): h(x) = psi_T(q), h'(x) = psi'_T(q) h'(p) / phi'_T(p).
  const FlowResult rf = flow_to(pair_.f, a.p, x, pair_.mu, o);
  const FlowResult rg = integrate(pair_.g, a.q, pair_.nu, rf.time, o);
  if (rg.status != FlowStatus::ok) throw NumericalError("normal-form flow failed during transport");
  return {rg.x(), *rg.sensitivity * a.dh / *rf.sensitivity};
}

std::pair<double, double> Conjugacy::evaluate(double x) const {
  if (local_ && std::abs(x - local_->x0) <= local_->radius) {
    return {(*local_)(x), local_->derivative(x)};
  }
  return transport(x, anchor_for(x));
}

std::pair<double, double> Conjugacy::evaluate_by_flow(double x) const {
  if (local_ && x == local_->x0) return {local_->y0, local_->derivative(x)};
  return transport(x, anchor_for(x));
}

std::vector<double> chebyshev_grid(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw std::invalid_argument("invalid Chebyshev grid");
  std::vector<double> x(static_cast<std::size_t>(n));
  const double c = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo);
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = c - r * std::cos(std::numbers::pi * i / (n - 1));
  }
  x.front() = lo;
  x.back() = hi;
  return x;
}

DefectStats conjugacy_defect(const ConjugacySample& s, const ConjugacyPair& pair) {
  DefectStats st;
  if (s.x.empty()) return st;
  std::vector<double> d(s.x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    d[i] = std::abs(pair.g(s.h[i], pair.nu) - s.dh[i] * pair.f(s.x[i], pair.mu));
    st.max = std::max(st.max, d[i]);
    sum += d[i] * d[i];
  }
  st.rms = std::sqrt(sum / static_cast<double>(d.size()));
  std::sort(d.begin(), d.end());
  const auto k = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(d.size()))) - 1;
  st.q90 = d[k];
  st.flow_commutation = std::numeric_limits<double>::quiet_NaN();
  return st;
}

ConjugacySample extend_by_flow(const Conjugacy& h, std::pair<double, double> interval, int points,
                               int jobs) {
  const auto dom = h.domain();
  if (!(interval.first >= dom.first && interval.second <= dom.second)) {
    throw std::invalid_argument("sample interval leaves the conjugacy domain");
  }
  ConjugacySample s;
  s.interval = interval;
  s.x = chebyshev_grid(interval.first, interval.second, points);
  s.h.resize(s.x.size());
  s.dh.resize(s.x.size());
  parallel_for(s.x.size(), jobs, [&](std::size_t i) {
    const auto [hv, dv] = h.evaluate(s.x[i]);
    s.h[i] = hv;
    s.dh[i] = dv;
  });
  s.anchor = h.anchor();
  const ConjugacyPair& pair = h.pair();
  s.defect.resize(s.x.size());
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    s.defect[i] = std::abs(pair.g(s.h[i], pair.nu) - s.dh[i] * pair.f(s.x[i], pair.mu));
  }
  s.stats = conjugacy_defect(s, pair);
  return s;
}

double flow_commutation_defect(const Conjugacy& h, const std::vector<double>& xs, double delta) {
  const ConjugacyPair& pair = h.pair();
  const auto dom = h.domain();
  double worst = 0.0;
  for (double x : xs) {
    const FlowResult rf = integrate(pair.f, x, pair.mu, delta, Conjugacy::precise());
    if (rf.status != FlowStatus::ok) continue;
    const double x1 = rf.x();
    if (!(x1 > dom.first && x1 < dom.second)) continue;
    const double lhs = h.evaluate(x1).first;
    const FlowResult rg = integrate(pair.g, h.evaluate(x).first, pair.nu, delta, Conjugacy::precise());
    if (rg.status != FlowStatus::ok) continue;
    worst = std::max(worst, std::abs(lhs - rg.x()));
  }
  return worst;
}

NormalFormConjugacy conjugate_to_normal_form(const ScalarModel1P& model, const SaddleNodePoint& sn,
                                             double mu, const ConjugacyOptions& opt) {
  if (mu == 0.0) throw std::invalid_argument("conjugacy construction needs mu != 0");
  auto probe_points = [](const std::vector<double>& x) {
    std::vector<double> p;
    for (std::size_t i = 0; i < x.size(); i += 8) p.push_back(x[i]);
    return p;
  };

  if (mu < 0.0) {
    std::optional<std::pair<double, double>> U;
    if (opt.half_width) U = std::make_pair(sn.x - *opt.half_width, sn.x + *opt.half_width);
    const NegativeMatch nm = negative_mu_match(model, sn, mu, U);
    NormalFormConjugacy out{{model, fold_parameter(sn, mu), normal_form_model(nm.a), nm.nu}, {}, {}};
    Conjugacy map = Conjugacy::flow_box(out.pair, nm.U, nm.V);
    ConjugacySample s = extend_by_flow(map, nm.U, opt.points, opt.jobs);
    s.stats.probe_time = opt.probe_time;
    s.stats.flow_commutation = flow_commutation_defect(map, probe_points(s.x), opt.probe_time);
    out.samples.push_back(std::move(s));
    out.maps.push_back(std::move(map));
    return out;
  }

  const MatchedParams mp = match_multipliers(model, sn, mu);
  NormalFormConjugacy out{{model, fold_parameter(sn, mu), normal_form_model(mp.a), mp.nu}, {}, {}};
  const double orientation = fold_orientation(sn.bundle).state_sign;
  const double w = opt.half_width.value_or(2.0 * std::abs(mp.x[1] - mp.x[0]));
  const double lo = sn.x - w;
  const double hi = sn.x + w;

  std::vector<double> roots = {mp.x[0], mp.x[1]};
  for (const StationaryPoint& sp : find_all_stationary(model, out.pair.mu, lo, hi, 2000)) {
    const bool known = std::any_of(roots.begin(), roots.end(), [&](double r) {
      return std::abs(r - sp.x) < 1e-9 * std::max(1.0, std::abs(r));
    });
    if (!known) roots.push_back(sp.x);
  }
  std::sort(roots.begin(), roots.end());

  for (int e = 0; e < 2; ++e) {
    const double xe = mp.x[static_cast<std::size_t>(e)];
    const double ye = mp.y[static_cast<std::size_t>(e)];
    double left = lo;
    double right = hi;
    bool left_root = false;
    bool right_root = false;
    for (double r : roots) {
      if (r < xe && r > left) {
        left = r;
        left_root = true;
      }
      if (r > xe && r < right) {
        right = r;
        right_root = true;
      }
    }
    LocalConjugacy local = local_taylor_conjugacy(out.pair, xe, ye, opt.order, orientation);
    Conjugacy map = Conjugacy::on_basin(out.pair, std::move(local), {left, right});
    const std::pair<double, double> grid = {left + (left_root ? opt.collar : 0.0),
                                            right - (right_root ? opt.collar : 0.0)};
    ConjugacySample s = extend_by_flow(map, grid, opt.points, opt.jobs);
    s.stats.probe_time = opt.probe_time;
    s.stats.flow_commutation = flow_commutation_defect(map, probe_points(s.x), opt.probe_time);
    out.samples.push_back(std::move(s));
    out.maps.push_back(std::move(map));
  }
  return out;
}

}  // namespace sntk
