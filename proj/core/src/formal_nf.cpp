#include "sntk/formal_nf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sntk/error.hpp"

namespace sntk {

PolySeries::PolySeries(std::vector<double> from_quadratic) {
  if (from_quadratic.empty()) throw InputError("series needs at least the quadratic coefficient");
  c_.assign(2, 0.0);
  for (double v : from_quadratic) {
    if (!std::isfinite(v)) throw InputError("series coefficients must be finite");
    c_.push_back(v);
  }
}

PolySeries PolySeries::from_jet(const Jet1& jet) {
  if (jet.order() < 2) throw std::invalid_argument("jet order must be at least 2");
  std::vector<double> c;
  for (int k = 2; k <= jet.order(); ++k) c.push_back(jet[k]);
  return PolySeries(std::move(c));
}

PolySeries PolySeries::at_fold(const ScalarModel1P& model, double x, double mu, int order) {
  const Jet2 j = model.jet(x, mu, order);
  std::vector<double> c;
  for (int k = 2; k <= order; ++k) c.push_back(j.coeff(k, 0));
  return PolySeries(std::move(c));
}

double PolySeries::operator[](int k) const noexcept {
  if (k < 2 || k > order()) return 0.0;
  return c_[static_cast<std::size_t>(k)];
}

void PolySeries::set(int k, double value) {
  if (k < 2 || k > order()) throw std::out_of_range("series order out of range");
  c_[static_cast<std::size_t>(k)] = value;
}

std::vector<double> PolySeries::coefficients() const { return {c_.begin() + 2, c_.end()}; }

Jet1 PolySeries::as_jet() const { return Jet1(order(), c_); }

double PolySeries::operator()(double x) const noexcept {
  double acc = 0.0;
  for (int k = order(); k >= 0; --k) acc = acc * x + c_[static_cast<std::size_t>(k)];
  return acc;
}

PolySeries apply_scaling(const PolySeries& s, double alpha) {
  if (alpha == 0.0 || !std::isfinite(alpha)) throw std::invalid_argument("scaling must be nonzero");
  PolySeries out = s;
  double factor = 1.0 / alpha;  // alpha^(1-k) at k = 2
  for (int k = 2; k <= s.order(); ++k) {
    out.set(k, s[k] * factor);
    factor /= alpha;
  }
  return out;
}

PolySeries apply_near_identity(const PolySeries& s, int power, double beta) {
  if (power < 2) throw std::invalid_argument("near-identity power must be at least 2");
  const int K = s.order();
  Jet1 t = Jet1::variable(K, 0.0);  // z = T(y)
  Jet1 dt = Jet1::constant(K, 1.0);
  if (power <= K) {
    t[power] += beta;
    if (power - 1 <= K) dt[power - 1] += beta * power;
  }
  // zdot = T'(y) g(y) with y = T^{-1}(z).
  const Jet1 y = revert(t);
  const Jet1 zdot = compose(dt * s.as_jet(), y);
  PolySeries out = PolySeries::from_jet(zdot);
  for (int k = 2; k <= std::min(power, K); ++k) out.set(k, s[k]);
  if (power + 1 <= K) out.set(power + 1, s[power + 1] + (power - 2) * beta * s[2]);
  return out;
}

std::pair<PolySeries, double> scale_quadratic(const PolySeries& s) {
  if (s[2] == 0.0) throw GenericityError("quadratic coefficient vanishes: not a saddle-node jet");
  const double alpha = -s[2];
  PolySeries out = apply_scaling(s, alpha);
  out.set(2, -1.0);
  return {out, alpha};
}

std::pair<PolySeries, ReductionLog> reduce_to_takens(const PolySeries& s) {
  if (s.order() > kMaxReductionOrder) {
    throw std::invalid_argument("reduction order exceeds " + std::to_string(kMaxReductionOrder));
  }
  auto [cur, alpha] = scale_quadratic(s);
  ReductionLog log;
  log.alpha = alpha;
  for (int k = 4; k <= cur.order(); ++k) {
    const double b = cur[k];
    if (b == 0.0) continue;
    const double beta = b / (k - 3);
    cur = apply_near_identity(cur, k - 1, beta);
    double size = 1.0;
    for (double c : cur.coefficients()) size = std::max(size, std::abs(c));
    if (!(std::abs(cur[k]) < kSnapThreshold * size)) {
      throw ConvergenceError("order " + std::to_string(k) + " term not removed");
    }
    cur.set(k, 0.0);
    cur.set(2, -1.0);
    log.removals.push_back({NormalFormStep::Kind::near_identity, beta, k - 1});
  }
  log.a = cur[3];
  return {cur, log};
}

PolySeries replay(const PolySeries& original, const ReductionLog& log) {
  PolySeries cur = apply_scaling(original, log.alpha);
  for (const NormalFormStep& step : log.removals) {
    cur = step.kind == NormalFormStep::Kind::scaling
              ? apply_scaling(cur, step.coefficient)
              : apply_near_identity(cur, step.power, step.coefficient);
  }
  return cur;
}

}  // namespace sntk
