#include "sntk/jet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sntk/error.hpp"

namespace sntk {

namespace {

void require_same_order(int a, int b) {
  if (a != b) {
    throw std::invalid_argument("jet order mismatch: " + std::to_string(a) + " vs " +
                                std::to_string(b));
  }
}

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// Taylor coefficients of 1/(c + s) in s.
std::vector<double> reciprocal_series(double c, int order) {
  std::vector<double> t(static_cast<std::size_t>(order) + 1);
  double term = 1.0 / c;
  for (int k = 0; k <= order; ++k) {
    t[static_cast<std::size_t>(k)] = term;
    term *= -1.0 / c;
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Jet1

Jet1::Jet1(int order) {
  if (order < 0) throw std::invalid_argument("jet order must be non-negative");
  coeffs_.assign(static_cast<std::size_t>(order) + 1, 0.0);
}

Jet1::Jet1(int order, std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (order < 0) throw std::invalid_argument("jet order must be non-negative");
  coeffs_.resize(static_cast<std::size_t>(order) + 1, 0.0);
}

Jet1 Jet1::constant(int order, double value) {
  Jet1 j(order);
  j.coeffs_[0] = value;
  return j;
}

Jet1 Jet1::variable(int order, double x0) {
  Jet1 j(order);
  j.coeffs_[0] = x0;
  if (order >= 1) j.coeffs_[1] = 1.0;
  return j;
}

double Jet1::derivative(int i) const {
  if (i < 0 || i > order()) throw std::out_of_range("jet derivative index out of range");
  return factorial(i) * coeffs_[static_cast<std::size_t>(i)];
}

Jet1& Jet1::operator+=(const Jet1& rhs) {
  require_same_order(order(), rhs.order());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

Jet1& Jet1::operator-=(const Jet1& rhs) {
  require_same_order(order(), rhs.order());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

Jet1& Jet1::operator*=(const Jet1& rhs) { return *this = *this * rhs; }

Jet1& Jet1::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Jet1 operator*(const Jet1& a, const Jet1& b) {
  require_same_order(a.order(), b.order());
  const int k = a.order();
  Jet1 r(k);
  for (int i = 0; i <= k; ++i) {
    double s = 0.0;
    for (int p = 0; p <= i; ++p) s += a[p] * b[i - p];
    r[i] = s;
  }
  return r;
}

Jet1 operator-(Jet1 a) {
  for (int i = 0; i <= a.order(); ++i) a[i] = -a[i];
  return a;
}

Jet1 operator/(const Jet1& a, const Jet1& b) {
  require_same_order(a.order(), b.order());
  if (b.value() == 0.0) throw SingularJetError("division by a jet with zero constant term");
  // Solve b * q = a coefficient by coefficient.
  const int k = a.order();
  Jet1 q(k);
  for (int i = 0; i <= k; ++i) {
    double s = a[i];
    for (int p = 1; p <= i; ++p) s -= b[p] * q[i - p];
    q[i] = s / b[0];
  }
  return q;
}

Jet1 compose(const Jet1& outer, const Jet1& inner) {
  require_same_order(outer.order(), inner.order());
  if (inner.value() != 0.0) {
    throw std::invalid_argument("jet composition needs an inner series with zero constant term");
  }
  const int k = outer.order();
  Jet1 r = Jet1::constant(k, outer[k]);
  for (int i = k - 1; i >= 0; --i) {
    r = r * inner;
    r[0] += outer[i];
  }
  return r;
}

Jet1 revert(const Jet1& s) {
  const int k = s.order();
  if (k < 1 || s[0] != 0.0 || s[1] == 0.0) {
    throw std::invalid_argument("series reversion needs s(0) = 0 and s'(0) != 0");
  }
  // y = (z - N(y)) / s1 with N the nonlinear part; each sweep fixes one more order.
  Jet1 nonlinear = s;
  nonlinear[1] = 0.0;
  const Jet1 z = Jet1::variable(k, 0.0);
  Jet1 y = z * (1.0 / s[1]);
  for (int sweep = 1; sweep < k; ++sweep) {
    y = (z - compose(nonlinear, y)) * (1.0 / s[1]);
  }
  return y;
}

Jet1 pow(const Jet1& base, int exponent) {
  if (exponent < 0) {
    return Jet1::constant(base.order(), 1.0) / pow(base, -exponent);
  }
  Jet1 result = Jet1::constant(base.order(), 1.0);
  Jet1 b = base;
  unsigned e = static_cast<unsigned>(exponent);
  while (e) {
    if (e & 1u) result = result * b;
    e >>= 1u;
    if (e) b = b * b;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Jet2

Jet2::Jet2(int order) : order_(order) {
  if (order < 0 || order > kMaxOrder) {
    throw std::invalid_argument("Jet2 order must lie in [0, " + std::to_string(kMaxOrder) + "]");
  }
}

Jet2 Jet2::constant(int order, double value) {
  Jet2 j(order);
  j.data_[0] = value;
  return j;
}

Jet2 Jet2::variable0(int order, double x0) {
  Jet2 j = constant(order, x0);
  if (order >= 1) j.coeff(1, 0) = 1.0;
  return j;
}

Jet2 Jet2::variable1(int order, double mu0) {
  Jet2 j = constant(order, mu0);
  if (order >= 1) j.coeff(0, 1) = 1.0;
  return j;
}

std::size_t Jet2::index(int i, int j) const {
  if (i < 0 || j < 0 || i + j > order_) {
    throw std::out_of_range("jet index (" + std::to_string(i) + "," + std::to_string(j) +
                            ") exceeds order " + std::to_string(order_));
  }
  return static_cast<std::size_t>(i * (order_ + 1) - i * (i - 1) / 2 + j);
}

double Jet2::partial(int i, int j) const { return factorial(i) * factorial(j) * coeff(i, j); }

bool Jet2::is_finite() const noexcept {
  for (std::size_t n = 0; n < size(); ++n) {
    if (!std::isfinite(data_[n])) return false;
  }
  return true;
}

Jet2& Jet2::operator+=(const Jet2& rhs) {
  require_same_order(order_, rhs.order_);
  for (std::size_t n = 0; n < size(); ++n) data_[n] += rhs.data_[n];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& rhs) {
  require_same_order(order_, rhs.order_);
  for (std::size_t n = 0; n < size(); ++n) data_[n] -= rhs.data_[n];
  return *this;
}

Jet2& Jet2::operator*=(double s) {
  for (std::size_t n = 0; n < size(); ++n) data_[n] *= s;
  return *this;
}

Jet2& Jet2::operator*=(const Jet2& rhs) {
  require_same_order(order_, rhs.order_);
  Jet2 r(order_);
  for (int i = 0; i <= order_; ++i) {
    for (int j = 0; i + j <= order_; ++j) {
      double s = 0.0;
      for (int p = 0; p <= i; ++p) {
        for (int q = 0; q <= j; ++q) s += coeff(p, q) * rhs.coeff(i - p, j - q);
      }
      r.coeff(i, j) = s;
    }
  }
  return *this = r;
}

Jet2& Jet2::operator/=(const Jet2& rhs) { return *this *= reciprocal(rhs); }

Jet2 operator-(Jet2 a) { return a *= -1.0; }

bool operator==(const Jet2& a, const Jet2& b) {
  if (a.order_ != b.order_) return false;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (a.data_[n] != b.data_[n]) return false;
  }
  return true;
}

Jet2 jet_arith(const Jet2& a, const Jet2& b, JetOp op) {
  switch (op) {
    case JetOp::add: return a + b;
    case JetOp::sub: return a - b;
    case JetOp::mul: return a * b;
    case JetOp::div: return a / b;
  }
  throw std::invalid_argument("unknown jet operation");
}

Jet2 apply_series(const Jet2& u, std::span<const double> taylor) {
  const int k = u.order();
  if (static_cast<int>(taylor.size()) < k + 1) {
    throw std::invalid_argument("series shorter than jet order");
  }
  Jet2 v = u;
  v.coeff(0, 0) = 0.0;  // nilpotent part
  Jet2 r = Jet2::constant(k, taylor[static_cast<std::size_t>(k)]);
  for (int i = k - 1; i >= 0; --i) {
    r *= v;
    r += taylor[static_cast<std::size_t>(i)];
  }
  return r;
}

Jet2 reciprocal(const Jet2& u) {
  const double c = u.value();
  if (c == 0.0) throw SingularJetError("division by a jet with zero constant term");
  return apply_series(u, reciprocal_series(c, u.order()));
}

Jet2 exp(const Jet2& u) {
  std::vector<double> t(static_cast<std::size_t>(u.order()) + 1);
  double term = std::exp(u.value());
  for (int k = 0; k <= u.order(); ++k) {
    t[static_cast<std::size_t>(k)] = term;
    term /= (k + 1);
  }
  return apply_series(u, t);
}

Jet2 log(const Jet2& u) {
  const double c = u.value();
  if (!(c > 0.0)) throw SingularJetError("log of a jet with non-positive constant term");
  std::vector<double> t(static_cast<std::size_t>(u.order()) + 1);
  t[0] = std::log(c);
  double cpow = 1.0;
  for (int k = 1; k <= u.order(); ++k) {
    cpow *= c;
    t[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) / (k * cpow);
  }
  return apply_series(u, t);
}

namespace {

// Generalised binomial series of (c + s)^r for c > 0.
std::vector<double> power_series(double c, double r, int order) {
  std::vector<double> t(static_cast<std::size_t>(order) + 1);
  double binom = 1.0;
  double cpow = std::pow(c, r);
  for (int k = 0; k <= order; ++k) {
    t[static_cast<std::size_t>(k)] = binom * cpow;
    binom *= (r - k) / (k + 1);
    cpow /= c;
  }
  return t;
}

}  // namespace

Jet2 sqrt(const Jet2& u) {
  const double c = u.value();
  if (!(c > 0.0)) throw SingularJetError("sqrt of a jet with non-positive constant term");
  return apply_series(u, power_series(c, 0.5, u.order()));
}

Jet2 sin(const Jet2& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> t(static_cast<std::size_t>(u.order()) + 1);
  for (int k = 0; k <= u.order(); ++k) t[static_cast<std::size_t>(k)] = cycle[k % 4] / factorial(k);
  return apply_series(u, t);
}

Jet2 cos(const Jet2& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  const double cycle[4] = {c, -s, -c, s};
  std::vector<double> t(static_cast<std::size_t>(u.order()) + 1);
  for (int k = 0; k <= u.order(); ++k) t[static_cast<std::size_t>(k)] = cycle[k % 4] / factorial(k);
  return apply_series(u, t);
}

Jet2 tanh(const Jet2& u) {
  // T' = 1 - T^2 gives (k+1) T_{k+1} = [k == 0] - sum_i T_i T_{k-i}.
  const int order = u.order();
  std::vector<double> t(static_cast<std::size_t>(order) + 1);
  t[0] = std::tanh(u.value());
  for (int k = 0; k < order; ++k) {
    double s = (k == 0) ? 1.0 : 0.0;
    for (int i = 0; i <= k; ++i) s -= t[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(k - i)];
    t[static_cast<std::size_t>(k) + 1] = s / (k + 1);
  }
  return apply_series(u, t);
}

Jet2 abs(const Jet2& u) {
  if (std::abs(u.value()) < 1e-12) {
    throw SingularJetError("abs of a jet whose constant term is at the kink");
  }
  return u.value() > 0.0 ? u : -u;
}

Jet2 pow(const Jet2& base, int exponent) {
  if (exponent < 0) return reciprocal(pow(base, -exponent));
  Jet2 result = Jet2::constant(base.order(), 1.0);
  Jet2 b = base;
  unsigned e = static_cast<unsigned>(exponent);
  while (e) {
    if (e & 1u) result *= b;
    e >>= 1u;
    if (e) b *= b;
  }
  return result;
}

Jet2 pow(const Jet2& base, double exponent) {
  if (std::nearbyint(exponent) == exponent && std::abs(exponent) <= 64.0) {
    return pow(base, static_cast<int>(exponent));
  }
  const double c = base.value();
  if (!(c > 0.0)) {
    throw SingularJetError("non-integer power of a jet with non-positive constant term");
  }
  return apply_series(base, power_series(c, exponent, base.order()));
}

}  // namespace sntk
