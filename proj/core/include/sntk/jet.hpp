#pragma once

// Truncated Taylor series ("jets") in one and two variables.
//
// Coefficients are stored scaled: entry (i, j) of a Jet2 holds
// (1 / (i! j!)) d^{i+j} f / dx^i dmu^j at the expansion point, so that the
// ring operations are plain truncated polynomial arithmetic. Raw partial
// derivatives are recovered with partial().

#include <array>
#include <span>
#include <vector>

namespace sntk {

class Jet1 {
 public:
  explicit Jet1(int order = 0);
  Jet1(int order, std::vector<double> coeffs);

  static Jet1 constant(int order, double value);
  /// The identity function expanded about x0: [x0, 1, 0, ...].
  static Jet1 variable(int order, double x0);

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  double operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return coeffs_[static_cast<std::size_t>(i)]; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double value() const noexcept { return coeffs_.front(); }
  /// i! * coeffs[i].
  double derivative(int i) const;

  Jet1& operator+=(const Jet1& rhs);
  Jet1& operator-=(const Jet1& rhs);
  Jet1& operator*=(const Jet1& rhs);
  Jet1& operator*=(double s);

  friend Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
  friend Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
  friend Jet1 operator*(const Jet1& a, const Jet1& b);
  friend Jet1 operator*(Jet1 a, double s) { return a *= s; }
  friend Jet1 operator*(double s, Jet1 a) { return a *= s; }
  friend Jet1 operator-(Jet1 a);
  friend Jet1 operator/(const Jet1& a, const Jet1& b);

  friend bool operator==(const Jet1&, const Jet1&) = default;

 private:
  std::vector<double> coeffs_;
};

/// outer(inner(t)) truncated; requires inner.value() == 0.
Jet1 compose(const Jet1& outer, const Jet1& inner);

/// Compositional inverse of s (s[0] == 0, s[1] != 0), truncated to s.order().
Jet1 revert(const Jet1& s);

Jet1 pow(const Jet1& base, int exponent);

class Jet2 {
 public:
  static constexpr int kMaxOrder = 8;
  static constexpr int kDefaultOrder = 4;

  explicit Jet2(int order = kDefaultOrder);

  static Jet2 constant(int order, double value);
  /// The first variable (state, x) expanded about x0.
  static Jet2 variable0(int order, double x0);
  /// The second variable (parameter, mu) expanded about mu0.
  static Jet2 variable1(int order, double mu0);

  int order() const noexcept { return order_; }
  double coeff(int i, int j) const { return data_[index(i, j)]; }
  double& coeff(int i, int j) { return data_[index(i, j)]; }
  double value() const noexcept { return data_[0]; }
  /// i! j! coeff(i, j); throws std::out_of_range when i + j > order.
  double partial(int i, int j) const;
  bool is_finite() const noexcept;

  Jet2& operator+=(const Jet2& rhs);
  Jet2& operator-=(const Jet2& rhs);
  Jet2& operator*=(const Jet2& rhs);
  Jet2& operator/=(const Jet2& rhs);
  Jet2& operator+=(double s) { data_[0] += s; return *this; }
  Jet2& operator-=(double s) { data_[0] -= s; return *this; }
  Jet2& operator*=(double s);

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
  friend Jet2 operator/(Jet2 a, const Jet2& b) { return a /= b; }
  friend Jet2 operator+(Jet2 a, double s) { return a += s; }
  friend Jet2 operator-(Jet2 a, double s) { return a -= s; }
  friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
  friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
  friend Jet2 operator+(double s, Jet2 a) { return a += s; }
  friend Jet2 operator-(double s, const Jet2& a) { return -a + s; }
  friend Jet2 operator-(Jet2 a);

  friend bool operator==(const Jet2& a, const Jet2& b);

 private:
  static constexpr std::size_t kCapacity = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>((order_ + 1) * (order_ + 2) / 2);
  }
  std::size_t index(int i, int j) const;

  int order_;
  std::array<double, kCapacity> data_{};
};

enum class JetOp { add, sub, mul, div };

Jet2 jet_arith(const Jet2& a, const Jet2& b, JetOp op);

/// Applies the univariate series t (Taylor coefficients of some g about
/// u.value()) to u, giving the jet of g(u).
Jet2 apply_series(const Jet2& u, std::span<const double> taylor);

Jet2 reciprocal(const Jet2& u);
Jet2 exp(const Jet2& u);
Jet2 log(const Jet2& u);
Jet2 sqrt(const Jet2& u);
Jet2 sin(const Jet2& u);
Jet2 cos(const Jet2& u);
Jet2 tanh(const Jet2& u);
/// Rejects constant terms within 1e-12 of zero (kink of |.|).
Jet2 abs(const Jet2& u);
Jet2 pow(const Jet2& base, int exponent);
/// Integral-valued exponents dispatch to the integer overload; other
/// exponents need a positive constant term.
Jet2 pow(const Jet2& base, double exponent);

}  // namespace sntk
