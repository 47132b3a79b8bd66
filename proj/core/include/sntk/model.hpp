#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sntk/expr.hpp"
#include "sntk/jet.hpp"

namespace sntk {

/// Ordered name -> value table; declaration order is kept for output.
using ConstantTable = std::vector<std::pair<std::string, double>>;

/// Partial derivatives of f(x, mu) at one point.
struct DerivativeBundle {
  double f = 0.0;
  double f_x = 0.0;
  double f_mu = 0.0;
  double f_xx = 0.0;
  double f_xmu = 0.0;
  double f_mumu = 0.0;
  double f_xxx = 0.0;
  double f_xxxx = 0.0;

  /// Needs a jet of order >= 4.
  static DerivativeBundle from_jet(const Jet2& jet);
};

/// xdot = f(x, mu) with named constants.
class ScalarModel1P {
 public:
  ScalarModel1P(std::string name, std::string state, std::string param, ConstantTable constants,
                std::string_view rhs);

  const std::string& name() const noexcept { return name_; }
  const std::string& state_name() const noexcept { return state_; }
  const std::string& param_name() const noexcept { return param_; }
  const ConstantTable& constants() const noexcept { return constants_; }
  const Expr& rhs() const noexcept { return rhs_; }

  double constant(std::string_view name) const;
  /// Copy with one constant replaced; throws InputError for unknown names.
  ScalarModel1P with_constant(std::string_view name, double value) const;

  double operator()(double x, double mu) const;
  /// Jet in (x, mu) about the given point.
  Jet2 jet(double x, double mu, int order = Jet2::kDefaultOrder) const;
  DerivativeBundle derivative_bundle(double x, double mu) const;

  /// Optional starting point (x, mu) for locating a fold.
  std::optional<std::pair<double, double>> fold_guess;

 private:
  std::string name_;
  std::string state_;
  std::string param_;
  ConstantTable constants_;
  Expr rhs_;
};

enum class PlanarVar { x, y, p, m };

/// A point of the planar family: states (x, y), primary parameter p and
/// secondary parameter m. Names in the model may differ; the roles do not.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
  double p = 0.0;
  double m = 0.0;

  double get(PlanarVar v) const noexcept;
  void set(PlanarVar v, double value) noexcept;
};

/// xdot = F(x, y, p, m), ydot = G(x, y, p, m).
class PlanarModel2P {
 public:
  PlanarModel2P(std::string name, std::array<std::string, 2> states,
                std::array<std::string, 2> params, ConstantTable constants, std::string_view rhs_f,
                std::string_view rhs_g, double secondary_default);

  const std::string& name() const noexcept { return name_; }
  const std::array<std::string, 2>& state_names() const noexcept { return states_; }
  const std::array<std::string, 2>& param_names() const noexcept { return params_; }
  const ConstantTable& constants() const noexcept { return constants_; }
  const Expr& rhs_f() const noexcept { return f_; }
  const Expr& rhs_g() const noexcept { return g_; }
  double secondary_default() const noexcept { return secondary_default_; }

  double constant(std::string_view name) const;
  PlanarModel2P with_constant(std::string_view name, double value) const;
  PlanarModel2P with_secondary_default(double value) const;

  std::array<double, 2> operator()(const PlanarPoint& at) const;
  /// Jets of (F, G) in the two chosen variables; the others are frozen.
  std::array<Jet2, 2> jet(const PlanarPoint& at, PlanarVar first, PlanarVar second,
                          int order = Jet2::kDefaultOrder) const;
  /// (F, G) with jets substituted for (x, y, p, m), e.g. affine maps of new coordinates.
  std::array<Jet2, 2> compose(const std::array<Jet2, 4>& xypm) const;
  /// Jacobian with respect to the states, row-major [[F_x, F_y], [G_x, G_y]].
  std::array<double, 4> jacobian(const PlanarPoint& at) const;

  /// Optional starting point for locating a fold.
  std::optional<PlanarPoint> fold_guess;

 private:
  std::string name_;
  std::array<std::string, 2> states_;
  std::array<std::string, 2> params_;
  ConstantTable constants_;
  Expr f_;
  Expr g_;
  double secondary_default_;
};

using Model = std::variant<ScalarModel1P, PlanarModel2P>;

/// Names accepted by builtin().
const std::vector<std::string>& builtin_names();

/// fraedrich, stommel1d, stommel2d, normalform. Overrides replace constants
/// (for stommel2d, "m" sets the secondary parameter's default). Throws
/// InputError on unknown names.
Model builtin(std::string_view name, const std::map<std::string, double>& overrides = {});

ScalarModel1P builtin_scalar(std::string_view name,
                             const std::map<std::string, double>& overrides = {});
PlanarModel2P builtin_planar(std::string_view name,
                             const std::map<std::string, double>& overrides = {});

/// Parses the plain-text model format; throws ModelError with line numbers.
Model load_model(std::string_view text);

/// Fraedrich's radiation-albedo constants derived from the primary physical ones.
struct FraedrichConstants {
  double a;  // e_SA sigma / c
  double b;  // b2 I0 / (4 e_SA sigma)
  double d;  // (a2 - 1) I0 / (4 e_SA sigma)
};
FraedrichConstants fraedrich_constants(double I0, double sigma, double c, double e_sa, double a2,
                                       double b2);

}  // namespace sntk
