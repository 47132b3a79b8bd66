#pragma once

#include <utility>
#include <vector>

#include "sntk/jet.hpp"
#include "sntk/model.hpp"

namespace sntk {

/// Truncated right-hand side xdot = sum_{k=2}^{K} c_k x^k.
class PolySeries {
 public:
  PolySeries() = default;
  /// Coefficients c_2, c_3, ..., c_K in that order.
  explicit PolySeries(std::vector<double> from_quadratic);

  /// From a jet whose constant and linear terms are (numerically) zero;
  /// both are set to exactly zero.
  static PolySeries from_jet(const Jet1& jet);

  /// x-part of the Taylor expansion of a model at a fold, truncated at order.
  static PolySeries at_fold(const ScalarModel1P& model, double x, double mu, int order);

  int order() const noexcept { return static_cast<int>(c_.size()) - 1; }
  /// c_k; zero outside 2..K.
  double operator[](int k) const noexcept;
  void set(int k, double value);
  /// c_2..c_K.
  std::vector<double> coefficients() const;
  Jet1 as_jet() const;
  double operator()(double x) const noexcept;

  friend bool operator==(const PolySeries&, const PolySeries&) = default;

 private:
  std::vector<double> c_{0.0, 0.0, 0.0};
};

/// One step of the reduction.
struct NormalFormStep {
  enum class Kind { scaling, near_identity };
  Kind kind = Kind::scaling;
  /// scaling: y = coefficient * x. near_identity: z = y + coefficient * y^power.
  double coefficient = 1.0;
  int power = 1;
};

struct ReductionLog {
  double alpha = 1.0;
  /// Removals in the order applied; the scaling is not repeated here.
  std::vector<NormalFormStep> removals;
  double a = 0.0;
};

inline constexpr int kMaxReductionOrder = 16;
/// Removed orders whose transformed coefficient falls below this, relative
/// to the largest coefficient of the series (or 1), are set to 0.
inline constexpr double kSnapThreshold = 1e-10;

/// The series in y = alpha x: c_k -> c_k alpha^(1-k).
PolySeries apply_scaling(const PolySeries& s, double alpha);

/// The series in z = y + beta y^power, power >= 2. Orders up to power are
/// unchanged and order power+1 is c_(power+1) + (power-2) beta c_2, both
/// stored exactly; power = 2 thus leaves the cubic bit-identical.
PolySeries apply_near_identity(const PolySeries& s, int power, double beta);

/// alpha = -c_2, making the quadratic coefficient -1. Throws GenericityError for c_2 = 0.
std::pair<PolySeries, double> scale_quadratic(const PolySeries& s);

/// -y^2 + a y^3 + 0 y^4 + ... + 0 y^K. Throws GenericityError for c_2 = 0
/// and std::invalid_argument for K > kMaxReductionOrder.
std::pair<PolySeries, ReductionLog> reduce_to_takens(const PolySeries& s);

/// Applies the logged transforms to the original series without snapping.
PolySeries replay(const PolySeries& original, const ReductionLog& log);

}  // namespace sntk
