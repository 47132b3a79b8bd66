#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sntk/flow.hpp"
#include "sntk/model.hpp"
#include "sntk/saddle_node.hpp"

namespace sntk {

/// Two scalar systems at fixed parameter values: xdot = f(x, mu), ydot = g(y, nu).
struct ConjugacyPair {
  ScalarModel1P f;
  double mu = 0.0;
  ScalarModel1P g;
  double nu = 0.0;
};

/// Polynomial h(x) = sum_k coeffs[k] (x - x0)^k solving g(h) = h' f near x0.
struct LocalConjugacy {
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<double> coeffs;  // h_0 = y0, h_1 = +-1, ...
  /// Where the first neglected term stays below 1e-8.
  double radius = 0.0;

  double operator()(double x) const;
  double derivative(double x) const;
};

/// Order-by-order solve of g(h(x)) = h'(x) f(x) about the equilibria x_star,
/// y_star with h_1 = orientation (+1 or -1). Throws MultiplierMismatchError
/// when |f'(x*) - g'(y*)| > 1e-8, which makes the linear terms inconsistent.
LocalConjugacy local_taylor_conjugacy(const ConjugacyPair& pair, double x_star, double y_star,
                                      int order = 4, double orientation = 1.0);

/// h on an interval of x, built by transporting an anchor along the flows.
class Conjugacy {
 public:
  /// Basin of one hyperbolic equilibrium: anchors at +-radius of the local patch.
  static Conjugacy on_basin(ConjugacyPair pair, LocalConjugacy local,
                            std::pair<double, double> basin, FlowOptions options = precise());
  /// No equilibria: U = (u0, u1) is crossed in the same time as V = (v0, v1);
  /// the entry end of U maps to the entry end of V.
  static Conjugacy flow_box(ConjugacyPair pair, std::pair<double, double> U,
                            std::pair<double, double> V, FlowOptions options = precise());

  /// (h(x), h'(x)). Inside the local patch the polynomial is used.
  std::pair<double, double> evaluate(double x) const;
  /// Same, but always through the flows (used for consistency checks).
  std::pair<double, double> evaluate_by_flow(double x) const;

  const ConjugacyPair& pair() const noexcept { return pair_; }
  std::pair<double, double> domain() const noexcept { return domain_; }
  const std::optional<LocalConjugacy>& local() const noexcept { return local_; }
  bool is_flow_box() const noexcept { return !local_; }
  /// (x*, y*) for a basin; the entry ends of U and V for a flow box.
  std::pair<double, double> anchor() const;

  static FlowOptions precise();

 private:
  Conjugacy(ConjugacyPair pair, std::pair<double, double> domain, FlowOptions options)
      : pair_(std::move(pair)), domain_(domain), options_(options) {}

  struct Anchor {
    double p;
    double q;
    double dh;
  };
  std::pair<double, double> transport(double x, const Anchor& a) const;
  const Anchor& anchor_for(double x) const;

  ConjugacyPair pair_;
  std::pair<double, double> domain_;
  FlowOptions options_;
  std::optional<LocalConjugacy> local_;
  std::vector<Anchor> anchors_;
};

struct DefectStats {
  double max = 0.0;
  double rms = 0.0;
  double q90 = 0.0;  // 90% of grid points have a defect at most this
  /// max |h(phi_D(x)) - psi_D(h(x))| over probed points; NaN if not measured.
  double flow_commutation = 0.0;
  double probe_time = 0.0;
};

struct ConjugacySample {
  std::vector<double> x;
  std::vector<double> h;
  std::vector<double> dh;
  std::vector<double> defect;
  /// The fixed point pair, or the entry ends of U and V for a flow box.
  std::pair<double, double> anchor;
  std::pair<double, double> interval;
  DefectStats stats;
};

/// n Chebyshev points on [lo, hi] (endpoints included), ascending.
std::vector<double> chebyshev_grid(double lo, double hi, int n);

/// Evaluates h on a Chebyshev grid of `interval` and fills the pointwise defects.
ConjugacySample extend_by_flow(const Conjugacy& h, std::pair<double, double> interval,
                               int points = 257, int jobs = 1);

/// |g(h(x)) - h'(x) f(x)| statistics over the sample (uses the stored h, h').
DefectStats conjugacy_defect(const ConjugacySample& sample, const ConjugacyPair& pair);

/// max over xs of |h(phi_D(x)) - psi_D(h(x))|; points whose image leaves the domain are skipped.
double flow_commutation_defect(const Conjugacy& h, const std::vector<double>& xs, double delta);

struct ConjugacyOptions {
  int order = 4;
  int points = 257;
  double collar = 1e-4;
  /// Half-width of the working window about x*; default 2 |x_2 - x_1| (mu > 0)
  /// or the transit interval (mu < 0).
  std::optional<double> half_width;
  int jobs = 1;
  double probe_time = 0.5;
};

struct NormalFormConjugacy {
  ConjugacyPair pair;
  std::vector<ConjugacySample> samples;  // one per basin, or one flow box
  std::vector<Conjugacy> maps;
};

/// Matches the model at fold-local mu to its normal form and builds the
/// conjugacy on each basin (mu > 0) or on the transit interval (mu < 0).
NormalFormConjugacy conjugate_to_normal_form(const ScalarModel1P& model, const SaddleNodePoint& sn,
                                             double mu, const ConjugacyOptions& options = {});

}  // namespace sntk
