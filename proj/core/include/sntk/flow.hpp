#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sntk/model.hpp"

namespace sntk {

enum class FlowStatus { ok, blowup, boundary_hit };

const char* to_string(FlowStatus s) noexcept;

struct FlowOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// |state| beyond this stops the integration with status blowup.
  double blowup_bound = 1e8;
  /// Interval for the first state component; leaving it stops the
  /// integration on the boundary with status boundary_hit.
  std::optional<double> lower;
  std::optional<double> upper;
  /// Integrate the variational equation alongside (scalar flows only).
  bool sensitivity = false;
  std::size_t max_steps = 2'000'000;
};

struct FlowResult {
  std::vector<double> state;
  double time = 0.0;  // signed elapsed time
  std::size_t steps = 0;
  FlowStatus status = FlowStatus::ok;
  /// d(final state)/d(initial state) when requested.
  std::optional<double> sensitivity;

  double x() const { return state.front(); }
};

/// Autonomous vector field y' = F(y).
using VectorField = std::function<void(std::span<const double> y, std::span<double> dy)>;

/// Embedded Dormand-Prince 5(4) with adaptive steps; t < 0 integrates backward.
FlowResult integrate_system(const VectorField& field, std::vector<double> y0, double t,
                            const FlowOptions& options = {});

/// phi_t(x0) for xdot = f(x, mu).
FlowResult integrate(const ScalarModel1P& model, double x0, double mu, double t,
                     const FlowOptions& options = {});

/// Planar flow at primary parameter p and secondary parameter m.
FlowResult integrate(const PlanarModel2P& model, std::array<double, 2> state, double p, double m,
                     double t, const FlowOptions& options = {});

/// Integrates from `from` until the orbit reaches `to`; result.time is the
/// time of flight. Same failure modes as time_of_flight.
FlowResult flow_to(const ScalarModel1P& model, double from, double to, double mu,
                   const FlowOptions& options = {});

/// Time t > 0 with phi_t(from) = to. Throws UnreachableError when the flow
/// runs the other way, an equilibrium lies in between, or |f(from)| < 1e-12.
double time_of_flight(const ScalarModel1P& model, double from, double to, double mu,
                      const FlowOptions& options = {});

}  // namespace sntk
