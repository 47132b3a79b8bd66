#pragma once

// Planar systems with a fold at the origin and a prescribed invariant curve
// y = d1 x^2 + d2 p x + d3 p^2, optionally recoded by a linear map.

#include <array>
#include <cstdio>
#include <random>
#include <string>

#include "sntk/model.hpp"

namespace synthetic {

using sntk::PlanarModel2P;

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "(%.17g)", v);
  return buf;
}

struct Synthetic {
  double b[8] = {};  // b0..b7 of F; index 5 multiplies p*y
  double lambda = -1.0;
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

// F and G with the invariant curve y = d1 x^2 + d2 p x + d3 p^2, written
// in terms of the substrings standing for x and y.
inline std::array<std::string, 2> fields(const Synthetic& s, const std::string& x, const std::string& y) {
  const std::string F = num(s.b[0]) + "*p + " + num(s.b[1]) + "*" + x + "^2 + " + num(s.b[2]) + "*" +
                        x + "*" + y + " + " + num(s.b[3]) + "*" + y + "^2 + " + num(s.b[4]) + "*p*" +
                        x + " + " + num(s.b[5]) + "*p*" + y + " + " + num(s.b[6]) + "*p^2 + " +
                        num(s.b[7]) + "*" + x + "^3";
  const std::string phi = num(s.d1) + "*" + x + "^2 + " + num(s.d2) + "*p*" + x + " + " + num(s.d3) + "*p^2";
  const std::string phix = "2*" + num(s.d1) + "*" + x + " + " + num(s.d2) + "*p";
  const std::string G = num(s.lambda) + "*(" + y + " - (" + phi + ")) + (" + phix + ")*(" + F + ")";
  return {F, G};
}

inline PlanarModel2P build(const Synthetic& s) {
  const auto [F, G] = fields(s, "x", "y");
  return PlanarModel2P("synthetic", {"x", "y"}, {"p", "m"}, {}, F + " + 0*m", G, 0.0);
}

// (X, Y) = A (x, y).
inline PlanarModel2P recoded(const Synthetic& s, const std::array<double, 4>& A) {
  const double det = A[0] * A[3] - A[1] * A[2];
  const std::string x = "(" + num(A[3] / det) + "*X + " + num(-A[1] / det) + "*Y)";
  const std::string y = "(" + num(-A[2] / det) + "*X + " + num(A[0] / det) + "*Y)";
  const auto [F, G] = fields(s, x, y);
  const std::string FX = num(A[0]) + "*(" + F + ") + " + num(A[1]) + "*(" + G + ")";
  const std::string GY = num(A[2]) + "*(" + F + ") + " + num(A[3]) + "*(" + G + ")";
  return PlanarModel2P("recoded", {"X", "Y"}, {"p", "m"}, {}, FX + " + 0*m", GY, 0.0);
}

inline Synthetic random_synthetic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), mag(0.5, 2.0), lam(0.5, 3.0);
  Synthetic s;
  for (double& b : s.b) b = u(rng);
  s.b[0] = mag(rng) * (u(rng) < 0 ? -1.0 : 1.0);
  s.b[1] = mag(rng) * (u(rng) < 0 ? -1.0 : 1.0);
  s.lambda = lam(rng) * (u(rng) < 0 ? -1.0 : 1.0);
  s.d1 = u(rng);
  s.d2 = u(rng);
  s.d3 = u(rng);
  return s;
}

}  // namespace synthetic
