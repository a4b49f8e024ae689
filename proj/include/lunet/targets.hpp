#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lunet/coding.hpp"
#include "lunet/flow.hpp"
#include "lunet/metrics.hpp"

namespace lunet {

// Built-in targets keep the acceptance runs reproducible without an
// expression parser. Coding targets map [0,1]^dx into [0,1]^dy.
struct BuiltinTarget {
  std::string name;
  int dx = 1;
  int dy = 1;
  TargetFn fn;
  Box domain{{0.0}, {1.0}};
};

namespace targets {

inline double triangle_wave(double x) {
  double t = x * 2.0;
  double frac = t - std::floor(t);
  return 1.0 - 2.0 * std::abs(frac - 0.5);
}

inline BuiltinTarget identity_nd(int d) {
  return {"identity" + std::to_string(d), d, d, [](const std::vector<double>& x) { return x; }, unit_box(d)};
}

inline BuiltinTarget swap2() {
  return {"swap2", 2, 2, [](const std::vector<double>& x) { return std::vector<double>{x[1], x[0]}; },
          unit_box(2)};
}

inline BuiltinTarget sine2() {
  return {"sine2", 2, 2,
          [](const std::vector<double>& x) {
            return std::vector<double>{0.5 * (std::sin(std::numbers::pi * x[0]) + 1.0),
                                       0.5 * (std::sin(std::numbers::pi * (x[0] + x[1]) / 2.0) + 1.0)};
          },
          unit_box(2)};
}

inline BuiltinTarget sawtooth1() {
  return {"sawtooth1", 1, 1, [](const std::vector<double>& x) { return std::vector<double>{triangle_wave(x[0])}; },
          unit_box(1)};
}

inline BuiltinTarget const2() {
  return {"const2", 2, 2, [](const std::vector<double>&) { return std::vector<double>{0.5, 0.5}; },
          unit_box(2)};
}

// Equal mixture of N(-2, 0.5^2) and N(2, 0.5^2).
inline double mix2_cdf(double y) {
  return 0.5 * standard_normal_cdf((y + 2.0) / 0.5) + 0.5 * standard_normal_cdf((y - 2.0) / 0.5);
}

inline double mix2_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("mix2_quantile: u must be in (0,1)");
  double lo = -8.0, hi = 8.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (mix2_cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline TransportMap mix2_1d() { return rosenblatt_1d(mix2_cdf, mix2_quantile); }

inline TransportMap gauss_corr_2d() { return rosenblatt_gaussian2d(Matrix{{1.0, 0.8}, {0.8, 1.0}}); }

}  // namespace targets

// Lookup for the CLI target zoo (coding targets only).
inline BuiltinTarget find_builtin_target(const std::string& name) {
  if (name == "identity1") return targets::identity_nd(1);
  if (name == "identity2") return targets::identity_nd(2);
  if (name == "identity3") return targets::identity_nd(3);
  if (name == "swap2") return targets::swap2();
  if (name == "sine2") return targets::sine2();
  if (name == "sawtooth1") return targets::sawtooth1();
  if (name == "const2") return targets::const2();
  throw std::invalid_argument("unknown target '" + name + "'");
}

}  // namespace lunet
