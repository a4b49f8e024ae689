#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lunet/network.hpp"

namespace lunet {

// Continuous piecewise-linear scalar function with finitely many slopes,
// stored as sorted kinks + per-piece slopes + one anchor value. Intercepts
// are never stored, so continuity holds by construction. kink_values caches
// the function values at the kinks for O(log n) evaluation.
struct PlcFunction {
  std::vector<double> kinks;   // strictly increasing, size n-1 (possibly empty)
  std::vector<double> slopes;  // size n, consecutive entries differ
  double anchor_x = 0.0;
  double anchor_y = 0.0;
  std::vector<double> kink_values;

  int piece_count() const { return static_cast<int>(slopes.size()); }
};

enum class Direction { increasing, decreasing };

// Strictly monotone subset: all slopes strictly positive or strictly negative.
struct PlcsmFunction : PlcFunction {
  Direction direction = Direction::increasing;
};

namespace detail {

inline void fill_kink_values(PlcFunction& f) {
  // piece index containing anchor_x: piece i covers (kinks[i-1], kinks[i])
  int n = static_cast<int>(f.kinks.size());
  f.kink_values.assign(n, 0.0);
  if (n == 0) return;
  int p = static_cast<int>(std::upper_bound(f.kinks.begin(), f.kinks.end(), f.anchor_x) - f.kinks.begin());
  // walk right from the anchor
  double x = f.anchor_x, y = f.anchor_y;
  for (int i = p; i < n; ++i) {
    y += f.slopes[i] * (f.kinks[i] - x);
    x = f.kinks[i];
    f.kink_values[i] = y;
  }
  // walk left from the anchor
  x = f.anchor_x;
  y = f.anchor_y;
  for (int i = p - 1; i >= 0; --i) {
    y += f.slopes[i + 1] * (f.kinks[i] - x);
    x = f.kinks[i];
    f.kink_values[i] = y;
  }
}

}  // namespace detail

inline PlcFunction make_plc(std::vector<double> kinks, std::vector<double> slopes, double anchor_x,
                            double anchor_y) {
  if (slopes.empty()) throw std::invalid_argument("make_plc: needs at least one slope");
  if (kinks.size() + 1 != slopes.size()) throw std::invalid_argument("make_plc: needs one slope per piece");
  for (size_t i = 1; i < kinks.size(); ++i)
    if (!(kinks[i - 1] < kinks[i])) throw std::invalid_argument("make_plc: kinks must strictly increase");
  // merge pieces whose slopes coincide; the kink between them is not a kink
  std::vector<double> mk, ms;
  ms.push_back(slopes[0]);
  for (size_t i = 0; i < kinks.size(); ++i) {
    if (slopes[i + 1] != ms.back()) {
      mk.push_back(kinks[i]);
      ms.push_back(slopes[i + 1]);
    }
  }
  PlcFunction f;
  f.kinks = std::move(mk);
  f.slopes = std::move(ms);
  f.anchor_x = anchor_x;
  f.anchor_y = anchor_y;
  detail::fill_kink_values(f);
  return f;
}

inline PlcsmFunction make_plcsm(const PlcFunction& f) {
  bool pos = true, neg = true;
  for (double s : f.slopes) {
    pos = pos && s > 0.0;
    neg = neg && s < 0.0;
  }
  if (!pos && !neg) throw std::invalid_argument("make_plcsm: slopes must all be strictly positive or negative");
  PlcsmFunction g;
  static_cast<PlcFunction&>(g) = f;
  g.direction = pos ? Direction::increasing : Direction::decreasing;
  return g;
}

inline double eval_plc(const PlcFunction& f, double x) {
  if (f.kinks.empty()) return f.anchor_y + f.slopes[0] * (x - f.anchor_x);
  int p = static_cast<int>(std::upper_bound(f.kinks.begin(), f.kinks.end(), x) - f.kinks.begin());
  if (p == 0) return f.kink_values[0] + f.slopes[0] * (x - f.kinks[0]);
  return f.kink_values[p - 1] + f.slopes[p] * (x - f.kinks[p - 1]);
}

// Interpolates finitely many points (strictly increasing abscissae) by the
// secant construction: the first and last pieces extend the first and last
// secant slopes, so f(x_i) = y_i exactly at every input point.
inline PlcFunction fit_points(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_points: needs at least two points");
  std::vector<double> kinks, slopes;
  slopes.reserve(points.size() - 1);
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    double dx = points[i + 1].first - points[i].first;
    if (!(dx > 0.0)) throw std::invalid_argument("fit_points: abscissae must strictly increase");
    slopes.push_back((points[i + 1].second - points[i].second) / dx);
  }
  // kinks at the interior abscissae only; the outer pieces extend secants
  for (size_t i = 1; i + 1 < points.size(); ++i) kinks.push_back(points[i].first);
  return make_plc(std::move(kinks), std::move(slopes), points.front().first, points.front().second);
}

// Splits f into a strictly decreasing and a strictly increasing part with
// f = dec + inc. Negative-slope pieces go to the decreasing half (slope
// a_i - margin there, -margin elsewhere); nonnegative pieces symmetrically
// to the increasing half. Both halves take the value f(x_1)/2 at the first
// kink, so the sum telescopes exactly.
inline std::pair<PlcsmFunction, PlcsmFunction> monotone_decompose(const PlcFunction& f, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("monotone_decompose: margin must be positive");
  double x1 = f.kinks.empty() ? 0.0 : f.kinks.front();
  double half = eval_plc(f, x1) / 2.0;
  std::vector<double> dec_slopes, inc_slopes;
  dec_slopes.reserve(f.slopes.size());
  inc_slopes.reserve(f.slopes.size());
  for (double a : f.slopes) {
    if (a < 0.0) {
      dec_slopes.push_back(a - margin);
      inc_slopes.push_back(margin);
    } else {
      dec_slopes.push_back(-margin);
      inc_slopes.push_back(a + margin);
    }
  }
  PlcFunction dec = make_plc(f.kinks, std::move(dec_slopes), x1, half);
  PlcFunction inc = make_plc(f.kinks, std::move(inc_slopes), x1, half);
  return {make_plcsm(dec), make_plcsm(inc)};
}

// sigma_{a,b}: slope a on negatives, b on positives, as a width-1 chain with
// invertible activations. a < b uses alpha = a/b and an outer scale b;
// a > b reflects the input so the same trick applies.
inline Network scaled_lrelu(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("scaled_lrelu: slopes must be positive");
  if (a == b) throw std::invalid_argument("scaled_lrelu: a == b is plain affine scaling");
  Network net;
  net.input_dim = 1;
  if (a < b) {
    net.layers.push_back(scalar_layer(1.0, 0.0, a / b));
    net.layers.push_back(scalar_layer(b, 0.0, 1.0));
  } else {
    net.layers.push_back(scalar_layer(-1.0, 0.0, b / a));
    net.layers.push_back(scalar_layer(-a, 0.0, 1.0));
  }
  return net;
}

// Exact width-1 realization of a strictly monotone piecewise-linear
// function. Peels kinks from the left: if net_{j+1} realizes the tail
// function f_{j+1} (slopes s_{j+1}..s_m), then
//   f_j(x) = (1/s_{j+1}) * sigma_{s_j, s_{j+1}}(f_{j+1}(x) - c) + c,
// with c = f(x_j), since f_{j+1}(x) - c changes sign exactly at x_j. The
// shifts fold into the sigma block, so each kink costs two layers.
// Decreasing inputs are synthesized as -(-f) with the final negation folded
// into the last (identity-activated) layer. Iterative on purpose: the
// quantizer chains reach thousands of pieces.
inline Network synthesize_plcsm(const PlcsmFunction& f) {
  bool decreasing = f.direction == Direction::decreasing;
  std::vector<double> slopes = f.slopes;
  if (decreasing)
    for (double& s : slopes) s = -s;
  const std::vector<double>& kinks = f.kinks;
  int m = static_cast<int>(slopes.size());

  // values of (the possibly negated) f at its kinks
  std::vector<double> vals(kinks.size());
  for (size_t i = 0; i < kinks.size(); ++i)
    vals[i] = decreasing ? -f.kink_values[i] : f.kink_values[i];

  Network net;
  net.input_dim = 1;
  if (m == 1) {
    double b = (decreasing ? -f.anchor_y : f.anchor_y) - slopes[0] * f.anchor_x;
    net.layers.push_back(scalar_layer(slopes[0], b, 1.0));
  } else {
    // base: the last piece extended over all of R
    double xm = kinks.back(), ym = vals.back();
    net.layers.push_back(scalar_layer(slopes[m - 1], ym - slopes[m - 1] * xm, 1.0));
    for (int j = m - 2; j >= 0; --j) {
      double sj = slopes[j], sj1 = slopes[j + 1];
      double c = vals[j];
      if (sj < sj1) {
        // sigma block b*sigma_{sj/sj1}; outer 1/s_{j+1} cancels the scale
        net.layers.push_back(scalar_layer(1.0, -c, sj / sj1));
        net.layers.push_back(scalar_layer(1.0, c, 1.0));
      } else {
        // reflected case: sigma_{a,b}(u) = -a*sigma_{b/a}(-u)
        net.layers.push_back(scalar_layer(-1.0, c, sj1 / sj));
        net.layers.push_back(scalar_layer(-sj / sj1, c, 1.0));
      }
    }
  }
  if (decreasing) {
    Layer& last = net.layers.back();
    last.weight(0, 0) = -last.weight(0, 0);
    last.bias[0] = -last.bias[0];
  }
  return net;
}

// Uniform-grid interpolant of a strictly monotone callable on [a, b] with n
// cells. The samples are checked for strict monotonicity.
inline PlcsmFunction fit_monotone_grid(const std::function<double(double)>& g, double a, double b, int n) {
  if (!(a < b) || n < 1) throw std::invalid_argument("fit_monotone_grid: bad interval or cell count");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    double x = a + (b - a) * i / n;
    pts.emplace_back(x, g(x));
  }
  bool inc = pts[1].second > pts[0].second;
  for (int i = 0; i < n; ++i) {
    bool step_inc = pts[i + 1].second > pts[i].second;
    bool step_dec = pts[i + 1].second < pts[i].second;
    if (inc ? !step_inc : !step_dec)
      throw std::invalid_argument("fit_monotone_grid: sampled values are not strictly monotone");
  }
  return make_plcsm(fit_points(pts));
}

}  // namespace lunet
