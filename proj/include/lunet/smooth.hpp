#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lunet/lu.hpp"
#include "lunet/network.hpp"

namespace lunet {

namespace detail {

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                            double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol, int depth = 40) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

inline double bump_raw(double x) { return std::abs(x) < 1.0 ? std::exp(1.0 / (x * x - 1.0)) : 0.0; }

// 1 / integral of the unnormalized bump over [-1, 1], computed once.
inline double bump_normalizer() {
  static const double c = 1.0 / adaptive_simpson([](double x) { return bump_raw(x); }, -1.0, 1.0, 1e-13);
  return c;
}

// Cumulative distribution of the unit bump, P(t) = int_{-1}^{t} p, Hermite
// interpolated on 4096 segments (exact slopes p(t_i) at the knots).
class BumpCdf {
 public:
  static const BumpCdf& instance() {
    static const BumpCdf table;
    return table;
  }

  double operator()(double t) const {
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double u = (t + 1.0) / h_;
    int i = std::min(static_cast<int>(u), kSegments - 1);
    double s = u - i;
    double y0 = values_[i], y1 = values_[i + 1];
    double m0 = slopes_[i] * h_, m1 = slopes_[i + 1] * h_;
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
  }

 private:
  static constexpr int kSegments = 4096;

  BumpCdf() : values_(kSegments + 1), slopes_(kSegments + 1) {
    double c = bump_normalizer();
    values_[0] = 0.0;
    slopes_[0] = 0.0;
    for (int i = 1; i <= kSegments; ++i) {
      double a = -1.0 + (i - 1) * h_;
      double b = -1.0 + i * h_;
      values_[i] = values_[i - 1] + c * adaptive_simpson([](double x) { return bump_raw(x); }, a, b, 1e-14);
      slopes_[i] = c * bump_raw(b);
    }
    for (double& v : values_) v /= values_[kSegments];  // pin P(1) = 1 exactly
  }

  double h_ = 2.0 / kSegments;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

}  // namespace detail

// p_n(x) = n p(n x): smooth even bump of support [-1/n, 1/n] and unit mass.
inline double mollifier_eval(int n, double x) {
  if (n < 1) throw std::invalid_argument("mollifier_eval: n must be positive");
  return n * detail::bump_normalizer() * detail::bump_raw(n * x);
}

// Leaky unit convolved with the n-th mollifier. Exact sigma_alpha outside
// the window [-1/n, 1/n]; adaptive quadrature inside.
struct SmoothedActivation {
  double alpha = 0.5;
  int n = 4;
};

inline void validate(const SmoothedActivation& act) {
  if (!(act.alpha > 0.0 && act.alpha < 1.0))
    throw std::invalid_argument("SmoothedActivation: alpha must be in (0,1)");
  if (act.n < 1) throw std::invalid_argument("SmoothedActivation: n must be positive");
}

inline double smoothed_lrelu_eval(const SmoothedActivation& act, double x) {
  double w = 1.0 / act.n;
  if (x >= w || x <= -w) return x < 0.0 ? act.alpha * x : x;
  auto integrand = [&](double y) {
    double v = y < 0.0 ? act.alpha * y : y;
    return v * mollifier_eval(act.n, y - x);
  };
  return detail::adaptive_simpson(integrand, x - w, x + w, 1e-12);
}

// d/dx (sigma_alpha * p_n)(x) = alpha + (1-alpha) P_n(x) with P_n the
// mollifier CDF; always within [alpha, 1].
inline double smoothed_lrelu_deriv(const SmoothedActivation& act, double x) {
  double p = detail::BumpCdf::instance()(act.n * x);
  double d = act.alpha + (1.0 - act.alpha) * p;
  return std::clamp(d, act.alpha, 1.0);
}

// Strictly increasing bijection, so bisection brackets always exist; a few
// Newton steps polish the root to 1e-12.
inline double invert_smoothed_scalar(const SmoothedActivation& act, double y) {
  double w = 1.0 / act.n;
  if (y >= w) return y;                      // identity region
  if (y <= -act.alpha * w) return y / act.alpha;  // pure leaky region
  double lo = -w / act.alpha - 1.0, hi = w + 1.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (smoothed_lrelu_eval(act, mid) < y ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    double err = smoothed_lrelu_eval(act, x) - y;
    if (std::abs(err) <= 1e-13) break;
    x -= err / smoothed_lrelu_deriv(act, x);
  }
  return x;
}

// Evaluation-only view of a network with every activation mollified. Not a
// Network value: the smoothed units are no longer piecewise linear. Eval
// uses the cached CDF table, built eagerly on first use, so it is pure and
// lock-free afterwards.
class SmoothNetwork {
 public:
  SmoothNetwork(Network base, int n) : base_(std::move(base)), n_(n) {
    validate(base_);
    if (n < 1) throw std::invalid_argument("SmoothNetwork: n must be positive");
    for (const Layer& l : base_.layers)
      for (const Activation& a : l.acts)
        if (!(a.alpha > 0.0 && a.alpha < 1.0))
          throw std::invalid_argument("SmoothNetwork: all alphas must lie in (0,1)");
    detail::BumpCdf::instance();
  }

  const Network& base() const { return base_; }
  int mollifier_index() const { return n_; }

  std::vector<double> operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != base_.input_dim)
      throw std::invalid_argument("SmoothNetwork: input dimension mismatch");
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (const Layer& layer : base_.layers) {
      next.resize(layer.out_dim());
      matvec(layer.weight, cur, next);
      for (int i = 0; i < layer.out_dim(); ++i)
        next[i] = smoothed_lrelu_eval(SmoothedActivation{layer.acts[i].alpha, n_}, next[i] + layer.bias[i]);
      cur.swap(next);
    }
    return cur;
  }

  // Inverse for square LU-decomposable bases: scalar-wise inversion of the
  // smoothed units, then an LU solve per affine layer, walking backwards.
  std::vector<double> invert(std::span<const double> y) const {
    if (base_.output_dim() != base_.input_dim)
      throw std::invalid_argument("SmoothNetwork: invert needs a square network");
    std::vector<double> cur(y.begin(), y.end());
    for (auto it = base_.layers.rbegin(); it != base_.layers.rend(); ++it) {
      const Layer& layer = *it;
      for (size_t i = 0; i < cur.size(); ++i)
        cur[i] = invert_smoothed_scalar(SmoothedActivation{layer.acts[i].alpha, n_}, cur[i]);
      for (size_t i = 0; i < cur.size(); ++i) cur[i] -= layer.bias[i];
      auto lu = lu_decompose(layer.weight);
      if (std::holds_alternative<NotDecomposable>(lu))
        throw std::invalid_argument("SmoothNetwork: layer weight is not LU-decomposable");
      cur = lu_solve(std::get<LuFactors>(lu), std::move(cur));
    }
    return cur;
  }

 private:
  Network base_;
  int n_;
};

inline SmoothNetwork smooth_network(Network net, int n) { return SmoothNetwork(std::move(net), n); }

}  // namespace lunet
