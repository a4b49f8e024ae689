#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lunet/rng.hpp"

namespace lunet {

// Axis-aligned compact box [lo_1,hi_1] x ... x [lo_d,hi_d]; the only
// compact-set representation used anywhere.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
    return v;
  }
  bool contains(std::span<const double> x) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
};

inline Box make_box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("Box: lo/hi size mismatch");
  for (size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("Box: requires lo[i] < hi[i]");
  return Box{std::move(lo), std::move(hi)};
}

inline Box unit_box(int d) {
  return Box{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
}

using VecFn = std::function<std::vector<double>(const std::vector<double>&)>;
// Optional grid-point filter, e.g. the exclusion strips of the quantizer.
using ExcludeFn = std::function<bool(const std::vector<double>&)>;

namespace detail {

// Visits the inclusive lattice with pts knots per axis.
template <typename F>
void for_each_grid_point(const Box& box, int pts, bool midpoints, F&& f) {
  int d = box.dim();
  std::vector<int> idx(d, 0);
  std::vector<double> x(d);
  for (;;) {
    for (int i = 0; i < d; ++i) {
      double t = midpoints ? (idx[i] + 0.5) / pts : (pts > 1 ? static_cast<double>(idx[i]) / (pts - 1) : 0.5);
      x[i] = box.lo[i] + t * (box.hi[i] - box.lo[i]);
    }
    f(x);
    int i = 0;
    while (i < d && ++idx[i] == pts) idx[i++] = 0;
    if (i == d) break;
  }
}

}  // namespace detail

// Max over a uniform lattice (minus excluded points) of the componentwise
// max gap. Deterministic; a lower bound on the true sup.
inline double sup_norm_gap(const VecFn& f, const VecFn& g, const Box& box, int pts_per_dim,
                           const ExcludeFn& exclude = {}) {
  double worst = 0.0;
  detail::for_each_grid_point(box, pts_per_dim, /*midpoints=*/false, [&](const std::vector<double>& x) {
    if (exclude && exclude(x)) return;
    std::vector<double> fx = f(x), gx = g(x);
    if (fx.size() != gx.size()) throw std::invalid_argument("sup_norm_gap: output dimension mismatch");
    for (size_t i = 0; i < fx.size(); ++i) worst = std::max(worst, std::abs(fx[i] - gx[i]));
  });
  return worst;
}

// Midpoint-rule quadrature of ||f-g||_p^p over the box, then the p-th root.
inline double lp_norm_gap(const VecFn& f, const VecFn& g, const Box& box, double p, int pts_per_dim) {
  if (p < 1.0) throw std::invalid_argument("lp_norm_gap: requires p >= 1");
  double cell = box.volume() / std::pow(static_cast<double>(pts_per_dim), box.dim());
  double acc = 0.0;
  detail::for_each_grid_point(box, pts_per_dim, /*midpoints=*/true, [&](const std::vector<double>& x) {
    std::vector<double> fx = f(x), gx = g(x);
    if (fx.size() != gx.size()) throw std::invalid_argument("lp_norm_gap: output dimension mismatch");
    double s = 0.0;
    for (size_t i = 0; i < fx.size(); ++i) s += std::pow(std::abs(fx[i] - gx[i]), p);
    acc += s * cell;
  });
  return std::pow(acc, 1.0 / p);
}

// Grid estimate of the modulus of continuity at radius r, w.r.t. the max
// norm on inputs and outputs. The lattice search is lower-biased, so the
// result carries a 1.1 safety factor for use in accuracy bounds.
inline double modulus_estimate(const VecFn& f, const Box& box, double r, int pts_per_dim) {
  if (!(r > 0.0)) throw std::invalid_argument("modulus_estimate: requires r > 0");
  int d = box.dim();
  int pts = pts_per_dim;
  std::vector<std::vector<double>> values;
  values.reserve(static_cast<size_t>(std::pow(pts, d)));
  detail::for_each_grid_point(box, pts, false, [&](const std::vector<double>& x) { values.push_back(f(x)); });

  // window radius in lattice steps per axis
  std::vector<int> win(d), strides(d);
  for (int i = 0; i < d; ++i) {
    double step = (box.hi[i] - box.lo[i]) / (pts - 1);
    win[i] = std::min(pts - 1, static_cast<int>(std::floor(r / step + 1e-12)));
  }
  strides[0] = 1;
  for (int i = 1; i < d; ++i) strides[i] = strides[i - 1] * pts;

  double worst = 0.0;
  std::vector<int> idx(d, 0), jdx(d);
  size_t flat = 0;
  detail::for_each_grid_point(box, pts, false, [&](const std::vector<double>&) {
    // enumerate neighbours with jdx >= idx lexicographically to halve the work
    std::vector<int> lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      lo[i] = std::max(0, idx[i] - win[i]);
      hi[i] = std::min(pts - 1, idx[i] + win[i]);
      jdx[i] = lo[i];
    }
    for (;;) {
      size_t jflat = 0;
      for (int i = 0; i < d; ++i) jflat += static_cast<size_t>(jdx[i]) * strides[i];
      if (jflat > flat) {
        const auto& a = values[flat];
        const auto& b = values[jflat];
        for (size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
      }
      int i = 0;
      while (i < d && ++jdx[i] > hi[i]) {
        jdx[i] = lo[i];
        ++i;
      }
      if (i == d) break;
    }
    int i = 0;
    while (i < d && ++idx[i] == pts) idx[i++] = 0;
    ++flat;
  });
  return 1.1 * worst;
}

// One-sample Kolmogorov-Smirnov statistic against a target CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& target_cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double c = target_cdf(samples[i]);
    worst = std::max(worst, std::abs(c - static_cast<double>(i + 1) / n));
    worst = std::max(worst, std::abs(c - static_cast<double>(i) / n));
  }
  return worst;
}

// Energy distance 2 E||A-B|| - E||A-A'|| - E||B-B'|| between two sample
// sets, each expectation estimated from `pairs` seeded random index pairs.
inline double energy_distance(const std::vector<std::vector<double>>& a,
                              const std::vector<std::vector<double>>& b, uint64_t seed,
                              int pairs = 10000) {
  if (a.empty() || b.empty()) throw std::invalid_argument("energy_distance: empty sample set");
  if (a.front().size() != b.front().size())
    throw std::invalid_argument("energy_distance: dimension mismatch");
  CounterRng rng(seed, /*stream=*/17);
  auto dist = [](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
  };
  auto mean_cross = [&](const auto& u, const auto& v, bool same) {
    double s = 0.0;
    for (int k = 0; k < pairs; ++k) {
      size_t i = static_cast<size_t>(rng.next_u64() % u.size());
      size_t j = static_cast<size_t>(rng.next_u64() % v.size());
      if (same && u.size() > 1)
        while (j == i) j = static_cast<size_t>(rng.next_u64() % v.size());
      s += dist(u[i], v[j]);
    }
    return s / pairs;
  };
  return 2.0 * mean_cross(a, b, false) - mean_cross(a, a, true) - mean_cross(b, b, true);
}

}  // namespace lunet
