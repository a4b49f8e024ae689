#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lunet/metrics.hpp"
#include "lunet/network.hpp"
#include "lunet/rng.hpp"

namespace lunet {

// A continuous target whose first-component level set at `level` is compact
// and interior to the domain, so every continuous bijection stays at least
// `epsilon` away in sup norm: epsilon = half the smallest boundary gap
// |f_1 - level|. check_gap samples that inequality; it demonstrates the
// obstruction on candidate networks, it does not prove it.
struct Counterexample {
  int dim = 2;
  std::string descriptor;
  std::function<std::vector<double>(const std::vector<double>&)> f;
  double level = 0.0;
  bool ball_domain = true;  // closed ball of `radius`, else the box
  double radius = 1.0;
  Box box{{-1.0}, {1.0}};
  double epsilon = 0.0;
};

// f(x) = (standard normal density, x_2, ..., x_d) on the closed ball of
// radius r. The level set of the density at its maximum is {0}, and on the
// boundary sphere |f_1 - c| is the constant c (1 - e^{-r^2/2}).
inline Counterexample gaussian_counterexample(int d, double r) {
  if (d < 2) throw std::invalid_argument("gaussian_counterexample: needs dimension >= 2");
  if (!(r > 0.0)) throw std::invalid_argument("gaussian_counterexample: radius must be positive");
  double c = std::pow(2.0 * std::numbers::pi, -0.5 * d);
  Counterexample ce;
  ce.dim = d;
  ce.descriptor = "gaussian_density_first_coordinate";
  ce.level = c;
  ce.ball_domain = true;
  ce.radius = r;
  ce.f = [c](const std::vector<double>& x) {
    double q = 0.0;
    for (double xi : x) q += xi * xi;
    std::vector<double> y(x.begin(), x.end());
    y[0] = c * std::exp(-0.5 * q);
    return y;
  };
  ce.epsilon = 0.5 * c * (1.0 - std::exp(-0.5 * r * r));
  return ce;
}

// The one-dimensional obstruction: f(x) = x^2 on [-1, 1] with epsilon = 1/2,
// witnessed on the probe triple {-1, 0, 1}.
inline Counterexample square_counterexample_1d() {
  Counterexample ce;
  ce.dim = 1;
  ce.descriptor = "square_on_unit_interval";
  ce.level = 0.0;
  ce.ball_domain = false;
  ce.box = make_box({-1.0}, {1.0});
  ce.f = [](const std::vector<double>& x) { return std::vector<double>{x[0] * x[0]}; };
  ce.epsilon = 0.5;
  return ce;
}

namespace detail {

// Uniform angular boundary samples for d = 2; seeded unit directions above.
inline std::vector<std::vector<double>> sphere_samples(int d, double r, int count) {
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  if (d == 2) {
    for (int i = 0; i < count; ++i) {
      double t = 2.0 * std::numbers::pi * i / count;
      pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return pts;
  }
  CounterRng rng(2027, 3);
  for (int i = 0; i < count; ++i) {
    std::vector<double> v(d);
    double len = 0.0;
    for (double& x : v) {
      x = rng.next_normal();
      len += x * x;
    }
    len = std::sqrt(len);
    for (double& x : v) x = x * r / len;
    pts.push_back(std::move(v));
  }
  return pts;
}

}  // namespace detail

// Boundary samples of the counterexample's domain.
inline std::vector<std::vector<double>> boundary_samples(const Counterexample& ce, int count = 1000) {
  if (ce.ball_domain) return detail::sphere_samples(ce.dim, ce.radius, count);
  if (ce.dim == 1) return {{ce.box.lo[0]}, {ce.box.hi[0]}};
  std::vector<std::vector<double>> pts;
  detail::for_each_grid_point(ce.box, std::max(2, count / (2 * ce.dim)), false,
                              [&](const std::vector<double>& x) {
                                for (int i = 0; i < ce.dim; ++i)
                                  if (x[i] == ce.box.lo[i] || x[i] == ce.box.hi[i]) {
                                    pts.push_back(x);
                                    return;
                                  }
                              });
  return pts;
}

// Candidate bijection fitted to the counterexample target by coordinate
// descent on a least-squares loss over interior samples. The net is
// parameterized directly in LU-factored form (unit lower entries, upper
// entries with diagonals kept away from zero, biases, leaky slopes inside
// (0,1)), so every candidate stays an invertible LU-decomposable network no
// matter where the optimizer wanders.
class CandidateFitter {
 public:
  CandidateFitter(const Counterexample& ce, int depth, uint64_t seed)
      : d_(ce.dim), depth_(depth), rng_(seed, 9) {
    for (int i = 0; i < 200; ++i) {
      std::vector<double> x(d_);
      if (ce.ball_domain) {
        double q;
        do {
          q = 0.0;
          for (double& xi : x) {
            xi = rng_.next_uniform(-ce.radius, ce.radius);
            q += xi * xi;
          }
        } while (q > ce.radius * ce.radius);
      } else {
        for (int j = 0; j < d_; ++j) x[j] = rng_.next_uniform(ce.box.lo[j], ce.box.hi[j]);
      }
      samples_.push_back(x);
      sample_targets_.push_back(ce.f(x));
    }
    int per_layer = d_ * (d_ - 1) / 2 + d_ * (d_ + 1) / 2 + d_ + d_;
    params_.resize(static_cast<size_t>(depth_) * per_layer);
    for (double& p : params_) p = rng_.next_uniform(-0.5, 0.5);
  }

  Network fit(int sweeps = 4) {
    double best = loss(params_);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      double step = 0.4 / (1 << sweep);
      for (size_t i = 0; i < params_.size(); ++i) {
        for (double dir : {step, -step}) {
          std::vector<double> trial = params_;
          trial[i] += dir;
          double l = loss(trial);
          if (l < best) {
            best = l;
            params_ = std::move(trial);
            break;
          }
        }
      }
    }
    return build(params_);
  }

 private:
  Network build(const std::vector<double>& p) const {
    Network net;
    net.input_dim = d_;
    size_t idx = 0;
    for (int l = 0; l < depth_; ++l) {
      Matrix lower = Matrix::identity(d_), upper(d_, d_);
      for (int i = 0; i < d_; ++i)
        for (int j = 0; j < i; ++j) lower(i, j) = p[idx++];
      for (int i = 0; i < d_; ++i)
        for (int j = i; j < d_; ++j) {
          double v = p[idx++];
          if (i == j) v = v >= 0.0 ? 0.2 + std::abs(v) : -0.2 - std::abs(v);
          upper(i, j) = v;
        }
      std::vector<double> bias(d_);
      for (int i = 0; i < d_; ++i) bias[i] = p[idx++];
      std::vector<Activation> acts(d_);
      for (int i = 0; i < d_; ++i)
        acts[i] = Activation{0.05 + 0.9 / (1.0 + std::exp(-p[idx++]))};  // squashed into (0.05, 0.95)
      net.layers.push_back(Layer{matmul(lower, upper), std::move(bias), std::move(acts)});
    }
    return net;
  }

  double loss(const std::vector<double>& p) const {
    Network net = build(p);
    double acc = 0.0;
    for (size_t s = 0; s < samples_.size(); ++s) {
      auto y = eval_network(net, samples_[s]);
      for (int j = 0; j < d_; ++j) acc += (y[j] - sample_targets_[s][j]) * (y[j] - sample_targets_[s][j]);
    }
    return acc;
  }

  int d_;
  int depth_;
  CounterRng rng_;
  std::vector<std::vector<double>> samples_;
  std::vector<std::vector<double>> sample_targets_;
  std::vector<double> params_;
};

inline Network fit_candidate_net(const Counterexample& ce, int depth, uint64_t seed) {
  return CandidateFitter(ce, depth, seed).fit();
}

// Max over interior grid and boundary samples of the first-coordinate gap,
// and whether it clears the counterexample's epsilon.
inline std::pair<double, bool> check_gap(const Counterexample& ce, const Network& net, int grid) {
  validate(net);
  if (net.input_dim != ce.dim || net.output_dim() != ce.dim)
    throw std::invalid_argument("check_gap: network dimension mismatch");
  double gap = 0.0;
  auto probe = [&](const std::vector<double>& x) {
    double want = ce.f(x)[0];
    double got = eval_network(net, x)[0];
    gap = std::max(gap, std::abs(want - got));
  };
  Box bounding = ce.ball_domain
                     ? Box{std::vector<double>(ce.dim, -ce.radius), std::vector<double>(ce.dim, ce.radius)}
                     : ce.box;
  detail::for_each_grid_point(bounding, grid, false, [&](const std::vector<double>& x) {
    if (ce.ball_domain) {
      double q = 0.0;
      for (double xi : x) q += xi * xi;
      if (q > ce.radius * ce.radius) return;
    }
    probe(x);
  });
  probe(std::vector<double>(ce.dim, 0.0));
  for (const auto& x : boundary_samples(ce, 2048)) probe(x);
  return {gap, gap >= ce.epsilon - 1e-9};
}

}  // namespace lunet
