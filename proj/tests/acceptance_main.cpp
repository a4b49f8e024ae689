// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Each criterion pins its tolerances in code; run with a list of
// criterion numbers to restrict (default: all).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "lunet/coding.hpp"
#include "lunet/flow.hpp"
#include "lunet/limits.hpp"
#include "lunet/lu.hpp"
#include "lunet/metrics.hpp"
#include "lunet/plc.hpp"
#include "lunet/smooth.hpp"
#include "lunet/targets.hpp"

using namespace lunet;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  std::string info;  // measured values, shown on the pass line

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double rel_gap(double got, double want) { return std::abs(got - want) / (1.0 + std::abs(want)); }

VecFn as_vecfn(const TargetFn& f) {
  return [f](const std::vector<double>& x) { return f(x); };
}

// ---------------------------------------------------------------- criterion 1
Check coding_scheme_bound() {
  Check c;
  for (const char* name : {"identity2", "swap2", "sine2", "sawtooth1", "const2"}) {
    BuiltinTarget t = find_builtin_target(name);
    for (int k = 3; k <= 6; ++k) {
      auto t0 = std::chrono::steady_clock::now();
      CodingParams p{k, k, t.dx, t.dy};
      int pts_modulus = std::min((1 << k) + 1, 129);
      double omega_hat = modulus_estimate(as_vecfn(t.fn), t.domain, std::ldexp(1.0, -k), pts_modulus);
      double bound = accuracy_bound([&](double) { return omega_hat; }, k, k);

      int grid = t.dx == 1 ? 10000 : 100;  // ~1e4 points either way
      double sup = 0.0;
      detail::for_each_grid_point(t.domain, grid, false, [&](const std::vector<double>& x) {
        auto approx = coding_scheme_exact(x, t.fn, p);
        auto want = t.fn(x);
        for (size_t i = 0; i < want.size(); ++i) sup = std::max(sup, std::abs(approx[i] - want[i]));
      });
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      c.require(sup <= bound * (1.0 + 1e-9), std::string(name) + " K=M=" + std::to_string(k) + " sup " +
                                                 std::to_string(sup) + " > bound " + std::to_string(bound));
      c.require(secs < 5.0, std::string(name) + " K=M=" + std::to_string(k) + " took " +
                                std::to_string(secs) + "s");
    }
  }
  return c;
}

// ---------------------------------------------------------------- criterion 2
Check compiled_network_gap() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  BuiltinTarget sine = find_builtin_target("sine2");
  auto [net, report] = compile(sine.fn, sine.domain, CodingParams{6, 6, 2, 2},
                               /*eps_budget=*/std::ldexp(1.0, -8), /*gamma=*/0.05, /*seed=*/7);
  VecFn net_fn = [&](const std::vector<double>& x) { return eval_network(net, x); };
  double lp = lp_norm_gap(as_vecfn(sine.fn), net_fn, sine.domain, 2.0, 100);
  c.require(lp <= report.bound + 0.02, "sine2 L2 gap " + std::to_string(lp) + " > bound " +
                                           std::to_string(report.bound) + " + 0.02");
  char buf[96];
  std::snprintf(buf, sizeof buf, "sine2 L2 gap %.4f <= bound %.4f + 0.02", lp, report.bound);
  c.info = buf;

  for (int dx = 1; dx <= 3; ++dx)
    for (int dy = 1; dy <= 3; ++dy) {
      TargetFn fn = [dx, dy](const std::vector<double>& x) {
        std::vector<double> y(dy);
        for (int j = 0; j < dy; ++j) y[j] = 0.25 + 0.5 * x[j % dx];
        return y;
      };
      auto [small, rep] = compile(fn, unit_box(dx), CodingParams{2, 2, dx, dy}, 1.0 / 256, 0.1, 3);
      NetworkStats stats = width_stats(small);
      c.require(stats.w_max == std::max({2, dx, dy}),
                "width " + std::to_string(stats.w_max) + " at dx=" + std::to_string(dx) +
                    " dy=" + std::to_string(dy));
      c.require(stats.d_min == 1, "interior dim " + std::to_string(stats.d_min) + " at dx=" +
                                      std::to_string(dx) + " dy=" + std::to_string(dy));
    }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < 60.0, "criterion took " + std::to_string(secs) + "s");
  return c;
}

// ---------------------------------------------------------------- criterion 3
Check plcsm_synthesis_exactness() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  CounterRng rng(303);
  for (int t = 0; t < 200; ++t) {
    int m = 1 + static_cast<int>(rng.next_u64() % 32);
    bool increasing = rng.next_unit() < 0.5;
    std::vector<double> slopes(m);
    for (int i = 0; i < m; ++i) {
      double mag = std::exp(rng.next_uniform(std::log(0.1), std::log(10.0)));
      slopes[i] = increasing ? mag : -mag;
      if (i > 0 && slopes[i] == slopes[i - 1]) slopes[i] *= 1.5;
    }
    std::vector<double> kinks(m - 1);
    double x = rng.next_uniform(-5.0, -4.0);
    for (int i = 0; i + 1 < m; ++i) {
      x += rng.next_uniform(0.05, 0.5);
      kinks[i] = x;
    }
    PlcsmFunction f = make_plcsm(make_plc(kinks, slopes, rng.next_uniform(-1, 1), rng.next_uniform(-2, 2)));
    Network net = synthesize_plcsm(f);
    double lo = (f.kinks.empty() ? f.anchor_x : f.kinks.front()) - 10.0;
    double hi = (f.kinks.empty() ? f.anchor_x : f.kinks.back()) + 10.0;
    int n_pts = 10000 - static_cast<int>(f.kinks.size());
    for (int i = 0; i < n_pts; ++i) {
      double p = lo + (hi - lo) * i / (n_pts - 1);
      c.require(rel_gap(eval_scalar(net, p), eval_plc(f, p)) <= 1e-9, "synthesis off at interior point");
      if (!c.ok) return c;
    }
    for (double kk : f.kinks) {
      c.require(rel_gap(eval_scalar(net, kk), eval_plc(f, kk)) <= 1e-9, "synthesis off at kink");
      if (!c.ok) return c;
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < 10.0, "criterion took " + std::to_string(secs) + "s");
  return c;
}

// ---------------------------------------------------------------- criterion 4
Check monotone_decomposition() {
  Check c;
  CounterRng rng(404);
  for (int t = 0; t < 200; ++t) {
    int m = 2 + static_cast<int>(rng.next_u64() % 31);
    std::vector<double> slopes(m);
    for (int i = 0; i < m; ++i) {
      slopes[i] = rng.next_uniform(-10.0, 10.0);
      if (i > 0 && slopes[i] == slopes[i - 1]) slopes[i] += 0.25;
    }
    std::vector<double> kinks(m - 1);
    double x = rng.next_uniform(-4.0, -3.0);
    for (int i = 0; i + 1 < m; ++i) {
      x += rng.next_uniform(0.05, 0.5);
      kinks[i] = x;
    }
    PlcFunction f = make_plc(kinks, slopes, rng.next_uniform(-1, 1), rng.next_uniform(-2, 2));
    auto [dec, inc] = monotone_decompose(f, 1.0);
    c.require(dec.direction == Direction::decreasing, "dec direction");
    c.require(inc.direction == Direction::increasing, "inc direction");
    for (double s : dec.slopes) c.require(s < 0.0, "dec slope sign");
    for (double s : inc.slopes) c.require(s > 0.0, "inc slope sign");
    double lo = f.kinks.front() - 10.0, hi = f.kinks.back() + 10.0;
    for (int i = 0; i < 64; ++i) {
      double p = lo + (hi - lo) * i / 63.0;
      double want = eval_plc(f, p);
      c.require(rel_gap(eval_plc(dec, p) + eval_plc(inc, p), want) <= 1e-12, "sum residual");
      if (!c.ok) return c;
    }
  }
  return c;
}

// ---------------------------------------------------------------- criterion 5
Check decoder_exactness() {
  Check c;
  for (int dy : {2, 3}) {
    Network dec = build_decoder_net_relu(2, dy);
    int64_t codes = int64_t{1} << (2 * dy);
    std::vector<std::vector<double>> probes;
    for (int64_t j = 0; j < codes; ++j) {
      double code = std::ldexp(static_cast<double>(j), -2 * dy);
      probes.push_back({code});
      auto got = eval_network(dec, probes.back());
      auto want = decode_exact(code, 2, dy);
      for (int i = 0; i < dy; ++i)
        c.require(got[i] == want[i], "ReLU decoder not exact at code " + std::to_string(code));
    }
    Network leaky = relu_to_leaky(dec, probes, 1e-6);
    double gap = 0.0;
    for (const auto& p : probes) {
      auto a = eval_network(dec, p);
      auto b = eval_network(leaky, p);
      for (int i = 0; i < dy; ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
    }
    c.require(gap < 1e-5, "leaky decoder probe gap " + std::to_string(gap));
  }
  return c;
}

// ---------------------------------------------------------------- criterion 6
Check lu_suite() {
  Check c;
  CounterRng rng(606);
  int done = 0;
  while (done < 500) {
    int d = 1 + static_cast<int>(rng.next_u64() % 6);
    Matrix a(d, d);
    for (double& v : a.a) v = rng.next_uniform(-1.0, 1.0);
    auto res = lu_decompose(a);
    if (!std::holds_alternative<LuFactors>(res)) continue;
    ++done;
    const auto& f = std::get<LuFactors>(res);
    Matrix prod = matmul(f.lower, f.upper);
    double resid = 0.0;
    for (size_t i = 0; i < prod.a.size(); ++i) resid = std::max(resid, std::abs(prod.a[i] - a.a[i]));
    c.require(resid <= 1e-10 * (1.0 + max_norm(a)), "factorization residual " + std::to_string(resid));

    auto again = lu_decompose(prod);
    c.require(std::holds_alternative<LuFactors>(again), "refactorization failed");
    if (std::holds_alternative<LuFactors>(again)) {
      const auto& g = std::get<LuFactors>(again);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          c.require(std::abs(g.lower(i, j) - f.lower(i, j)) <= 1e-10 * (1.0 + std::abs(f.lower(i, j))),
                    "lower factor not reproduced");
          c.require(std::abs(g.upper(i, j) - f.upper(i, j)) <= 1e-10 * (1.0 + std::abs(f.upper(i, j))),
                    "upper factor not reproduced");
        }
    }
    if (!c.ok) return c;
  }
  // density on forced-singular leading minors
  for (int t = 0; t < 500; ++t) {
    int d = 1 + static_cast<int>(rng.next_u64() % 6);
    Matrix a(d, d);
    for (double& v : a.a) v = rng.next_uniform(-1.0, 1.0);
    int k = 1 + static_cast<int>(rng.next_u64() % d);
    if (k == 1) {
      a(0, 0) = 0.0;
    } else {
      for (int j = 0; j < k; ++j) {
        double s = 0.0;
        for (int i = 0; i + 1 < k; ++i) s += a(i, j);
        a(k - 1, j) = s;
      }
    }
    Matrix fixed = nearest_lu(a, 1e-4);
    c.require(std::holds_alternative<LuFactors>(lu_decompose(fixed)), "nearest_lu not decomposable");
    Matrix diff(d, d);
    for (size_t i = 0; i < diff.a.size(); ++i) diff.a[i] = fixed.a[i] - a.a[i];
    c.require(op_norm_estimate(diff) < 1e-4, "nearest_lu moved too far");
    if (!c.ok) return c;
  }
  return c;
}

// ---------------------------------------------------------------- criterion 7
Check inversion_and_logdet() {
  Check c;
  CounterRng rng(707);
  for (int t = 0; t < 100; ++t) {
    int d = 1 + static_cast<int>(rng.next_u64() % 4);
    int depth = 1 + static_cast<int>(rng.next_u64() % 6);
    Network net;
    net.input_dim = d;
    for (int l = 0; l < depth; ++l) {
      Matrix lower = Matrix::identity(d), upper(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < i; ++j) lower(i, j) = rng.next_uniform(-0.8, 0.8);
        for (int j = i + 1; j < d; ++j) upper(i, j) = rng.next_uniform(-0.8, 0.8);
        double diag = rng.next_uniform(0.5, 1.5);
        upper(i, i) = rng.next_unit() < 0.5 ? -diag : diag;
      }
      std::vector<double> b(d);
      for (double& v : b) v = rng.next_uniform(-0.5, 0.5);
      std::vector<Activation> acts(d);
      for (auto& a : acts) a = Activation{rng.next_uniform(0.15, 1.0)};
      net.layers.push_back(Layer{matmul(lower, upper), std::move(b), std::move(acts)});
    }
    Network inv = invert_lu_network(net);
    std::vector<double> x(d);
    for (int i = 0; i < 10000 / 100; ++i) {  // 100 points per net, 10^4 overall
      double xmax = 0.0;
      for (double& xi : x) {
        xi = rng.next_uniform(-5.0, 5.0);
        xmax = std::max(xmax, std::abs(xi));
      }
      auto back = eval_network(inv, eval_network(net, x));
      for (int j = 0; j < d; ++j)
        c.require(std::abs(back[j] - x[j]) <= 1e-8 * (1.0 + xmax), "round trip error");
      if (!c.ok) return c;
    }
    for (int i = 0; i < 100; ++i) {
      for (double& xi : x) xi = rng.next_uniform(-2.0, 2.0);
      auto [y, logdet] = forward_logdet(net, x);
      double h = 1e-6;
      Matrix jac(d, d);
      for (int j = 0; j < d; ++j) {
        std::vector<double> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        auto yp = eval_network(net, xp);
        auto ym = eval_network(net, xm);
        for (int r = 0; r < d; ++r) jac(r, j) = (yp[r] - ym[r]) / (2.0 * h);
      }
      double det = std::abs(detail::det_partial_pivot(jac));
      c.require(std::abs(std::exp(logdet) - det) <= 1e-4 * det, "logdet vs finite differences");
      if (!c.ok) return c;
    }
  }
  return c;
}

// ---------------------------------------------------------------- criterion 8
Check duap_demo_criterion() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  CodingParams p1;
  p1.K = 9;  // 512 knots
  FlowReport ks_rep = duap_demo(targets::mix2_1d(), p1, make_box({-4.0}, {4.0}), 100000, 7);
  c.require(ks_rep.value <= 0.02, "1d mixture KS " + std::to_string(ks_rep.value));

  std::vector<double> values;
  double baseline = 0.0;
  for (int k = 3; k <= 6; ++k) {
    CodingParams p{k, k, 2, 2};
    FlowReport rep = duap_demo(targets::gauss_corr_2d(), p, make_box({-4.0, -4.0}, {4.0, 4.0}), 100000, 7);
    values.push_back(rep.value);
    baseline = rep.baseline;
    c.require(rep.clip_fraction < 0.01, "clip fraction " + std::to_string(rep.clip_fraction));
  }
  c.require(values.back() <= 1.5 * baseline, "K=M=6 energy " + std::to_string(values.back()) +
                                                 " > 1.5 x baseline " + std::to_string(baseline));
  char buf[128];
  std::snprintf(buf, sizeof buf, "ks %.4f; energy %.3f/%.3f/%.3f/%.3f vs baseline %.3f", ks_rep.value,
                values[0], values[1], values[2], values[3], baseline);
  c.info = buf;
  for (size_t i = 1; i < values.size(); ++i)
    c.require(values[i] <= 1.2 * values[i - 1] + baseline,
              "energy not non-increasing at step " + std::to_string(i));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < 180.0, "criterion took " + std::to_string(secs) + "s");
  return c;
}

// ---------------------------------------------------------------- criterion 9
Check smoothing_suite() {
  Check c;
  for (int n : {4, 16, 64, 256}) {
    SmoothedActivation act{0.5, n};
    double sup = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      double x = -10.0 + 20.0 * i / 2000.0;
      sup = std::max(sup, std::abs(smoothed_lrelu_eval(act, x) - (x < 0 ? 0.5 * x : x)));
    }
    for (int i = 0; i <= 400; ++i) {
      double x = (-1.0 + 2.0 * i / 400.0) / n;
      sup = std::max(sup, std::abs(smoothed_lrelu_eval(act, x) - (x < 0 ? 0.5 * x : x)));
    }
    c.require(sup <= 1.0 / n, "smoothing gap " + std::to_string(sup) + " at n=" + std::to_string(n));
  }
  SmoothedActivation act{0.35, 8};
  CounterRng rng(909);
  for (int i = 0; i < 500; ++i) {
    double x = rng.next_uniform(-2.0, 2.0);
    double d = smoothed_lrelu_deriv(act, x);
    c.require(d >= act.alpha && d <= 1.0, "derivative outside [alpha, 1]");
    double h = 1e-5;
    double fd = (smoothed_lrelu_eval(act, x + h) - smoothed_lrelu_eval(act, x - h)) / (2 * h);
    c.require(std::abs(d - fd) <= 1e-6, "derivative vs finite differences");
    double y = smoothed_lrelu_eval(act, x);
    c.require(std::abs(invert_smoothed_scalar(act, y) - x) <= 1e-10, "bijection round trip");
    if (!c.ok) return c;
  }
  return c;
}

// --------------------------------------------------------------- criterion 10
Check lower_bound_demo() {
  Check c;
  Counterexample ce = gaussian_counterexample(2, 1.0);
  double analytic = 0.5 * (1.0 / (2.0 * std::numbers::pi)) * (1.0 - std::exp(-0.5));
  c.require(std::abs(ce.epsilon - analytic) <= 1e-15, "epsilon formula");
  c.require(std::abs(ce.epsilon - 0.03132) <= 1e-4, "epsilon value");
  double sampled = 1e300;
  for (const auto& x : boundary_samples(ce, 1000)) sampled = std::min(sampled, std::abs(ce.f(x)[0] - ce.level));
  c.require(std::abs(0.5 * sampled - ce.epsilon) <= 1e-6, "boundary sample agreement");

  CounterRng rng(1010);
  for (int t = 0; t < 200; ++t) {
    int depth = 1 + static_cast<int>(rng.next_u64() % 6);
    Network net;
    net.input_dim = 2;
    for (int l = 0; l < depth; ++l) {
      Matrix lower = Matrix::identity(2), upper(2, 2);
      lower(1, 0) = rng.next_uniform(-1.0, 1.0);
      upper(0, 1) = rng.next_uniform(-1.0, 1.0);
      for (int i = 0; i < 2; ++i) {
        double diag = rng.next_uniform(0.4, 1.6);
        upper(i, i) = rng.next_unit() < 0.5 ? -diag : diag;
      }
      std::vector<double> b{rng.next_uniform(-1, 1), rng.next_uniform(-1, 1)};
      std::vector<Activation> acts{Activation{rng.next_uniform(0.1, 0.95)},
                                   Activation{rng.next_uniform(0.1, 0.95)}};
      net.layers.push_back(Layer{matmul(lower, upper), std::move(b), std::move(acts)});
    }
    auto [gap, ok] = check_gap(ce, net, 21);
    c.require(ok, "random candidate beat epsilon (gap " + std::to_string(gap) + ")");
    if (!c.ok) return c;
  }
  for (int t = 0; t < 50; ++t) {
    Network net = fit_candidate_net(ce, 2 + t % 3, 5000 + t);
    auto [gap, ok] = check_gap(ce, net, 21);
    c.require(ok, "fitted candidate beat epsilon (gap " + std::to_string(gap) + ")");
    if (!c.ok) return c;
  }

  // 1d case: exhaustive monotone value triples on the probe set {-1, 0, 1}
  Counterexample one = square_counterexample_1d();
  c.require(one.epsilon == 0.5, "1d epsilon");
  double step = 0.02;
  for (double a = -2.0; a <= 2.0 + 1e-12; a += step)
    for (double b = a; b <= 2.0 + 1e-12; b += step)
      for (double cc = b; cc <= 2.0 + 1e-12; cc += step) {
        double inc_gap = std::max({std::abs(a - 1.0), std::abs(b), std::abs(cc - 1.0)});
        double dec_gap = std::max({std::abs(cc - 1.0), std::abs(b), std::abs(a - 1.0)});
        if (inc_gap < 0.5 - 1e-12 || dec_gap < 0.5 - 1e-12) {
          c.require(false, "monotone candidate under 1/2 on the probe triple");
          return c;
        }
      }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  struct Criterion {
    int number;
    const char* title;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "coding-scheme accuracy bound", coding_scheme_bound},
      {2, "compiled-network L2 gap and width law", compiled_network_gap},
      {3, "piecewise-linear synthesis exactness", plcsm_synthesis_exactness},
      {4, "monotone decomposition", monotone_decomposition},
      {5, "decoder exactness and leaky substitution", decoder_exactness},
      {6, "LU factorization, uniqueness and density", lu_suite},
      {7, "inversion and log-det Jacobian", inversion_and_logdet},
      {8, "distributional approximation demo", duap_demo_criterion},
      {9, "mollified activation suite", smoothing_suite},
      {10, "width lower-bound demonstration", lower_bound_demo},
  };

  int failures = 0;
  for (const auto& crit : criteria) {
    if (!selected.empty() && !selected.count(crit.number)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Check result = crit.run();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (result.ok) {
      if (result.info.empty())
        std::printf("[PASS] criterion %2d: %s (%.1fs)\n", crit.number, crit.title, secs);
      else
        std::printf("[PASS] criterion %2d: %s (%.1fs) -- %s\n", crit.number, crit.title, secs,
                    result.info.c_str());
    } else {
      std::printf("[FAIL] criterion %2d: %s (%.1fs) -- %s\n", crit.number, crit.title, secs,
                  result.detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
