#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lunet/metrics.hpp"
#include "lunet/network.hpp"
#include "lunet/plc.hpp"
#include "lunet/rng.hpp"

namespace lunet {

// Grid resolutions of the coding scheme. The bit budgets keep every code in
// C_{K*dx} and C_{M*dy} exactly representable as a 64-bit float, so encode
// and decode are exact integer arithmetic in disguise.
struct CodingParams {
  int K = 4;
  int M = 4;
  int dx = 1;
  int dy = 1;
};

inline void validate(const CodingParams& p) {
  if (p.K < 1 || p.M < 1 || p.dx < 1 || p.dy < 1)
    throw std::invalid_argument("CodingParams: K, M, dx, dy must be positive");
  if (p.K * p.dx > 52 || p.M * p.dy > 52)
    throw std::invalid_argument("CodingParams: K*dx and M*dy must stay within 52 bits");
}

// Strips excluded from the uniform quantizer guarantee: one strip of width
// beta just below every grid step. Total length stays below gamma. The
// strips are per coordinate; a point of the unit cube is excluded when any
// coordinate falls into one.
struct ExclusionReport {
  double gamma = 0.0;
  double beta = 0.0;
  std::vector<std::pair<double, double>> strips;

  bool contains(double x) const {
    for (auto [lo, hi] : strips)
      if (x >= lo && x <= hi) return true;
    return false;
  }
  bool excluded(const std::vector<double>& unit_point) const {
    for (double c : unit_point)
      if (contains(c)) return true;
    return false;
  }
  double measure_1d() const {
    double m = 0.0;
    for (auto [lo, hi] : strips) m += hi - lo;
    return m;
  }
  double measure(int dims) const { return 1.0 - std::pow(1.0 - measure_1d(), dims); }
};

// q_n(x): largest grid value in C_n = {0, 2^-n, ..., 1 - 2^-n} not above x.
// Inputs outside [0,1] are clamped (the rescaling step of the compiler
// prevents them); `clamped` reports when that happened.
inline double quantize(double x, int n, bool* clamped = nullptr) {
  if (clamped) *clamped = x < 0.0 || x > 1.0;
  double cells = std::ldexp(1.0, n);
  double idx = std::floor(x * cells);
  idx = std::max(0.0, std::min(idx, cells - 1.0));
  return std::ldexp(idx, -n);
}

// e_K(x) = sum_i 2^{-(i-1)K} q_K(x_i); exact under the CodingParams budget.
inline double encode_exact(const std::vector<double>& x, int K) {
  double acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) acc += std::ldexp(quantize(x[i], K), -static_cast<int>(i) * K);
  return acc;
}

// Inverse of encode on the grid: bit extraction on round(c * 2^{M*dy}).
inline std::vector<double> decode_exact(double c, int M, int dy) {
  double scaled = std::ldexp(c, M * dy);
  double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-9 * std::max(1.0, std::abs(scaled)))
    throw std::invalid_argument("decode_exact: value is not on the code grid");
  auto u = static_cast<uint64_t>(rounded);
  if (rounded < 0.0 || u >= (uint64_t{1} << (M * dy)))
    throw std::invalid_argument("decode_exact: code out of range");
  std::vector<double> v(dy);
  uint64_t mask = (uint64_t{1} << M) - 1;
  for (int i = 0; i < dy; ++i) v[i] = std::ldexp(static_cast<double>((u >> ((dy - 1 - i) * M)) & mask), -M);
  return v;
}

using TargetFn = std::function<std::vector<double>(const std::vector<double>&)>;

// m(c): recover the input grid point from the code, apply the target,
// quantize the result componentwise and encode it again.
inline double memorize_exact(double c, const TargetFn& fstar, int K, int M, int dx, int dy) {
  std::vector<double> v = decode_exact(c, K, dx);
  std::vector<double> y = fstar(v);
  if (static_cast<int>(y.size()) != dy) throw std::invalid_argument("memorize_exact: target has wrong output dim");
  for (double& yi : y) yi = quantize(yi, M);
  return encode_exact(y, M);
}

// The full scheme d_M(m(e_K(x))): piecewise constant on the K-grid cells,
// with sup error omega_fstar(2^-K) + 2^-M on the unit cube.
inline std::vector<double> coding_scheme_exact(const std::vector<double>& x, const TargetFn& fstar,
                                               const CodingParams& p) {
  validate(p);
  if (static_cast<int>(x.size()) != p.dx) throw std::invalid_argument("coding_scheme_exact: input dim mismatch");
  return decode_exact(memorize_exact(encode_exact(x, p.K), fstar, p.K, p.M, p.dx, p.dy), p.M, p.dy);
}

inline double accuracy_bound(const std::function<double(double)>& omega_hat, int K, int M) {
  return omega_hat(std::ldexp(1.0, -K)) + std::ldexp(1.0, -M);
}

// Width-1 strictly increasing net that equals q_K on the grid C_K, stays
// within eps of q_K outside the exclusion strips, and maps [0,1] (and the
// off-strip set) into itself. Flat pieces of slope alpha/(2^-K - beta)
// alternate with steep recovery ramps of width beta = gamma * 2^-K / 2;
// alpha takes half its feasibility bound min(eps, 2^-K - beta).
inline std::pair<Network, ExclusionReport> build_quantizer_net(int K, double eps, double gamma) {
  if (!(eps > 0.0)) throw std::invalid_argument("build_quantizer_net: eps must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("build_quantizer_net: gamma must be in (0,1)");
  double step = std::ldexp(1.0, -K);
  double beta = gamma * step / 2.0;
  double alpha = std::min(eps, step - beta) / 2.0;
  if (!(beta > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("build_quantizer_net: (eps, gamma) infeasible at this K");

  int cells = 1 << K;
  double flat = alpha / (step - beta);
  double steep = (step - alpha) / beta;
  std::vector<double> kinks, slopes;
  ExclusionReport report;
  report.gamma = gamma;
  report.beta = beta;
  for (int i = 0; i < cells; ++i) {
    double cell_lo = i * step;
    slopes.push_back(flat);
    kinks.push_back(cell_lo + step - beta);
    slopes.push_back(steep);
    if (i + 1 < cells) kinks.push_back(cell_lo + step);
    report.strips.emplace_back(cell_lo + step - beta, cell_lo + step);
  }
  PlcsmFunction f = make_plcsm(make_plc(std::move(kinks), std::move(slopes), 0.0, 0.0));
  return {synthesize_plcsm(f), report};
}

// dx quantizer chains side by side, then the affine row
// (1, 2^-K, ..., 2^-(dx-1)K). Exact on the full grid C_K^dx, within eps of
// the exact encoder off the strips, with outputs in [0, 2).
inline std::pair<Network, ExclusionReport> build_encoder_net(int K, int dx, double eps, double gamma) {
  if (dx < 1) throw std::invalid_argument("build_encoder_net: dx must be positive");
  double gamma_bar = 0.5 * gamma / dx;
  double row_sum = 0.0;
  for (int i = 0; i < dx; ++i) row_sum += std::ldexp(1.0, -i * K);
  auto [chain, report] = build_quantizer_net(K, eps / (2.0 * row_sum), gamma_bar);
  report.gamma = gamma;

  Network net = stack_parallel(std::vector<Network>(dx, chain));
  Matrix row(1, dx);
  for (int i = 0; i < dx; ++i) row(0, i) = std::ldexp(1.0, -i * K);
  net = append_layer(std::move(net), make_layer(std::move(row), {0.0}, 1.0));
  return {std::move(net), report};
}

// Exact width-2 realization of the memorizer: tabulate the memorizer on all
// of C_{K*dx}, interpolate with fit_points, split into monotone halves, run
// the two synthesized strands in parallel and sum them.
inline Network build_memorizer_net(const TargetFn& fstar, int K, int M, int dx, int dy) {
  validate(CodingParams{K, M, dx, dy});
  int bits = K * dx;
  if (bits > 22) throw std::invalid_argument("build_memorizer_net: 2^(K*dx) table would be too large");
  int64_t count = int64_t{1} << bits;
  std::vector<std::pair<double, double>> table;
  table.reserve(count);
  for (int64_t j = 0; j < count; ++j) {
    double c = std::ldexp(static_cast<double>(j), -bits);
    table.emplace_back(c, memorize_exact(c, fstar, K, M, dx, dy));
  }
  auto [dec, inc] = monotone_decompose(fit_points(table), 1.0);
  Network fan = fan_parallel({synthesize_plcsm(dec), synthesize_plcsm(inc)});
  return append_layer(std::move(fan), make_layer(Matrix{{1.0, 1.0}}, {0.0}, 1.0));
}

namespace detail {

inline Layer relu_layer(Matrix w, std::vector<double> b) { return make_layer(std::move(w), std::move(b), 0.0); }

// Width-1 ReLU chain of the given depth; exact on nonnegative carries.
inline Network relu_carry(int depth) {
  Network n;
  n.input_dim = 1;
  for (int i = 0; i < depth; ++i) n.layers.push_back(scalar_layer(1.0, 0.0, 0.0));
  return n;
}

}  // namespace detail

// ReLU net computing x -> (q_M(x), 2^M (x - q_M(x))) away from the ramp
// strips (i 2^-M - delta, i 2^-M). The input is clamped to [0,1] first, then
// a min-max string of 2^M - 1 steps accumulates the quantization while a
// second unit carries x; max(h, acc) = h + relu(acc - h) and
// min(a, acc) = a - relu(a - acc) keep every intermediate value nonnegative.
inline Network build_bit_extract_net(int M, double delta) {
  double step = std::ldexp(1.0, -M);
  if (!(delta > 0.0 && delta < step))
    throw std::invalid_argument("build_bit_extract_net: requires 0 < delta < 2^-M");
  Network net;
  net.input_dim = 1;
  // clamp zeta(x) = 1 - relu(1 - relu(x)), folded into the fan-out layer
  net.layers.push_back(detail::relu_layer(Matrix{{1.0}}, {0.0}));
  net.layers.push_back(detail::relu_layer(Matrix{{-1.0}}, {1.0}));
  net.layers.push_back(detail::relu_layer(Matrix{{-1.0}, {0.0}}, {1.0, 0.0}));  // state (zeta, 0)

  double ramp = step / delta;
  int steps = (1 << M) - 1;
  for (int l = 1; l <= steps; ++l) {
    double h_bias = ramp * (delta - l * step) + (l - 1) * step;  // h_l(x) = ramp*x + h_bias
    double cap = l * step;
    net.layers.push_back(detail::relu_layer(Matrix{{1.0, 0.0}, {-ramp, 1.0}}, {0.0, -h_bias}));
    net.layers.push_back(detail::relu_layer(Matrix{{1.0, 0.0}, {ramp, 1.0}}, {0.0, h_bias}));
    net.layers.push_back(detail::relu_layer(Matrix{{1.0, 0.0}, {0.0, -1.0}}, {0.0, cap}));
    net.layers.push_back(detail::relu_layer(Matrix{{1.0, 0.0}, {0.0, -1.0}}, {0.0, cap}));
  }
  double scale = std::ldexp(1.0, M);
  net.layers.push_back(detail::relu_layer(Matrix{{0.0, 1.0}, {scale, -scale}}, {0.0, 0.0}));
  return net;
}

// Exact ReLU decoder: stage i carries the i-1 finished coordinates through
// ReLU identities and bit-extracts the next one from the running remainder.
// Equals decode_exact on every code in C_{M*dy}; range within [0,1]^dy.
inline Network build_decoder_net_relu(int M, int dy) {
  validate(CodingParams{1, M, 1, dy});
  if (dy == 1) {
    // just the clamp; decode is the identity on C_M
    Network net;
    net.input_dim = 1;
    net.layers.push_back(detail::relu_layer(Matrix{{1.0}}, {0.0}));
    net.layers.push_back(detail::relu_layer(Matrix{{-1.0}}, {1.0}));
    net.layers.push_back(detail::relu_layer(Matrix{{-1.0}}, {1.0}));
    return net;
  }
  double delta = std::ldexp(1.0, -M * dy) / 2.0;
  Network extract = build_bit_extract_net(M, delta);
  Network net = extract;
  for (int i = 2; i < dy; ++i) {
    std::vector<Network> blocks(i - 1, detail::relu_carry(extract.depth()));
    blocks.push_back(extract);
    net = compose(net, stack_parallel(blocks, /*pad_alpha=*/0.0));
  }
  return net;
}

// Swaps every ReLU unit for a leaky unit with one shared slope, chosen so
// that the worst-case drift over the probe set stays below delta after
// downstream Lipschitz amplification: per layer l with most negative probed
// pre-activation r_l and downstream amplification D_l, the layer's
// contribution is at most alpha |r_l| D_l.
inline Network relu_to_leaky(const Network& net, const std::vector<std::vector<double>>& probes,
                             double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("relu_to_leaky: delta must be positive");
  bool has_relu = false;
  for (const Layer& l : net.layers)
    for (const Activation& a : l.acts) has_relu = has_relu || a.alpha == 0.0;
  if (!has_relu) return net;

  int L = net.depth();
  std::vector<double> most_negative(L, 0.0);
  for (const auto& x : probes) {
    eval_network_hooked(net, x, [&](size_t l, std::span<const double> pre) {
      const Layer& layer = net.layers[l];
      for (size_t i = 0; i < pre.size(); ++i)
        if (layer.acts[i].alpha == 0.0) most_negative[l] = std::min(most_negative[l], pre[i]);
    });
  }
  std::vector<double> downstream(L, 1.0);
  for (int l = L - 2; l >= 0; --l)
    downstream[l] = downstream[l + 1] * std::max(1.0, inf_norm(net.layers[l + 1].weight));

  double alpha = 0.5;
  for (int l = 0; l < L; ++l)
    if (most_negative[l] < 0.0) alpha = std::min(alpha, delta / (L * -most_negative[l] * downstream[l]));

  Network out = net;
  for (Layer& l : out.layers)
    for (Activation& a : l.acts)
      if (a.alpha == 0.0) a.alpha = alpha;
  return out;
}

struct CompileReport {
  double bound = 0.0;                  // omega_hat(s_V 2^-K) + s_W 2^-M, original units
  double grid_gap_lp = 0.0;            // measured L2 gap over the domain
  double grid_gap_sup_offstrips = 0.0; // measured sup gap away from the strips
  double gamma = 0.0;
  ExclusionReport strips;              // in unit-cube coordinates, per input dim
  Box domain{{0.0}, {1.0}};
  std::vector<double> range_lo;        // output rescaling W: y -> range_lo + range_scale*y
  std::vector<double> range_scale;
  double decoder_probe_gap = 0.0;      // leaky decoder vs ReLU decoder on probes
  CodingParams params;

  bool excluded(const std::vector<double>& x) const {
    std::vector<double> u(x.size());
    for (size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - domain.lo[i]) / (domain.hi[i] - domain.lo[i]);
    return strips.excluded(u);
  }
};

namespace detail {

// Dense sampling of the target range with seeded jitter, padded by 5%.
inline void estimate_range(const TargetFn& fstar, const Box& domain, int dy, uint64_t seed,
                           std::vector<double>& lo, std::vector<double>& scale) {
  int d = domain.dim();
  int pts = d <= 2 ? 33 : 17;
  CounterRng rng(seed, /*stream=*/5);
  lo.assign(dy, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dy, -std::numeric_limits<double>::infinity());
  std::vector<int> idx(d, 0);
  std::vector<double> x(d);
  for (;;) {
    for (int i = 0; i < d; ++i) {
      double t = static_cast<double>(idx[i]) / (pts - 1);
      if (idx[i] > 0 && idx[i] < pts - 1) t += rng.next_uniform(-0.4, 0.4) / (pts - 1);
      x[i] = domain.lo[i] + t * (domain.hi[i] - domain.lo[i]);
    }
    std::vector<double> y = fstar(x);
    if (static_cast<int>(y.size()) != dy) throw std::invalid_argument("compile: target output dim mismatch");
    for (int j = 0; j < dy; ++j) {
      lo[j] = std::min(lo[j], y[j]);
      hi[j] = std::max(hi[j], y[j]);
    }
    int i = 0;
    while (i < d && ++idx[i] == pts) idx[i++] = 0;
    if (i == d) break;
  }
  scale.assign(dy, 1.0);
  for (int j = 0; j < dy; ++j) {
    double span = hi[j] - lo[j];
    if (span <= 0.0) {  // constant component: unit scale keeps W invertible
      lo[j] -= 0.5;
      scale[j] = 1.0;
    } else {
      lo[j] -= 0.05 * span;
      scale[j] = 1.1 * span;
    }
  }
}

}  // namespace detail

// Compiles an evaluable target on a box into a leaky-ReLU network of width
// exactly max{2, dx, dy} with a scalar bottleneck: rescale the domain into
// the unit cube, run encoder -> memorizer -> decoder, rescale the output,
// and finally swap the remaining identity units for a true leaky slope
// close enough to 1 that the measured drift fits the budget.
inline std::pair<Network, CompileReport> compile(const TargetFn& fstar, const Box& domain,
                                                 const CodingParams& params, double eps_budget,
                                                 double gamma, uint64_t seed,
                                                 std::optional<double> fixed_alpha = std::nullopt) {
  validate(params);
  if (domain.dim() != params.dx) throw std::invalid_argument("compile: domain dimension != dx");
  if (!(eps_budget > 0.0) || !(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("compile: need eps_budget > 0 and gamma in (0,1)");

  CompileReport report;
  report.params = params;
  report.gamma = gamma;
  report.domain = domain;

  // (1) affine rescaling V into the unit cube and W onto the estimated range
  detail::estimate_range(fstar, domain, params.dy, seed, report.range_lo, report.range_scale);
  Matrix v_w(params.dx, params.dx);
  std::vector<double> v_b(params.dx);
  for (int i = 0; i < params.dx; ++i) {
    double span = domain.hi[i] - domain.lo[i];
    v_w(i, i) = 1.0 / span;
    v_b[i] = -domain.lo[i] / span;
  }
  const auto& range_lo = report.range_lo;
  const auto& range_scale = report.range_scale;
  TargetFn unit_target = [&fstar, &domain, &range_lo, &range_scale, &params](const std::vector<double>& u) {
    std::vector<double> x(params.dx);
    for (int i = 0; i < params.dx; ++i) x[i] = domain.lo[i] + u[i] * (domain.hi[i] - domain.lo[i]);
    std::vector<double> y = fstar(x);
    for (int j = 0; j < params.dy; ++j) y[j] = std::clamp((y[j] - range_lo[j]) / range_scale[j], 0.0, 1.0);
    return y;
  };

  // (2) encoder, memorizer, decoder. The encoder eps shrinks with both code
  // grids: the memorizer's inter-code ramps amplify the quantizer error by
  // up to 2^(K dx), and the decoder's bit extraction by another 2^(M dy).
  // This also keeps perturbed memorizer outputs clear of the decoder's ramp
  // strips (width 2^-(M dy + 1)).
  double eps_enc = eps_budget * std::ldexp(1.0, -(params.K * params.dx + params.M * params.dy + 3));
  if (eps_enc < 1e-13)
    throw std::runtime_error("compile: eps budget infeasible at these grid sizes");
  auto [encoder, strips] = build_encoder_net(params.K, params.dx, eps_enc, gamma);
  report.strips = strips;
  Network memorizer = build_memorizer_net(unit_target, params.K, params.M, params.dx, params.dy);
  Network decoder_relu = build_decoder_net_relu(params.M, params.dy);

  int code_bits = params.M * params.dy;
  std::vector<std::vector<double>> probes;
  int64_t codes = int64_t{1} << code_bits;
  int64_t probe_stride = std::max<int64_t>(1, codes / (int64_t{1} << 16));
  for (int64_t j = 0; j < codes; j += probe_stride)
    probes.push_back({std::ldexp(static_cast<double>(j), -code_bits)});
  for (int j = 0; j <= 4096; ++j) probes.push_back({static_cast<double>(j) / 4096.0});
  double delta_dec = std::min(eps_budget / 4.0, 1e-6);
  Network decoder = relu_to_leaky(decoder_relu, probes, delta_dec);
  double probe_gap = 0.0;
  for (const auto& x : probes) {
    auto a = eval_network(decoder, x);
    auto b = eval_network(decoder_relu, x);
    for (size_t i = 0; i < a.size(); ++i) probe_gap = std::max(probe_gap, std::abs(a[i] - b[i]));
  }
  report.decoder_probe_gap = probe_gap;

  // (3) assemble V -> encoder -> memorizer -> decoder -> W
  Network net;
  net.input_dim = params.dx;
  net.layers.push_back(make_layer(std::move(v_w), std::move(v_b), 1.0));
  net = compose(net, encoder);
  net = compose(net, memorizer);
  net = compose(net, decoder);
  Matrix w_w(params.dy, params.dy);
  for (int j = 0; j < params.dy; ++j) w_w(j, j) = report.range_scale[j];
  net = append_layer(std::move(net), make_layer(std::move(w_w), report.range_lo, 1.0));

  // (4) eliminate the identity units. The substitution drift accumulates
  // over the memorizer strands and gets amplified by the decoder's bit
  // extraction, so alpha walks from the 1 - 2^-20 default toward 1 until
  // the measured drift at code corners fits the budget; a caller-pinned
  // alpha skips the search.
  if (fixed_alpha) {
    net = substitute_identity(std::move(net), *fixed_alpha);
  } else {
    std::vector<std::vector<double>> corners;
    std::vector<std::vector<double>> exact_vals;
    int64_t n_codes = int64_t{1} << (params.K * params.dx);
    int64_t stride = std::max<int64_t>(1, n_codes / 128);
    for (int64_t j = 0; j < n_codes; j += stride) {
      double c = std::ldexp(static_cast<double>(j), -(params.K * params.dx));
      std::vector<double> u = decode_exact(c, params.K, params.dx);
      std::vector<double> x(params.dx), y = coding_scheme_exact(u, unit_target, params);
      for (int i = 0; i < params.dx; ++i) x[i] = domain.lo[i] + u[i] * (domain.hi[i] - domain.lo[i]);
      for (int jj = 0; jj < params.dy; ++jj) y[jj] = report.range_lo[jj] + report.range_scale[jj] * y[jj];
      corners.push_back(std::move(x));
      exact_vals.push_back(std::move(y));
    }
    double tol_sub = eps_budget / 8.0;
    for (double s : report.range_scale) tol_sub = std::max(tol_sub, eps_budget * s / 8.0);
    Network best;
    for (int k = 20; k <= 48; k += 4) {
      best = substitute_identity(net, 1.0 - std::ldexp(1.0, -k));
      double drift = 0.0;
      for (size_t i = 0; i < corners.size(); ++i) {
        auto got = eval_network(best, corners[i]);
        for (int jj = 0; jj < params.dy; ++jj)
          drift = std::max(drift, std::abs(got[jj] - exact_vals[i][jj]));
      }
      if (drift <= tol_sub) break;
    }
    net = std::move(best);
  }

  // theoretical bound and measured gaps, in original units. The modulus
  // lattice must resolve the radius s_v 2^-K, i.e. needs at least 2^K + 1
  // knots per axis.
  double s_v = 0.0, s_w = 0.0;
  for (int i = 0; i < params.dx; ++i) s_v = std::max(s_v, domain.hi[i] - domain.lo[i]);
  for (int j = 0; j < params.dy; ++j) s_w = std::max(s_w, report.range_scale[j]);
  int pts = params.dx <= 2 ? 64 : 16;
  int pts_modulus = std::min((1 << params.K) + 1, params.dx == 1 ? 4097 : params.dx == 2 ? 129 : 17);
  VecFn target_fn = [&fstar](const std::vector<double>& x) { return fstar(x); };
  double omega = modulus_estimate(target_fn, domain, s_v * std::ldexp(1.0, -params.K), pts_modulus);
  report.bound = omega + s_w * std::ldexp(1.0, -params.M);

  VecFn net_fn = [&net](const std::vector<double>& x) { return eval_network(net, x); };
  report.grid_gap_lp = lp_norm_gap(target_fn, net_fn, domain, 2.0, pts);
  const CompileReport& rep = report;
  // a lattice not commensurate with the 2^K cells, so cell interiors are hit
  report.grid_gap_sup_offstrips = sup_norm_gap(target_fn, net_fn, domain, pts + 7,
                                               [&rep](const std::vector<double>& x) { return rep.excluded(x); });
  return {std::move(net), std::move(report)};
}

}  // namespace lunet
