#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "lunet/matrix.hpp"

namespace lunet {

// One leaky-ReLU unit: slope alpha on negatives, identity on nonnegatives.
// alpha = 1 is the identity unit, alpha = 0 the plain ReLU; the unit is
// invertible iff alpha > 0.
struct Activation {
  double alpha = 1.0;

  double operator()(double x) const { return x < 0.0 ? alpha * x : x; }
  double slope_at(double pre) const { return pre < 0.0 ? alpha : 1.0; }
  bool operator==(const Activation&) const = default;
};

// Affine map followed by per-unit activations. Activations are stored per
// unit, not per layer: several constructions mix identity-carry units and
// nonlinear units in the same layer.
struct Layer {
  Matrix weight;
  std::vector<double> bias;
  std::vector<Activation> acts;

  int in_dim() const { return weight.cols; }
  int out_dim() const { return weight.rows; }
  bool operator==(const Layer&) const = default;
};

struct Network {
  std::vector<Layer> layers;
  int input_dim = 0;

  int output_dim() const { return layers.empty() ? input_dim : layers.back().out_dim(); }
  int depth() const { return static_cast<int>(layers.size()); }
  bool operator==(const Network&) const = default;
};

struct NetworkStats {
  int w_max = 0;
  int d_min = 0;
  int depth = 0;
};

inline Layer make_layer(Matrix weight, std::vector<double> bias, std::vector<Activation> acts) {
  if (static_cast<int>(bias.size()) != weight.rows || bias.size() != acts.size())
    throw std::invalid_argument("make_layer: bias/acts length must equal weight row count");
  return Layer{std::move(weight), std::move(bias), std::move(acts)};
}

inline Layer make_layer(Matrix weight, std::vector<double> bias, double alpha) {
  std::vector<Activation> acts(weight.rows, Activation{alpha});
  return make_layer(std::move(weight), std::move(bias), std::move(acts));
}

// 1x1 building block for scalar chains.
inline Layer scalar_layer(double w, double b, double alpha) {
  return Layer{Matrix{{w}}, {b}, {Activation{alpha}}};
}

inline Layer identity_layer(int dim, double alpha = 1.0) {
  return make_layer(Matrix::identity(dim), std::vector<double>(dim, 0.0), alpha);
}

inline void validate(const Network& net) {
  if (net.layers.empty()) throw std::invalid_argument("Network: needs at least one layer");
  if (net.input_dim <= 0) throw std::invalid_argument("Network: input_dim must be positive");
  int dim = net.input_dim;
  for (const Layer& layer : net.layers) {
    if (layer.in_dim() != dim) throw std::invalid_argument("Network: layer dimensions do not chain");
    if (static_cast<int>(layer.bias.size()) != layer.out_dim() || layer.bias.size() != layer.acts.size())
      throw std::invalid_argument("Network: bias/acts length mismatch");
    for (const Activation& act : layer.acts)
      if (!(act.alpha >= 0.0 && act.alpha <= 1.0))
        throw std::invalid_argument("Network: activation slope outside [0,1]");
    dim = layer.out_dim();
  }
}

// Forward pass with a per-layer hook receiving the pre-activation vector;
// used by the leaky substitution and drift measurements.
template <typename PreActHook>
std::vector<double> eval_network_hooked(const Network& net, std::span<const double> x, PreActHook&& hook) {
  if (static_cast<int>(x.size()) != net.input_dim)
    throw std::invalid_argument("eval_network: input dimension mismatch");
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    next.resize(layer.out_dim());
    matvec(layer.weight, cur, next);
    for (int i = 0; i < layer.out_dim(); ++i) next[i] += layer.bias[i];
    hook(l, std::span<const double>(next));
    for (int i = 0; i < layer.out_dim(); ++i) next[i] = layer.acts[i](next[i]);
    cur.swap(next);
  }
  return cur;
}

inline std::vector<double> eval_network(const Network& net, std::span<const double> x) {
  return eval_network_hooked(net, x, [](size_t, std::span<const double>) {});
}

inline double eval_scalar(const Network& net, double x) {
  return eval_network(net, std::span<const double>(&x, 1)).front();
}

// Function composition: eval(compose(f,g), x) == eval(g, eval(f, x)) with
// identical arithmetic, since layers are simply concatenated.
inline Network compose(const Network& first, const Network& second) {
  if (first.output_dim() != second.input_dim)
    throw std::invalid_argument("compose: output dim of first must match input dim of second");
  Network out = first;
  out.layers.insert(out.layers.end(), second.layers.begin(), second.layers.end());
  return out;
}

inline Network append_layer(Network net, Layer layer) {
  if (layer.in_dim() != net.output_dim()) throw std::invalid_argument("append_layer: dimension mismatch");
  net.layers.push_back(std::move(layer));
  return net;
}

namespace detail {

// Pads a copy of the chain to `depth` layers with identity units so that
// differently deep strands can be stacked block-diagonally.
inline std::vector<Layer> padded_layers(const Network& chain, int depth, double pad_alpha) {
  std::vector<Layer> layers = chain.layers;
  while (static_cast<int>(layers.size()) < depth)
    layers.push_back(identity_layer(chain.output_dim(), pad_alpha));
  return layers;
}

}  // namespace detail

// Places the given networks side by side: input dimension is the sum of the
// inputs, every layer is the block-diagonal stack of the component layers.
// Shorter nets are extended with identity layers (weight 1, bias 0, alpha =
// pad_alpha); pad_alpha = 0 keeps a pure-ReLU net pure ReLU on nonnegative
// carries.
inline Network stack_parallel(const std::vector<Network>& nets, double pad_alpha = 1.0) {
  if (nets.empty()) throw std::invalid_argument("stack_parallel: empty list");
  int depth = 0;
  int in_total = 0;
  for (const Network& n : nets) {
    validate(n);
    depth = std::max(depth, n.depth());
    in_total += n.input_dim;
  }
  std::vector<std::vector<Layer>> parts;
  parts.reserve(nets.size());
  for (const Network& n : nets) parts.push_back(detail::padded_layers(n, depth, pad_alpha));

  Network out;
  out.input_dim = in_total;
  for (int l = 0; l < depth; ++l) {
    int rows = 0, cols = 0;
    for (const auto& p : parts) {
      rows += p[l].out_dim();
      cols += p[l].in_dim();
    }
    Matrix w(rows, cols);
    std::vector<double> bias;
    std::vector<Activation> acts;
    bias.reserve(rows);
    acts.reserve(rows);
    int r0 = 0, c0 = 0;
    for (const auto& p : parts) {
      const Layer& blk = p[l];
      for (int i = 0; i < blk.out_dim(); ++i)
        for (int j = 0; j < blk.in_dim(); ++j) w(r0 + i, c0 + j) = blk.weight(i, j);
      bias.insert(bias.end(), blk.bias.begin(), blk.bias.end());
      acts.insert(acts.end(), blk.acts.begin(), blk.acts.end());
      r0 += blk.out_dim();
      c0 += blk.in_dim();
    }
    out.layers.push_back(Layer{std::move(w), std::move(bias), std::move(acts)});
  }
  return out;
}

// Runs width-1 scalar chains in parallel on one shared scalar input. The
// first layer fans the input out to all strands; the rest is block-diagonal.
inline Network fan_parallel(const std::vector<Network>& chains) {
  if (chains.empty()) throw std::invalid_argument("fan_parallel: empty chain list");
  for (const Network& c : chains) {
    validate(c);
    if (c.input_dim != 1) throw std::invalid_argument("fan_parallel: chains must take scalar input");
    for (const Layer& l : c.layers)
      if (l.out_dim() != 1) throw std::invalid_argument("fan_parallel: chains must have width 1");
  }
  Network stacked = stack_parallel(chains);
  // Rewire the first (block-diagonal n x n) layer into the n x 1 fan.
  Layer& first = stacked.layers.front();
  Matrix fan(first.out_dim(), 1);
  for (int i = 0; i < first.out_dim(); ++i) fan(i, 0) = first.weight(i, i);
  first.weight = std::move(fan);
  stacked.input_dim = 1;
  return stacked;
}

// Width statistics. Hidden dimensions are the outputs of all layers but the
// last; a depth-1 network has w_max = max(d_x, d_y) and d_min = min(d_x, d_y).
inline NetworkStats width_stats(const Network& net) {
  validate(net);
  NetworkStats stats;
  stats.depth = net.depth();
  if (net.depth() == 1) {
    stats.w_max = std::max(net.input_dim, net.output_dim());
    stats.d_min = std::min(net.input_dim, net.output_dim());
    return stats;
  }
  int w = 0, d = net.layers.front().out_dim();
  for (int l = 0; l + 1 < net.depth(); ++l) {
    w = std::max(w, net.layers[l].out_dim());
    d = std::min(d, net.layers[l].out_dim());
  }
  stats.w_max = w;
  stats.d_min = d;
  return stats;
}

// Replaces every identity unit (alpha = 1) by a true leaky unit with the
// given slope, leaving all other units untouched. With alpha close to 1 the
// evaluation drifts by at most a Lipschitz-amplified (1-alpha) factor.
inline Network substitute_identity(Network net, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("substitute_identity: alpha must be in (0,1)");
  for (Layer& layer : net.layers)
    for (Activation& act : layer.acts)
      if (act.alpha == 1.0) act.alpha = alpha;
  return net;
}

}  // namespace lunet
