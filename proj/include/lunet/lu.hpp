#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "lunet/matrix.hpp"
#include "lunet/metrics.hpp"
#include "lunet/network.hpp"

namespace lunet {

// A = lower * upper with unit diagonal on the lower factor. Exists and is
// unique exactly when all leading principal minors of A are nonzero.
struct LuFactors {
  Matrix lower;
  Matrix upper;
  int dim = 0;
};

struct NotDecomposable {
  int minor_index = 0;  // 1-based index of the offending leading minor
};

namespace detail {

inline double det_partial_pivot(Matrix m) {
  int d = m.rows;
  double det = 1.0;
  for (int k = 0; k < d; ++k) {
    int piv = k;
    for (int i = k + 1; i < d; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < d; ++j) std::swap(m(piv, j), m(k, j));
      det = -det;
    }
    det *= m(k, k);
    for (int i = k + 1; i < d; ++i) {
      double f = m(i, k) / m(k, k);
      for (int j = k; j < d; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

inline double det_recursive(const Matrix& m) {
  int d = m.rows;
  if (d == 1) return m(0, 0);
  if (d == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  double det = 0.0;
  for (int j = 0; j < d; ++j) {
    Matrix sub(d - 1, d - 1);
    for (int i = 1; i < d; ++i) {
      int cc = 0;
      for (int c = 0; c < d; ++c)
        if (c != j) sub(i - 1, cc++) = m(i, c);
    }
    det += (j % 2 == 0 ? 1.0 : -1.0) * m(0, j) * det_recursive(sub);
  }
  return det;
}

inline Matrix leading_block(const Matrix& m, int k) {
  Matrix b(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) b(i, j) = m(i, j);
  return b;
}

}  // namespace detail

// Determinants of the leading k x k blocks, k = 1..d. Cofactor expansion for
// tiny blocks, pivoted elimination above that.
inline std::vector<double> leading_minors(const Matrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("leading_minors: matrix must be square");
  std::vector<double> minors(a.rows);
  for (int k = 1; k <= a.rows; ++k) {
    Matrix b = detail::leading_block(a, k);
    minors[k - 1] = k <= 4 ? detail::det_recursive(b) : detail::det_partial_pivot(std::move(b));
  }
  return minors;
}

inline double lu_minor_tolerance(const Matrix& a) { return 1e-12 * max_norm(a); }

// Doolittle factorization without pivoting. Succeeds iff every leading minor
// exceeds 1e-12 * |A|_max in magnitude; otherwise reports the first
// offending minor.
inline std::variant<LuFactors, NotDecomposable> lu_decompose(const Matrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("lu_decompose: matrix must be square");
  int d = a.rows;
  double tol = lu_minor_tolerance(a);
  std::vector<double> minors = leading_minors(a);
  for (int k = 0; k < d; ++k)
    if (!(std::abs(minors[k]) > tol)) return NotDecomposable{k + 1};

  LuFactors f{Matrix::identity(d), Matrix(d, d), d};
  for (int k = 0; k < d; ++k) {
    for (int j = k; j < d; ++j) {
      double s = a(k, j);
      for (int i = 0; i < k; ++i) s -= f.lower(k, i) * f.upper(i, j);
      f.upper(k, j) = s;
    }
    for (int i = k + 1; i < d; ++i) {
      double s = a(i, k);
      for (int j = 0; j < k; ++j) s -= f.lower(i, j) * f.upper(j, k);
      f.lower(i, k) = s / f.upper(k, k);
    }
  }
  return f;
}

// Solve (LU) x = b by forward then backward substitution.
inline std::vector<double> lu_solve(const LuFactors& f, std::vector<double> b) {
  int d = f.dim;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) b[i] -= f.lower(i, j) * b[j];
  for (int i = d - 1; i >= 0; --i) {
    for (int j = i + 1; j < d; ++j) b[i] -= f.upper(i, j) * b[j];
    b[i] /= f.upper(i, i);
  }
  return b;
}

inline Matrix lu_inverse(const LuFactors& f) {
  Matrix inv(f.dim, f.dim);
  for (int c = 0; c < f.dim; ++c) {
    std::vector<double> e(f.dim, 0.0);
    e[c] = 1.0;
    std::vector<double> col = lu_solve(f, std::move(e));
    for (int i = 0; i < f.dim; ++i) inv(i, c) = col[i];
  }
  return inv;
}

namespace detail {

// A vector of unit max-norm completing the first k-1 rows (restricted to
// their first k entries) to a linearly independent set: Gram-Schmidt the
// rows, then take the least-representable coordinate direction's residual.
inline std::vector<double> completion_vector(const Matrix& a, int k) {
  std::vector<std::vector<double>> basis;
  for (int i = 0; i < k - 1; ++i) {
    std::vector<double> r(k);
    for (int j = 0; j < k; ++j) r[j] = a(i, j);
    for (const auto& b : basis) {
      double dot = 0.0;
      for (int j = 0; j < k; ++j) dot += r[j] * b[j];
      for (int j = 0; j < k; ++j) r[j] -= dot * b[j];
    }
    double len = 0.0;
    for (double x : r) len += x * x;
    len = std::sqrt(len);
    if (len > 1e-14)
      for (double& x : r) x /= len;
    else
      std::fill(r.begin(), r.end(), 0.0);
    basis.push_back(std::move(r));
  }
  std::vector<double> best(k, 0.0);
  double best_len = -1.0;
  for (int c = 0; c < k; ++c) {
    std::vector<double> r(k, 0.0);
    r[c] = 1.0;
    for (const auto& b : basis) {
      double dot = b[c];
      for (int j = 0; j < k; ++j) r[j] -= dot * b[j];
    }
    double len = 0.0;
    for (double x : r) len += x * x;
    if (len > best_len) {
      best_len = len;
      best = std::move(r);
    }
  }
  double m = 0.0;
  for (double x : best) m = std::max(m, std::abs(x));
  if (m > 0.0)
    for (double& x : best) x /= m;
  return best;
}

}  // namespace detail

// Nearest decomposable matrix in the sense of the density argument: walk the
// leading minors; at the first singular one, nudge that row along a
// completion vector and repeat. Each pass fixes a strictly later minor, so
// at most d rows move, each by delta in max norm. delta = eps / (2 d sqrt d)
// converts the entrywise budget to the Euclidean operator norm.
inline Matrix nearest_lu(const Matrix& a, double eps) {
  if (a.rows != a.cols) throw std::invalid_argument("nearest_lu: matrix must be square");
  if (!(eps > 0.0)) throw std::invalid_argument("nearest_lu: eps must be positive");
  int d = a.rows;
  double delta = eps / (2.0 * d * std::sqrt(static_cast<double>(d)));
  Matrix m = a;
  for (int pass = 0; pass < 4 * d; ++pass) {
    double tol = lu_minor_tolerance(m);
    std::vector<double> minors = leading_minors(m);
    int bad = -1;
    for (int k = 0; k < d; ++k)
      if (!(std::abs(minors[k]) > tol)) {
        bad = k + 1;
        break;
      }
    if (bad < 0) return m;
    std::vector<double> v = detail::completion_vector(m, bad);
    bool moved = false;
    for (int j = 0; j < bad; ++j)
      if (v[j] != 0.0) {
        m(bad - 1, j) += delta * v[j];
        moved = true;
      }
    if (!moved) m(bad - 1, bad - 1) += delta;
  }
  throw std::runtime_error("nearest_lu: did not converge");
}

// Rewrites a narrow square-in square-out network as an equivalent one whose
// every weight matrix is LU-decomposable. Rectangular interior weights are
// padded to d x d; padded units carry ones on the diagonal (their outputs
// feed zero columns, so the function is unchanged) and reuse the layer's
// first activation slope. Each padded matrix is then replaced by a nearby
// decomposable one. Per-layer budgets start at eps scaled by the probed
// input magnitude of the layer; the probe-grid gap is then measured and the
// budgets rescaled proportionally until the gap fits eps, up to 8 rounds.
inline Network to_lu_network(const Network& net, const Box& domain, double eps, int probe) {
  validate(net);
  int d = net.input_dim;
  if (net.output_dim() != d) throw std::invalid_argument("to_lu_network: input and output dims must agree");
  if (domain.dim() != d) throw std::invalid_argument("to_lu_network: domain dimension mismatch");
  for (const Layer& l : net.layers)
    if (l.out_dim() > d || l.in_dim() > d)
      throw std::invalid_argument("to_lu_network: width exceeds the ambient dimension");

  Network padded;
  padded.input_dim = d;
  for (const Layer& l : net.layers) {
    Matrix w(d, d);
    for (int i = 0; i < l.out_dim(); ++i)
      for (int j = 0; j < l.in_dim(); ++j) w(i, j) = l.weight(i, j);
    for (int i = l.out_dim(); i < d; ++i) w(i, i) = 1.0;
    std::vector<double> b(d, 0.0);
    std::vector<Activation> acts(d, l.acts.front());
    for (int i = 0; i < l.out_dim(); ++i) {
      b[i] = l.bias[i];
      acts[i] = l.acts[i];
    }
    padded.layers.push_back(Layer{std::move(w), std::move(b), std::move(acts)});
  }

  // probe points and per-layer input magnitudes
  std::vector<std::vector<double>> probes;
  detail::for_each_grid_point(domain, probe, /*midpoints=*/false,
                              [&](const std::vector<double>& x) { probes.push_back(x); });
  int L = padded.depth();
  std::vector<double> input_scale(L, 1.0);
  for (const auto& x : probes) {
    std::vector<double> cur(x);
    for (int l = 0; l < L; ++l) {
      for (double v : cur) input_scale[l] = std::max(input_scale[l], std::abs(v));
      std::vector<double> next(padded.layers[l].out_dim());
      matvec(padded.layers[l].weight, cur, next);
      for (int i = 0; i < padded.layers[l].out_dim(); ++i)
        next[i] = padded.layers[l].acts[i](next[i] + padded.layers[l].bias[i]);
      cur.swap(next);
    }
  }

  double budget_scale = 1.0;
  for (int round = 0; round < 8; ++round) {
    Network cand = padded;
    try {
      for (int l = 0; l < L; ++l) {
        double layer_eps = budget_scale * eps / (2.0 * L * input_scale[l]);
        cand.layers[l].weight = nearest_lu(padded.layers[l].weight, layer_eps);
      }
    } catch (const std::runtime_error&) {
      break;  // budget below what the minor tolerance admits
    }
    double gap = 0.0;
    for (const auto& x : probes) {
      auto a = eval_network(net, x);
      auto b = eval_network(cand, x);
      for (size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
    }
    if (gap < eps) return cand;
    // gap is first-order linear in the budgets, so rescale proportionally
    budget_scale *= std::min(0.5, 0.5 * eps / gap);
  }
  throw std::runtime_error("to_lu_network: probe gap did not fit the budget after 8 refinement rounds");
}

}  // namespace lunet
