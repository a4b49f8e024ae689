#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "lunet/coding.hpp"
#include "lunet/flow.hpp"
#include "lunet/lu.hpp"
#include "lunet/rng.hpp"
#include "lunet/targets.hpp"

using namespace lunet;

namespace {

Matrix random_matrix(CounterRng& rng, int d) {
  Matrix m(d, d);
  for (double& x : m.a) x = rng.next_uniform(-1.0, 1.0);
  return m;
}

// Random matrix with the leading k x k block forced singular.
Matrix forced_singular_minor(CounterRng& rng, int d) {
  Matrix m = random_matrix(rng, d);
  int k = 1 + static_cast<int>(rng.next_u64() % d);
  if (k == 1) {
    m(0, 0) = 0.0;
  } else {
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (int i = 0; i + 1 < k; ++i) s += m(i, j);
      m(k - 1, j) = s;  // row k = sum of the rows above, within the block
    }
  }
  return m;
}

double residual(const Matrix& a, const LuFactors& f) {
  Matrix prod = matmul(f.lower, f.upper);
  double worst = 0.0;
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) worst = std::max(worst, std::abs(prod(i, j) - a(i, j)));
  return worst;
}

}  // namespace

TEST_CASE("leading_minors") {
  CHECK(leading_minors(Matrix::identity(3)) == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(leading_minors(Matrix{{0, 1}, {1, 0}}) == std::vector<double>{0.0, -1.0});
  CHECK(leading_minors(Matrix{{4, 3}, {6, 3}}) == std::vector<double>{4.0, -6.0});
  CHECK_THROWS_AS(leading_minors(Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("lu_decompose") {
  auto res = lu_decompose(Matrix{{4, 3}, {6, 3}});
  REQUIRE(std::holds_alternative<LuFactors>(res));
  const auto& f = std::get<LuFactors>(res);
  CHECK(f.lower(1, 0) == Catch::Approx(1.5));
  CHECK(f.upper(0, 0) == 4.0);
  CHECK(f.upper(0, 1) == 3.0);
  CHECK(f.upper(1, 1) == Catch::Approx(-1.5));

  auto id = lu_decompose(Matrix::identity(4));
  REQUIRE(std::holds_alternative<LuFactors>(id));
  CHECK(std::get<LuFactors>(id).lower == Matrix::identity(4));
  CHECK(std::get<LuFactors>(id).upper == Matrix::identity(4));

  auto bad = lu_decompose(Matrix{{0, 1}, {1, 0}});
  REQUIRE(std::holds_alternative<NotDecomposable>(bad));
  CHECK(std::get<NotDecomposable>(bad).minor_index == 1);
}

TEST_CASE("factorization residual and uniqueness on random matrices") {
  CounterRng rng(31);
  int done = 0;
  while (done < 300) {
    int d = 1 + static_cast<int>(rng.next_u64() % 6);
    Matrix a = random_matrix(rng, d);
    auto res = lu_decompose(a);
    if (!std::holds_alternative<LuFactors>(res)) continue;
    ++done;
    const auto& f = std::get<LuFactors>(res);
    CHECK(residual(a, f) <= 1e-10 * (1.0 + max_norm(a)));

    // uniqueness: refactorizing L*U returns the same factors
    Matrix prod = matmul(f.lower, f.upper);
    auto again = lu_decompose(prod);
    REQUIRE(std::holds_alternative<LuFactors>(again));
    const auto& g = std::get<LuFactors>(again);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        CHECK(std::abs(g.lower(i, j) - f.lower(i, j)) <= 1e-10 * (1.0 + std::abs(f.lower(i, j))));
        CHECK(std::abs(g.upper(i, j) - f.upper(i, j)) <= 1e-10 * (1.0 + std::abs(f.upper(i, j))));
      }
  }
}

TEST_CASE("nearest_lu") {
  // already decomposable: unchanged
  Matrix a{{4, 3}, {6, 3}};
  CHECK(nearest_lu(a, 1e-3) == a);

  // permutation matrix
  Matrix p{{0, 1}, {1, 0}};
  Matrix fixed = nearest_lu(p, 1e-3);
  CHECK(std::holds_alternative<LuFactors>(lu_decompose(fixed)));
  Matrix diff(2, 2);
  for (int i = 0; i < 4; ++i) diff.a[i] = fixed.a[i] - p.a[i];
  CHECK(op_norm_estimate(diff) < 1e-3);

  // zero matrix
  Matrix z(3, 3);
  Matrix fz = nearest_lu(z, 1e-2);
  CHECK(std::holds_alternative<LuFactors>(lu_decompose(fz)));
  CHECK(op_norm_estimate(fz) < 1e-2);
}

TEST_CASE("nearest_lu density on forced-singular matrices") {
  CounterRng rng(37);
  for (int t = 0; t < 500; ++t) {
    int d = 1 + static_cast<int>(rng.next_u64() % 6);
    Matrix a = forced_singular_minor(rng, d);
    Matrix fixed = nearest_lu(a, 1e-4);
    REQUIRE(std::holds_alternative<LuFactors>(lu_decompose(fixed)));
    Matrix diff(d, d);
    for (size_t i = 0; i < diff.a.size(); ++i) diff.a[i] = fixed.a[i] - a.a[i];
    REQUIRE(op_norm_estimate(diff) < 1e-4);
  }
}

TEST_CASE("to_lu_network leaves decomposable square nets untouched") {
  CounterRng rng(41);
  Network net;
  net.input_dim = 2;
  for (int l = 0; l < 3; ++l) {
    Matrix w{{rng.next_uniform(0.5, 1.5), rng.next_uniform(-0.3, 0.3)},
             {rng.next_uniform(-0.3, 0.3), rng.next_uniform(0.5, 1.5)}};
    net.layers.push_back(make_layer(std::move(w), {rng.next_uniform(-0.2, 0.2), 0.0}, 0.7));
  }
  Box box = make_box({-1, -1}, {1, 1});
  Network lu_net = to_lu_network(net, box, 1e-6, 9);
  CHECK(lu_net == net);
}

TEST_CASE("to_lu_network on a compiled network") {
  auto t = targets::identity_nd(2);
  auto [net, report] = compile(t.fn, t.domain, CodingParams{2, 2, 2, 2}, 1.0 / 256, 0.1, 9);
  Network lu_net = to_lu_network(net, t.domain, 1e-6, 9);

  // every layer decomposable
  for (const Layer& l : lu_net.layers) REQUIRE(std::holds_alternative<LuFactors>(lu_decompose(l.weight)));

  // evaluation preserved on a probe grid
  double gap = 0.0;
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j) {
      std::vector<double> x{i / 16.0, j / 16.0};
      auto a = eval_network(net, x);
      auto b = eval_network(lu_net, x);
      gap = std::max({gap, std::abs(a[0] - b[0]), std::abs(a[1] - b[1])});
    }
  CHECK(gap < 1e-6);

  // the result is invertible: every layer factorizes and the Jacobian
  // log-determinant is finite (the inverse function itself has Lipschitz
  // constant ~1/alpha_quantizer, so a float round trip is meaningless here)
  auto [y, logdet] = forward_logdet(lu_net, {0.31, 0.62});
  CHECK(std::isfinite(logdet));
  Network inv = invert_lu_network(lu_net);  // constructible
  CHECK(inv.input_dim == 2);
}

TEST_CASE("to_lu_network restores invertibility of bottleneck nets") {
  // 2 -> 1 -> 2 network: rank-deficient as written, bijective after the
  // identity-carrying padding
  // The final layer of the padded net must drop the carried channel, so it
  // is singular as written and only the density perturbation makes it
  // invertible; the round-trip conditioning is 1/perturbation, which ties
  // the usable budget to the float precision.
  CounterRng rng(47);
  Network net;
  net.input_dim = 2;
  net.layers.push_back(make_layer(Matrix{{0.8, -0.4}}, {0.1}, 0.6));
  net.layers.push_back(make_layer(Matrix{{1.2}, {-0.7}}, {0.0, 0.2}, 0.4));
  Box box = make_box({-2, -2}, {2, 2});
  Network lu_net = to_lu_network(net, box, 1e-4, 9);

  // padded net still computes the original function
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    auto a = eval_network(net, x);
    auto b = eval_network(lu_net, x);
    CHECK(std::abs(a[0] - b[0]) <= 1e-4);
    CHECK(std::abs(a[1] - b[1]) <= 1e-4);
  }

  // and round trips through its inverse
  Network inv = invert_lu_network(lu_net);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    auto back = eval_network(inv, eval_network(lu_net, x));
    worst = std::max({worst, std::abs(back[0] - x[0]), std::abs(back[1] - x[1])});
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("to_lu_network rejects wide networks") {
  Network net;
  net.input_dim = 2;
  net.layers.push_back(make_layer(Matrix(3, 2, 0.5), std::vector<double>(3, 0.0), 0.5));
  net.layers.push_back(make_layer(Matrix(2, 3, 0.5), std::vector<double>(2, 0.0), 0.5));
  CHECK_THROWS_AS(to_lu_network(net, make_box({0, 0}, {1, 1}), 1e-6, 5), std::invalid_argument);
}
