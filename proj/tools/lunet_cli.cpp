// Command-line front end: compiles built-in targets into leaky-ReLU
// networks, verifies them against their targets, factorizes matrices,
// runs the distributional demos and the width-lower-bound demonstration.
// All reports are JSON ("schema": 1) and deterministic given --seed.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lunet/coding.hpp"
#include "lunet/flow.hpp"
#include "lunet/limits.hpp"
#include "lunet/lu.hpp"
#include "lunet/network_io.hpp"
#include "lunet/smooth.hpp"
#include "lunet/targets.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

using nlohmann::json;

// Reports go to stdout unless --out is given; files are written to a
// temporary sibling first and renamed into place.
void emit(const json& j, const std::string& out_path) {
  std::string text = j.dump(2);
  text.push_back('\n');
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::path target(out_path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << text;
  }
  std::filesystem::rename(tmp, target);
}

json box_to_json(const lunet::Box& box) { return json{{"lo", box.lo}, {"hi", box.hi}}; }

json strips_to_json(const lunet::ExclusionReport& rep) {
  json strips = json::array();
  for (auto [lo, hi] : rep.strips) strips.push_back(json::array({lo, hi}));
  return json{{"gamma", rep.gamma}, {"beta", rep.beta}, {"strips", strips}, {"measure_1d", rep.measure_1d()}};
}

double target_bound(const lunet::BuiltinTarget& target, int K, int M, uint64_t seed) {
  double s_v = 0.0;
  for (int i = 0; i < target.dx; ++i) s_v = std::max(s_v, target.domain.hi[i] - target.domain.lo[i]);
  std::vector<double> lo, scale;
  lunet::detail::estimate_range(target.fn, target.domain, target.dy, seed, lo, scale);
  double s_w = 0.0;
  for (double s : scale) s_w = std::max(s_w, s);
  int pts = std::min((1 << K) + 1, target.dx == 1 ? 4097 : target.dx == 2 ? 129 : 17);
  double omega = lunet::modulus_estimate(target.fn, target.domain, s_v * std::ldexp(1.0, -K), pts);
  return omega + s_w * std::ldexp(1.0, -M);
}

int cmd_compile(const std::string& target_name, int K, int M, double gamma, double budget, uint64_t seed,
                std::optional<double> alpha, const std::string& out_net, const std::string& out_report) {
  lunet::BuiltinTarget target = lunet::find_builtin_target(target_name);
  lunet::CodingParams params{K, M, target.dx, target.dy};
  auto [net, report] = lunet::compile(target.fn, target.domain, params, budget, gamma, seed, alpha);
  emit(lunet::to_json(net), out_net);
  json j{{"schema", 1},
         {"command", "compile"},
         {"target", target_name},
         {"K", K},
         {"M", M},
         {"dx", target.dx},
         {"dy", target.dy},
         {"seed", seed},
         {"bound", report.bound},
         {"grid_gap_lp", report.grid_gap_lp},
         {"grid_gap_sup_offstrips", report.grid_gap_sup_offstrips},
         {"gamma", report.gamma},
         {"decoder_probe_gap", report.decoder_probe_gap},
         {"range_lo", report.range_lo},
         {"range_scale", report.range_scale},
         {"domain", box_to_json(report.domain)},
         {"strips", strips_to_json(report.strips)},
         {"width", lunet::width_stats(net).w_max},
         {"interior_dim", lunet::width_stats(net).d_min}};
  emit(j, out_report);
  return kExitOk;
}

int cmd_verify(const std::string& target_name, const std::string& net_path, int K, int M, int grid,
               double slack, uint64_t seed, const std::string& out_report) {
  lunet::BuiltinTarget target = lunet::find_builtin_target(target_name);
  lunet::Network net = lunet::load_network(net_path);
  if (net.input_dim != target.dx || net.output_dim() != target.dy)
    throw CLI::ValidationError("network dimensions do not match target '" + target_name + "'");
  lunet::VecFn net_fn = [&net](const std::vector<double>& x) { return lunet::eval_network(net, x); };
  double sup_gap = lunet::sup_norm_gap(target.fn, net_fn, target.domain, grid + 1);
  double lp_gap = lunet::lp_norm_gap(target.fn, net_fn, target.domain, 2.0, grid);
  double bound = target_bound(target, K, M, seed);
  bool pass = lp_gap <= bound + slack;
  json j{{"schema", 1},      {"command", "verify"}, {"target", target_name}, {"net", net_path},
         {"K", K},           {"M", M},              {"grid", grid},          {"seed", seed},
         {"sup_gap", sup_gap}, {"lp_gap", lp_gap},  {"bound", bound},        {"slack", slack},
         {"pass", pass}};
  emit(j, out_report);
  return kExitOk;
}

int cmd_lu(const std::string& in_path, double nearest_eps, const std::string& out_report) {
  std::ifstream f(in_path);
  if (!f) throw std::runtime_error("cannot open " + in_path);
  json jin = json::parse(f);
  auto rows = jin.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw CLI::ValidationError("matrix must be nonempty");
  lunet::Matrix a(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < a.rows; ++i) {
    if (static_cast<int>(rows[i].size()) != a.cols) throw CLI::ValidationError("matrix rows must agree");
    for (int j = 0; j < a.cols; ++j) a(i, j) = rows[i][j];
  }

  auto matrix_to_json = [](const lunet::Matrix& m) {
    json rows_out = json::array();
    for (int i = 0; i < m.rows; ++i) {
      json row = json::array();
      for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
      rows_out.push_back(std::move(row));
    }
    return rows_out;
  };

  json j{{"schema", 1}, {"command", "lu"}, {"minors", lunet::leading_minors(a)}};
  auto res = lunet::lu_decompose(a);
  if (std::holds_alternative<lunet::LuFactors>(res)) {
    const auto& fac = std::get<lunet::LuFactors>(res);
    j["decomposable"] = true;
    j["lower"] = matrix_to_json(fac.lower);
    j["upper"] = matrix_to_json(fac.upper);
  } else {
    j["decomposable"] = false;
    j["failed_minor"] = std::get<lunet::NotDecomposable>(res).minor_index;
  }
  if (nearest_eps > 0.0) {
    lunet::Matrix fixed = lunet::nearest_lu(a, nearest_eps);
    j["nearest"] = matrix_to_json(fixed);
    lunet::Matrix diff(a.rows, a.cols);
    for (size_t i = 0; i < diff.a.size(); ++i) diff.a[i] = fixed.a[i] - a.a[i];
    j["nearest_op_distance"] = lunet::op_norm_estimate(diff);
  }
  emit(j, out_report);
  return kExitOk;
}

int cmd_flow_demo(int dim, const std::string& target_name, int n, int K, int M, double box_lo,
                  double box_hi, uint64_t seed, const std::string& out_report) {
  lunet::TransportMap target;
  if (dim == 1 && target_name == "mix2")
    target = lunet::targets::mix2_1d();
  else if (dim == 2 && target_name == "gauss-corr-2d")
    target = lunet::targets::gauss_corr_2d();
  else if (dim == 2 && target_name == "identity")
    target = lunet::rosenblatt_gaussian2d(lunet::Matrix::identity(2));
  else
    throw CLI::ValidationError("unsupported (dim, target) pair: use 1/mix2, 2/gauss-corr-2d or 2/identity");

  lunet::CodingParams params{K, M, dim, dim};
  lunet::Box box{std::vector<double>(dim, box_lo), std::vector<double>(dim, box_hi)};
  lunet::FlowReport rep = lunet::duap_demo(target, params, box, n, seed);
  json j{{"schema", 1},   {"command", "flow-demo"},
         {"dim", dim},    {"target", target_name},
         {"K", K},        {"M", M},
         {"n", rep.n_samples}, {"seed", rep.seed},
         {"metric", rep.metric_name}, {"value", rep.value},
         {"baseline", rep.baseline},  {"clip_fraction", rep.clip_fraction}};
  emit(j, out_report);
  return kExitOk;
}

int cmd_counterexample(int dim, double radius, int candidates, int fitted, int grid, uint64_t seed,
                       const std::string& out_report) {
  lunet::Counterexample ce =
      dim == 1 ? lunet::square_counterexample_1d() : lunet::gaussian_counterexample(dim, radius);
  lunet::CounterRng rng(seed, 21);
  double min_gap = 1e300;
  bool all_pass = true;
  auto consider = [&](const lunet::Network& net) {
    auto [gap, ok] = lunet::check_gap(ce, net, grid);
    min_gap = std::min(min_gap, gap);
    all_pass = all_pass && ok;
  };
  for (int t = 0; t < candidates; ++t) {
    int depth = 1 + static_cast<int>(rng.next_u64() % 6);
    lunet::Network net;
    net.input_dim = dim;
    for (int l = 0; l < depth; ++l) {
      lunet::Matrix lower = lunet::Matrix::identity(dim), upper(dim, dim);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < i; ++j) lower(i, j) = rng.next_uniform(-1.0, 1.0);
        for (int j = i + 1; j < dim; ++j) upper(i, j) = rng.next_uniform(-1.0, 1.0);
        double diag = rng.next_uniform(0.4, 1.6);
        upper(i, i) = rng.next_unit() < 0.5 ? -diag : diag;
      }
      std::vector<double> b(dim);
      for (double& x : b) x = rng.next_uniform(-1.0, 1.0);
      std::vector<lunet::Activation> acts(dim);
      for (auto& a : acts) a = lunet::Activation{rng.next_uniform(0.1, 0.95)};
      net.layers.push_back(lunet::Layer{matmul(lower, upper), std::move(b), std::move(acts)});
    }
    consider(net);
  }
  for (int t = 0; t < fitted; ++t)
    consider(lunet::fit_candidate_net(ce, 2 + t % 3, seed + 1000 + t));
  json j{{"schema", 1},        {"command", "counterexample"},
         {"dim", dim},         {"radius", radius},
         {"seed", seed},       {"epsilon", ce.epsilon},
         {"n_candidates", candidates + fitted}, {"min_gap", min_gap},
         {"all_pass", all_pass}};
  emit(j, out_report);
  return kExitOk;
}

int cmd_smooth_eval(const std::string& net_path, int n, int points, double lo, double hi,
                    const std::string& out_report) {
  lunet::Network net = lunet::load_network(net_path);
  lunet::SmoothNetwork smooth = lunet::smooth_network(net, n);
  int d = net.input_dim;
  json rows = json::array();
  for (int i = 0; i < points; ++i) {
    double t = points > 1 ? static_cast<double>(i) / (points - 1) : 0.5;
    std::vector<double> x(d, lo + (hi - lo) * t);
    auto base = lunet::eval_network(net, x);
    auto reg = smooth(x);
    double gap = 0.0;
    for (size_t k = 0; k < base.size(); ++k) gap = std::max(gap, std::abs(base[k] - reg[k]));
    rows.push_back(json{{"x", x}, {"base", base}, {"smoothed", reg}, {"gap", gap}});
  }
  json j{{"schema", 1}, {"command", "smooth-eval"}, {"net", net_path}, {"n", n}, {"table", rows}};
  emit(j, out_report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constructive leaky-ReLU network compiler and LU-network toolkit"};
  app.require_subcommand(1);

  std::string target_name, in_path, out_path, report_path;
  int K = 4, M = 4, grid = 100, n_samples = 100000, dim = 2, candidates = 200, fitted = 0, mollifier = 16;
  int points = 33;
  double gamma = 0.05, budget = std::ldexp(1.0, -8), slack = 0.02, radius = 1.0, alpha = 0.0;
  double nearest_eps = 0.0, box_lo = -4.0, box_hi = 4.0, lo = -2.0, hi = 2.0;
  uint64_t seed = 1;

  auto* compile = app.add_subcommand("compile", "compile a built-in target into a network");
  compile->add_option("--target", target_name, "built-in target name")->required();
  compile->add_option("--K", K, "input grid bits per dimension")->required();
  compile->add_option("--M", M, "output grid bits per dimension")->required();
  compile->add_option("--gamma", gamma, "exclusion budget in (0,1)");
  compile->add_option("--budget", budget, "probe accuracy budget");
  auto* alpha_opt = compile->add_option("--alpha", alpha, "pin the identity-substitution slope in (0,1)");
  compile->add_option("--seed", seed, "seed for range sampling jitter");
  compile->add_option("--out", out_path, "network JSON path")->required();
  compile->add_option("--report", report_path, "report JSON path (stdout if omitted)");

  auto* verify = app.add_subcommand("verify", "measure a network against a built-in target");
  verify->add_option("--target", target_name, "built-in target name")->required();
  verify->add_option("--in", in_path, "network JSON path")->required();
  verify->add_option("--K", K, "grid bits used for the bound")->required();
  verify->add_option("--M", M, "grid bits used for the bound")->required();
  verify->add_option("--grid", grid, "measurement grid points per dimension");
  verify->add_option("--slack", slack, "pass slack on the L2 gap");
  verify->add_option("--seed", seed, "seed for the bound's range sampling");
  verify->add_option("--out", report_path, "report JSON path (stdout if omitted)");

  auto* lu = app.add_subcommand("lu", "LU-decompose a matrix from a JSON 2-D array");
  lu->add_option("--in", in_path, "matrix JSON path")->required();
  lu->add_option("--nearest", nearest_eps, "also emit a decomposable matrix within this op-norm distance");
  lu->add_option("--out", report_path, "report JSON path (stdout if omitted)");

  auto* flow = app.add_subcommand("flow-demo", "distributional approximation demo");
  flow->add_option("--dim", dim, "1 or 2")->required();
  flow->add_option("--target", target_name, "mix2 (1d), gauss-corr-2d or identity (2d)")->required();
  flow->add_option("--n", n_samples, "sample count");
  flow->add_option("--K", K, "grid bits (1d: 2^K knots)");
  flow->add_option("--M", M, "output grid bits (2d)");
  flow->add_option("--box-lo", box_lo, "source clip box lower bound");
  flow->add_option("--box-hi", box_hi, "source clip box upper bound");
  flow->add_option("--seed", seed, "sampling seed")->required();
  flow->add_option("--out", report_path, "report JSON path (stdout if omitted)");

  auto* ce = app.add_subcommand("counterexample", "width lower-bound demonstration");
  ce->add_option("--dim", dim, "ambient dimension (1 uses the interval case)")->required();
  ce->add_option("--radius", radius, "ball radius for dim >= 2");
  ce->add_option("--candidates", candidates, "random invertible candidates");
  ce->add_option("--fitted", fitted, "coordinate-descent fitted candidates");
  ce->add_option("--grid", grid, "interior grid per dimension");
  ce->add_option("--seed", seed, "candidate seed");
  ce->add_option("--out", report_path, "report JSON path (stdout if omitted)");

  auto* smooth = app.add_subcommand("smooth-eval", "pointwise base vs mollified comparison table");
  smooth->add_option("--in", in_path, "network JSON path")->required();
  smooth->add_option("--n", mollifier, "mollifier index")->required();
  smooth->add_option("--points", points, "table rows");
  smooth->add_option("--lo", lo, "diagonal segment start");
  smooth->add_option("--hi", hi, "diagonal segment end");
  smooth->add_option("--out", report_path, "report JSON path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return kExitConfig;
  }

  try {
    if (compile->parsed())
      return cmd_compile(target_name, K, M, gamma, budget, seed,
                         alpha_opt->count() ? std::optional<double>(alpha) : std::nullopt, out_path,
                         report_path);
    if (verify->parsed()) return cmd_verify(target_name, in_path, K, M, grid, slack, seed, report_path);
    if (lu->parsed()) return cmd_lu(in_path, nearest_eps, report_path);
    if (flow->parsed())
      return cmd_flow_demo(dim, target_name, n_samples, K, M, box_lo, box_hi, seed, report_path);
    if (ce->parsed()) return cmd_counterexample(dim, radius, candidates, fitted, grid, seed, report_path);
    if (smooth->parsed()) return cmd_smooth_eval(in_path, mollifier, points, lo, hi, report_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::string what = e.what();
    std::cerr << "error: " << what << "\n";
    return what.find("cannot open") != std::string::npos ? kExitIo : kExitInfeasible;
  }
  return kExitConfig;
}
