#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "lunet/network.hpp"

namespace lunet {

// Network file format, shared by all CLI commands:
//   {"input_dim": d, "layers": [{"weight": [[..]..], "bias": [..], "alphas": [..]}]}
// Weights round-trip bit-exactly (shortest decimal that reparses to the same
// 64-bit value).

inline nlohmann::json to_json(const Network& net) {
  nlohmann::json j;
  j["input_dim"] = net.input_dim;
  j["layers"] = nlohmann::json::array();
  for (const Layer& layer : net.layers) {
    nlohmann::json jl;
    auto& w = jl["weight"] = nlohmann::json::array();
    for (int i = 0; i < layer.out_dim(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int jj = 0; jj < layer.in_dim(); ++jj) row.push_back(layer.weight(i, jj));
      w.push_back(std::move(row));
    }
    jl["bias"] = layer.bias;
    nlohmann::json alphas = nlohmann::json::array();
    for (const Activation& a : layer.acts) alphas.push_back(a.alpha);
    jl["alphas"] = std::move(alphas);
    j["layers"].push_back(std::move(jl));
  }
  return j;
}

inline std::string serialize(const Network& net) { return to_json(net).dump(2); }

inline Network network_from_json(const nlohmann::json& j) {
  Network net;
  net.input_dim = j.at("input_dim").get<int>();
  for (const auto& jl : j.at("layers")) {
    const auto& jw = jl.at("weight");
    int rows = static_cast<int>(jw.size());
    if (rows == 0) throw std::invalid_argument("network_from_json: empty weight matrix");
    int cols = static_cast<int>(jw.front().size());
    Matrix w(rows, cols);
    for (int i = 0; i < rows; ++i) {
      if (static_cast<int>(jw[i].size()) != cols)
        throw std::invalid_argument("network_from_json: ragged weight matrix");
      for (int c = 0; c < cols; ++c) w(i, c) = jw[i][c].get<double>();
    }
    std::vector<double> bias = jl.at("bias").get<std::vector<double>>();
    std::vector<double> alphas = jl.at("alphas").get<std::vector<double>>();
    if (static_cast<int>(bias.size()) != rows || static_cast<int>(alphas.size()) != rows)
      throw std::invalid_argument("network_from_json: bias/alphas length must equal weight row count");
    std::vector<Activation> acts;
    acts.reserve(alphas.size());
    for (double a : alphas) acts.push_back(Activation{a});
    net.layers.push_back(Layer{std::move(w), std::move(bias), std::move(acts)});
  }
  validate(net);
  return net;
}

inline Network deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("deserialize: ") + e.what());
  }
  return network_from_json(j);
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_network: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace lunet
