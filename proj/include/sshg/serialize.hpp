#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "sshg/grassmann.hpp"

namespace sshg {

/// Elements serialize as {"<mask in hex>": [re, im]} with zero
/// coefficients omitted.
inline nlohmann::json to_json(const Grassmann& x) {
  nlohmann::json j = nlohmann::json::object();
  j["generator_count"] = x.generators();
  nlohmann::json coeffs = nlohmann::json::object();
  for (unsigned m = 0; m < x.size(); ++m) {
    if (x[m] == Cplx(0.0)) continue;
    char key[16];
    std::snprintf(key, sizeof key, "%x", m);
    coeffs[key] = {x[m].real(), x[m].imag()};
  }
  j["coeffs"] = std::move(coeffs);
  return j;
}

inline Grassmann grassmann_from_json(const nlohmann::json& j) {
  Grassmann x(j.at("generator_count").get<int>());
  for (auto it = j.at("coeffs").begin(); it != j.at("coeffs").end(); ++it) {
    unsigned m = static_cast<unsigned>(std::stoul(it.key(), nullptr, 16));
    if (m >= x.size()) throw std::invalid_argument("grassmann json: mask out of range");
    x[m] = Cplx(it.value().at(0).get<double>(), it.value().at(1).get<double>());
  }
  return x;
}

}  // namespace sshg
