#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracdens/sde.hpp"

namespace fracdens {

// Flat key=value run configuration ('#' comments, later keys win), echoed
// verbatim into every output so a run can be reproduced from its artifacts.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    while (std::getline(in, line)) cfg.parse_line(line);
    return cfg;
  }

  void parse_line(const std::string& raw) {
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value, got '" + raw + "'");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_str(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }

  std::string require_str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument("config: missing required key '" + key + "'");
    return it->second;
  }

  double get_num(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : to_num(key, it->second);
  }

  double require_num(const std::string& key) const { return to_num(key, require_str(key)); }

  long get_int(const std::string& key, long dflt) const {
    return static_cast<long>(get_num(key, static_cast<double>(dflt)));
  }

  std::vector<double> get_list(const std::string& key) const {
    std::vector<double> out;
    auto it = kv_.find(key);
    if (it == kv_.end()) return out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_num(key, tok));
    return out;
  }

  // canonical echo: sorted key=value joined with ';'. The output directory
  // and the worker count are excluded: neither affects any computed value,
  // and outputs must be byte-identical regardless of --workers.
  std::string echo() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
      if (k == "out" || k == "workers") continue;
      if (!out.empty()) out += ";";
      out += k + "=" + v;
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    auto b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
  }

  static double to_num(const std::string& key, const std::string& value) {
    try {
      size_t pos = 0;
      double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument("config: field '" + key + "' is not a number: '" + value + "'");
    }
  }

  std::map<std::string, std::string> kv_;
};

// Model assembly with range validation; error messages name the offending
// field.
inline ModelSpec build_model(const RunConfig& cfg) {
  const int dim = static_cast<int>(cfg.get_int("model.dim", 1));
  if (dim < 1) throw std::invalid_argument("config: field 'model.dim' must be >= 1");
  const double hurst = cfg.get_num("model.hurst", 0.5);
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("config: field 'model.hurst' must lie in (0,1)");

  std::string kind = cfg.get_str("model.drift", "zero");
  DriftSpec drift;
  if (kind == "zero") {
    drift = DriftSpec::zero(dim);
  } else if (kind == "linear") {
    drift = DriftSpec::linear_rate(cfg.get_num("model.rate", 1.0), dim);
  } else if (kind == "tanh_well") {
    drift = DriftSpec::tanh_well(cfg.get_num("model.tanh_a", 2.0), dim);
  } else if (kind == "sign") {
    drift = DriftSpec::sign(cfg.get_num("model.sign_scale", 1.0), dim);
  } else if (kind == "parametric_linear") {
    drift = DriftSpec::parametric_linear(dim);
  } else {
    throw std::invalid_argument("config: field 'model.drift' unknown drift '" + kind + "'");
  }

  Eigen::MatrixXd sigma;
  auto entries = cfg.get_list("model.sigma");
  if (entries.empty()) {
    sigma = Eigen::MatrixXd::Identity(dim, dim);
  } else if (entries.size() == 1) {
    sigma = entries[0] * Eigen::MatrixXd::Identity(dim, dim);
  } else if (static_cast<int>(entries.size()) == dim * dim) {
    sigma.resize(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) sigma(i, j) = entries[i * dim + j];
  } else {
    throw std::invalid_argument("config: field 'model.sigma' needs 1 or dim*dim entries");
  }

  ModelSpec m;
  try {
    m = ModelSpec(drift, sigma, hurst);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (drift.needs_lambda()) {
    auto lam = cfg.get_list("model.lambda");
    if (lam.empty()) throw std::invalid_argument("config: field 'model.lambda' required for parametric drift");
    if (static_cast<int>(lam.size()) == 1) {
      m.lambda = Eigen::VectorXd::Constant(dim, lam[0]);
    } else if (static_cast<int>(lam.size()) == dim) {
      m.lambda = Eigen::Map<Eigen::VectorXd>(lam.data(), dim);
    } else {
      throw std::invalid_argument("config: field 'model.lambda' needs 1 or dim entries");
    }
  }
  return m;
}

}  // namespace fracdens
