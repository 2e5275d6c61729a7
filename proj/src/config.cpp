/*
 Copyright 2026 The ddnpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "ddnpc/config.hpp"

#include "ddnpc/io.hpp"

#include <set>

namespace ddnpc {

namespace {

nlohmann::json eps_to_json(const EpsSetting& e) {
  return e.value ? nlohmann::json(*e.value) : nlohmann::json("estimate");
}

EpsSetting eps_from_json(const nlohmann::json& j, const std::string& key) {
  if (j.is_string()) {
    if (j.get<std::string>() != "estimate") throw ConfigError(key + ": expected \"estimate\" or a number");
    return {};
  }
  if (!j.is_number()) throw ConfigError(key + ": expected \"estimate\" or a number");
  const double v = j.get<double>();
  if (!(v >= 0.0)) throw ConfigError(key + ": eps* must be >= 0");
  return EpsSetting{v};
}

Matrix diagonal(const std::vector<double>& d) {
  Matrix M = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) M(i, i) = d[i];
  return M;
}

}  // namespace

const PlantModel& ExperimentConfig::plant_model() const {
  try {
    return find_plant(plant);
  } catch (const LookupError& e) {
    throw ConfigError(std::string("plant: ") + e.what());
  }
}

Dictionary ExperimentConfig::make_dictionary() const {
  const PlantModel& p = plant_model();
  if (dictionary.is_string()) {
    if (dictionary.get<std::string>() != "default") throw ConfigError("dictionary: expected \"default\" or a descriptor");
    return default_dictionary(p);
  }
  try {
    Dictionary d = Dictionary::from_descriptor(dictionary);
    if (d.m() != p.m() || d.n() != p.n()) throw ConfigError("dictionary: dimensions do not match the plant");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("dictionary: ") + e.what());
  }
}

NpcConfig ExperimentConfig::npc_config() const {
  const PlantModel& p = plant_model();
  NpcConfig c = NpcConfig::defaults(p.m(), L, input_box ? *input_box : p.input_box());
  c.lambda_alpha = lambda_alpha;
  c.lambda_sigma = lambda_sigma;
  c.Q = diagonal(Q);
  c.R = diagonal(R);
  return c;
}

Vector ExperimentConfig::initial_state() const {
  return Eigen::Map<const Vector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
}

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion)
    throw ConfigError("schema_version " + std::to_string(schema_version) + " is not supported (expected " +
                      std::to_string(kConfigSchemaVersion) + ")");
  const PlantModel& p = plant_model();
  const Dictionary dict = make_dictionary();
  const int m = p.m();
  const int dmax = p.d_max();
  if (L < dmax) throw ConfigError("L = " + std::to_string(L) + " must be >= d_max = " + std::to_string(dmax));
  const int order = L + dmax + p.n();
  const int rows = dict.r() * order;
  if (N - order + 1 < rows)
    throw ConfigError("N = " + std::to_string(N) + " too small: the depth-" + std::to_string(order) + " Hankel has " +
                      std::to_string(rows) + " rows but only " + std::to_string(std::max(0, N - order + 1)) +
                      " columns");
  if (validation_N < 1) throw ConfigError("validation_N must be >= 1");
  if (!(excitation.amplitude > 0.0)) throw ConfigError("excitation.amplitude must be > 0");
  if (excitation.signal != "uniform") throw ConfigError("excitation.signal: only \"uniform\" is supported");
  if (!(lambda_alpha > 0.0) || !(lambda_sigma > 0.0)) throw ConfigError("lambda_alpha and lambda_sigma must be > 0");
  if (static_cast<int>(Q.size()) != m || static_cast<int>(R.size()) != m)
    throw ConfigError("Q and R must list " + std::to_string(m) + " diagonal entries");
  for (double q : Q)
    if (!(q > 0.0)) throw ConfigError("Q entries must be > 0");
  for (double r : R)
    if (!(r > 0.0)) throw ConfigError("R entries must be > 0");
  if (input_box) {
    if (input_box->dim() != m) throw ConfigError("input_box must have " + std::to_string(m) + " entries");
    if (!((input_box->lower.array() < 0.0).all() && (input_box->upper.array() > 0.0).all()))
      throw ConfigError("input_box must contain the zero input in its interior");
  }
  if (!(w_star >= 0.0)) throw ConfigError("w_star must be >= 0");
  if (w_star_grid.empty()) throw ConfigError("w_star_grid is empty");
  for (double w : w_star_grid)
    if (!(w >= 0.0)) throw ConfigError("w_star_grid entries must be >= 0");
  if (eps_star_grid.empty()) throw ConfigError("eps_star_grid is empty");
  if (static_cast<int>(x0.size()) != p.n()) throw ConfigError("x0 must have " + std::to_string(p.n()) + " entries");
  if (n_steps < 2 * dmax || n_steps % dmax != 0)
    throw ConfigError("n_steps must be a multiple of d_max = " + std::to_string(dmax) + " and at least 2 d_max");
  if (seeds < 1) throw ConfigError("seeds must be >= 1");
  if (!(c3 > 0.0)) throw ConfigError("c3 must be > 0");
  if (estimation.lipschitz_samples < 1 || estimation.k_w_trials < 0)
    throw ConfigError("estimation sample counts must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["schema_version"] = c.schema_version;
  j["plant"] = c.plant;
  j["dictionary"] = c.dictionary;
  j["N"] = c.N;
  j["validation_N"] = c.validation_N;
  j["excitation"] = {{"amplitude", c.excitation.amplitude}, {"seed", c.excitation.seed}, {"signal", c.excitation.signal}};
  j["L"] = c.L;
  j["lambda_alpha"] = c.lambda_alpha;
  j["lambda_sigma"] = c.lambda_sigma;
  j["Q"] = c.Q;
  j["R"] = c.R;
  if (c.input_box) {
    j["input_box"] = {{"lower", std::vector<double>(c.input_box->lower.data(), c.input_box->lower.data() + c.input_box->dim())},
                      {"upper", std::vector<double>(c.input_box->upper.data(), c.input_box->upper.data() + c.input_box->dim())}};
  }
  j["w_star"] = c.w_star;
  j["w_star_grid"] = c.w_star_grid;
  j["eps_star"] = eps_to_json(c.eps_star);
  j["eps_star_grid"] = nlohmann::json::array();
  for (const auto& e : c.eps_star_grid) j["eps_star_grid"].push_back(eps_to_json(e));
  j["x0"] = c.x0;
  j["n_steps"] = c.n_steps;
  j["seeds"] = c.seeds;
  j["seed"] = c.seed;
  j["c3"] = c.c3;
  j["estimation"] = {{"lipschitz_samples", c.estimation.lipschitz_samples},
                     {"k_w_trials", c.estimation.k_w_trials},
                     {"seed", c.estimation.seed},
                     {"omega_margin", c.estimation.omega_margin}};
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "schema_version", "plant",  "dictionary",  "N",     "validation_N", "excitation", "L",
      "lambda_alpha",   "lambda_sigma", "Q",     "R",     "input_box",    "w_star",     "w_star_grid",
      "eps_star",       "eps_star_grid", "x0",   "n_steps", "seeds",      "seed",       "c3",
      "estimation",     "output_dir"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  if (!j.contains("schema_version")) throw ConfigError("missing schema_version");

  ExperimentConfig c;
  try {
    c.schema_version = j.at("schema_version").get<int>();
    if (j.contains("plant")) c.plant = j["plant"].get<std::string>();
    if (j.contains("dictionary")) c.dictionary = j["dictionary"];
    if (j.contains("N")) c.N = j["N"].get<int>();
    if (j.contains("validation_N")) c.validation_N = j["validation_N"].get<int>();
    if (j.contains("excitation")) {
      const auto& e = j["excitation"];
      for (const auto& [key, _] : e.items())
        if (key != "amplitude" && key != "seed" && key != "signal") throw ConfigError("unknown excitation key '" + key + "'");
      if (e.contains("amplitude")) c.excitation.amplitude = e["amplitude"].get<double>();
      if (e.contains("seed")) c.excitation.seed = e["seed"].get<Seed>();
      if (e.contains("signal")) c.excitation.signal = e["signal"].get<std::string>();
    }
    if (j.contains("L")) c.L = j["L"].get<int>();
    if (j.contains("lambda_alpha")) c.lambda_alpha = j["lambda_alpha"].get<double>();
    if (j.contains("lambda_sigma")) c.lambda_sigma = j["lambda_sigma"].get<double>();
    if (j.contains("Q")) c.Q = j["Q"].get<std::vector<double>>();
    if (j.contains("R")) c.R = j["R"].get<std::vector<double>>();
    if (j.contains("input_box")) {
      const auto lo = j["input_box"].at("lower").get<std::vector<double>>();
      const auto hi = j["input_box"].at("upper").get<std::vector<double>>();
      if (lo.size() != hi.size()) throw ConfigError("input_box: lower and upper differ in length");
      c.input_box = Box{Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                        Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()))};
    }
    if (j.contains("w_star")) c.w_star = j["w_star"].get<double>();
    if (j.contains("w_star_grid")) c.w_star_grid = j["w_star_grid"].get<std::vector<double>>();
    if (j.contains("eps_star")) c.eps_star = eps_from_json(j["eps_star"], "eps_star");
    if (j.contains("eps_star_grid")) {
      if (!j["eps_star_grid"].is_array()) throw ConfigError("eps_star_grid must be an array");
      c.eps_star_grid.clear();
      for (const auto& e : j["eps_star_grid"]) c.eps_star_grid.push_back(eps_from_json(e, "eps_star_grid"));
    }
    if (j.contains("x0")) c.x0 = j["x0"].get<std::vector<double>>();
    if (j.contains("n_steps")) c.n_steps = j["n_steps"].get<int>();
    if (j.contains("seeds")) c.seeds = j["seeds"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<Seed>();
    if (j.contains("c3")) c.c3 = j["c3"].get<double>();
    if (j.contains("estimation")) {
      const auto& e = j["estimation"];
      if (e.contains("lipschitz_samples")) c.estimation.lipschitz_samples = e["lipschitz_samples"].get<long>();
      if (e.contains("k_w_trials")) c.estimation.k_w_trials = e["k_w_trials"].get<long>();
      if (e.contains("seed")) c.estimation.seed = e["seed"].get<Seed>();
      if (e.contains("omega_margin")) c.estimation.omega_margin = e["omega_margin"].get<double>();
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = read_json(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j);
}

}  // namespace ddnpc
