#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "unfoldir/errors.hpp"

namespace unfoldir {

// Every knob of the solver in one flat struct; config documents mirror it
// one key per field with no nesting.
struct SolverConfig {
  double beta = 0.05;        // reflectance proximal weight
  double gamma = 0.05;       // illumination proximal weight
  double lambda = 0.1;       // weighted illumination smoothness
  double mu = 0.01;          // texture-consistency coupling
  double s = 0.1;            // edge-stopping scale of the diffusion coefficient
  double huber_delta = 0.01; // knee of the smoothed l1 (Lipschitz scale 1/delta)
  double epsilon = 1e-4;     // illumination floor at initialisation
  int stages = 3;
  double cg_tol = 1e-8;
  int cg_max_iter = 500;
  std::string prox_illum = "guided";  // "identity" | "gaussian" | "guided"
  double prox_sigma = 1.5;            // gaussian mode width
  int guided_radius = 2;
  double guided_reg = 1e-3;
  double shrink_tau = 0.02;  // detail-band soft threshold
  double gw_sigma = 1.0;     // gate slope
  double gw_mu = 0.0;        // gate bias
  int isic_last_n = 2;       // stages entering the consistency score
  double relit_gamma = 2.2;  // illumination exponent in relit output mode

  void validate() const {
    auto bad = [](const std::string& key, const std::string& why) {
      throw ConfigError("config: " + key + " " + why);
    };
    if (beta <= 0.0) bad("beta", "must be > 0");
    if (gamma <= 0.0) bad("gamma", "must be > 0");
    if (lambda < 0.0) bad("lambda", "must be >= 0");
    if (mu < 0.0) bad("mu", "must be >= 0");
    if (s <= 0.0) bad("s", "must be > 0");
    if (huber_delta <= 0.0) bad("huber_delta", "must be > 0");
    if (!(epsilon > 0.0 && epsilon < 0.1)) bad("epsilon", "must lie in (0, 0.1)");
    if (stages < 1) bad("stages", "must be >= 1");
    if (cg_tol <= 0.0) bad("cg_tol", "must be > 0");
    if (cg_max_iter < 1) bad("cg_max_iter", "must be >= 1");
    if (prox_illum != "identity" && prox_illum != "gaussian" && prox_illum != "guided")
      bad("prox_illum", "must be \"identity\", \"gaussian\" or \"guided\"");
    if (prox_sigma <= 0.0) bad("prox_sigma", "must be > 0");
    if (guided_radius < 1) bad("guided_radius", "must be >= 1");
    if (guided_reg <= 0.0) bad("guided_reg", "must be > 0");
    if (shrink_tau < 0.0) bad("shrink_tau", "must be >= 0");
    if (isic_last_n < 1) bad("isic_last_n", "must be >= 1");
    if (relit_gamma <= 0.0) bad("relit_gamma", "must be > 0");
  }
};

// A config document is the SolverConfig keys plus optional io keys; flags on
// the command line override whatever the file carries.
struct CliConfigFile {
  SolverConfig solver;
  std::string input;
  std::string output;
  std::string trace_dir;
  std::string output_mode;  // "" (default), "reflectance" or "relit"
};

namespace detail {

inline double get_number(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_number())
    throw ConfigError("config: " + key + " must be a number");
  return j.at(key).get<double>();
}

inline int get_integer(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_number_integer())
    throw ConfigError("config: " + key + " must be an integer");
  return j.at(key).get<int>();
}

inline std::string get_string(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_string())
    throw ConfigError("config: " + key + " must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace detail

// Parse a flat config document; absent keys keep their defaults, unknown keys
// are rejected so typos never silently fall back.
inline CliConfigFile cli_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: document must be a JSON object");

  static const char* known[] = {
      "beta",        "gamma",       "lambda",      "mu",
      "s",           "huber_delta", "epsilon",     "stages",
      "cg_tol",      "cg_max_iter", "prox_illum",  "prox_sigma",
      "guided_radius", "guided_reg", "shrink_tau", "gw_sigma",
      "gw_mu",       "isic_last_n", "relit_gamma", "input",
      "output",      "trace_dir",   "output_mode"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("config: unknown key \"" + it.key() + "\"");
  }

  CliConfigFile f;
  SolverConfig& c = f.solver;
  using detail::get_integer;
  using detail::get_number;
  using detail::get_string;
  if (j.contains("beta")) c.beta = get_number(j, "beta");
  if (j.contains("gamma")) c.gamma = get_number(j, "gamma");
  if (j.contains("lambda")) c.lambda = get_number(j, "lambda");
  if (j.contains("mu")) c.mu = get_number(j, "mu");
  if (j.contains("s")) c.s = get_number(j, "s");
  if (j.contains("huber_delta")) c.huber_delta = get_number(j, "huber_delta");
  if (j.contains("epsilon")) c.epsilon = get_number(j, "epsilon");
  if (j.contains("stages")) c.stages = get_integer(j, "stages");
  if (j.contains("cg_tol")) c.cg_tol = get_number(j, "cg_tol");
  if (j.contains("cg_max_iter")) c.cg_max_iter = get_integer(j, "cg_max_iter");
  if (j.contains("prox_illum")) c.prox_illum = get_string(j, "prox_illum");
  if (j.contains("prox_sigma")) c.prox_sigma = get_number(j, "prox_sigma");
  if (j.contains("guided_radius")) c.guided_radius = get_integer(j, "guided_radius");
  if (j.contains("guided_reg")) c.guided_reg = get_number(j, "guided_reg");
  if (j.contains("shrink_tau")) c.shrink_tau = get_number(j, "shrink_tau");
  if (j.contains("gw_sigma")) c.gw_sigma = get_number(j, "gw_sigma");
  if (j.contains("gw_mu")) c.gw_mu = get_number(j, "gw_mu");
  if (j.contains("isic_last_n")) c.isic_last_n = get_integer(j, "isic_last_n");
  if (j.contains("relit_gamma")) c.relit_gamma = get_number(j, "relit_gamma");
  if (j.contains("input")) f.input = get_string(j, "input");
  if (j.contains("output")) f.output = get_string(j, "output");
  if (j.contains("trace_dir")) f.trace_dir = get_string(j, "trace_dir");
  if (j.contains("output_mode")) f.output_mode = get_string(j, "output_mode");
  if (!f.output_mode.empty() && f.output_mode != "reflectance" && f.output_mode != "relit")
    throw ConfigError("config: output_mode must be \"reflectance\" or \"relit\"");
  c.validate();
  return f;
}

inline SolverConfig config_from_json(const std::string& text) {
  return cli_config_from_json(text).solver;
}

// Solver keys only; io keys are command-line concerns and are never echoed.
inline std::string config_to_json(const SolverConfig& c) {
  nlohmann::json j;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["lambda"] = c.lambda;
  j["mu"] = c.mu;
  j["s"] = c.s;
  j["huber_delta"] = c.huber_delta;
  j["epsilon"] = c.epsilon;
  j["stages"] = c.stages;
  j["cg_tol"] = c.cg_tol;
  j["cg_max_iter"] = c.cg_max_iter;
  j["prox_illum"] = c.prox_illum;
  j["prox_sigma"] = c.prox_sigma;
  j["guided_radius"] = c.guided_radius;
  j["guided_reg"] = c.guided_reg;
  j["shrink_tau"] = c.shrink_tau;
  j["gw_sigma"] = c.gw_sigma;
  j["gw_mu"] = c.gw_mu;
  j["isic_last_n"] = c.isic_last_n;
  j["relit_gamma"] = c.relit_gamma;
  return j.dump(2) + "\n";
}

inline CliConfigFile load_cli_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return cli_config_from_json(ss.str());
}

inline SolverConfig load_config(const std::string& path) {
  return load_cli_config(path).solver;
}

inline void save_config(const SolverConfig& c, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("config: cannot open " + path + " for writing");
  f << config_to_json(c);
  if (!f) throw IoError("config: write failed for " + path);
}

}  // namespace unfoldir
