#pragma once

// Flat `key = value` run configuration. '#' starts a comment. Unknown keys
// are rejected so typos do not silently fall back to defaults.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rqt/errors.hpp"
#include "rqt/numerics/steppers.hpp"
#include "rqt/scenario.hpp"

namespace rqt::cli {

struct AbPair {
  double a = 1.0;
  double b = 0.0;
};

struct RunConfig {
  std::optional<Scenario> scenario;  // unset: each command picks its documented default
  std::vector<AbPair> ab_list;       // empty: command default family
  std::optional<double> t_min, t_max, dt;  // s
  std::optional<double> x_min, x_max, x0;  // fm
  std::optional<std::size_t> samples;
  std::optional<double> hbar_scale;        // applied on top of whichever scenario is used
  numerics::StepMethod method = numerics::StepMethod::RK4;
  double step = 1e-3;                // fm
  std::vector<double> epsilons{1.0, 0.5, 0.25, 0.125};
  double clip_ceiling = 1e6;         // fm
  bool si_output = true;
  std::string out = ".";
  std::map<std::string, std::string> echo;  // everything that was set, for CSV headers
};

namespace detail {

inline std::string trim(std::string s) {
  auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
  return s;
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

}  // namespace detail

/// "a,b;a,b;..." with a != 0.
inline std::vector<AbPair> parse_ab_list(const std::string& text) {
  std::vector<AbPair> out;
  for (const auto& item : detail::split(text, ';')) {
    const auto parts = detail::split(item, ',');
    if (parts.size() != 2) throw ConfigError("ab_list entry '" + item + "' is not of the form a,b");
    const AbPair p{detail::parse_double("ab_list", parts[0]), detail::parse_double("ab_list", parts[1])};
    if (p.a == 0.0) throw ConfigError("ab_list entry '" + item + "': a must be nonzero");
    out.push_back(p);
  }
  if (out.empty()) throw ConfigError("ab_list is empty");
  return out;
}

inline std::size_t parse_samples(const std::string& text) {
  const double v = detail::parse_double("samples", text);
  if (!(v >= 16.0) || v != std::floor(v)) throw ConfigError("samples must be an integer >= 16");
  return static_cast<std::size_t>(v);
}

inline double parse_epsilon(const std::string& key, const std::string& text) {
  const double v = detail::parse_double(key, text);
  if (!(v > 0.0 && v <= 1.0)) throw ConfigError(key + " must lie in (0, 1]");
  return v;
}

/// Applies one key to the config. Scenario keys build on the default electron
/// at E = 2 MeV in a zero constant potential.
inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  static const std::set<std::string> scenario_keys{"species",      "energy_mev", "potential",      "u0_mev",
                                                   "g_mev_per_fm", "hbar_scale", "rest_energy_mev"};
  using detail::parse_double;
  cfg.echo[key] = value;
  if (scenario_keys.count(key)) {
    Scenario s = cfg.scenario.value_or(Scenario{});
    if (key == "species") {
      if (value == "electron") s.species = Species::electron();
      else if (value == "photon") s.species = Species::photon();
      else throw ConfigError("species must be 'electron' or 'photon', got '" + value + "'");
    } else if (key == "rest_energy_mev") {
      s.species.rest_energy = parse_double(key, value);
    } else if (key == "energy_mev") {
      s.energy = parse_double(key, value);
    } else if (key == "potential") {
      const double p = s.potential.parameter();
      if (value == "constant") s.potential = Potential::constant(s.potential.is_constant() ? p : 0.0);
      else if (value == "linear") s.potential = Potential::linear(s.potential.is_constant() ? 0.25 : p);
      else throw ConfigError("potential must be 'constant' or 'linear', got '" + value + "'");
    } else if (key == "u0_mev") {
      s.potential = Potential::constant(parse_double(key, value));
    } else if (key == "g_mev_per_fm") {
      s.potential = Potential::linear(parse_double(key, value));
    } else if (key == "hbar_scale") {
      s.hbar_scale = parse_epsilon(key, value);
    }
    cfg.scenario = s;
    return;
  }
  if (key == "ab_list") cfg.ab_list = parse_ab_list(value);
  else if (key == "t_min_s") cfg.t_min = parse_double(key, value);
  else if (key == "t_max_s") cfg.t_max = parse_double(key, value);
  else if (key == "dt_s") cfg.dt = parse_double(key, value);
  else if (key == "x_min_fm") cfg.x_min = parse_double(key, value);
  else if (key == "x_max_fm") cfg.x_max = parse_double(key, value);
  else if (key == "x0_fm") cfg.x0 = parse_double(key, value);
  else if (key == "samples") cfg.samples = parse_samples(value);
  else if (key == "method") cfg.method = numerics::parse_step_method(value);
  else if (key == "step_fm") {
    cfg.step = parse_double(key, value);
    if (!(cfg.step > 0.0)) throw ConfigError("step_fm must be positive");
  } else if (key == "epsilons") {
    cfg.epsilons.clear();
    for (const auto& e : detail::split(value, ',')) cfg.epsilons.push_back(parse_epsilon(key, e));
    if (cfg.epsilons.empty()) throw ConfigError("epsilons is empty");
  } else if (key == "clip_ceiling_fm") {
    cfg.clip_ceiling = parse_double(key, value);
    if (!(cfg.clip_ceiling > 0.0)) throw ConfigError("clip_ceiling_fm must be positive");
  } else if (key == "si_output") {
    if (value == "true" || value == "1") cfg.si_output = true;
    else if (value == "false" || value == "0") cfg.si_output = false;
    else throw ConfigError("si_output must be true or false");
  } else if (key == "out") cfg.out = value;
  else throw ConfigError("unknown configuration key '" + key + "'");
}

/// An explicit rest_energy_mev wins over the species preset, whatever the key
/// order; a photon with a nonzero rest energy (or an electron with none) is an error.
inline void validate(RunConfig& cfg) {
  if (cfg.scenario) {
    const auto rest = cfg.echo.find("rest_energy_mev");
    if (rest != cfg.echo.end()) cfg.scenario->species.rest_energy = detail::parse_double(rest->first, rest->second);
    const auto sp = cfg.echo.find("species");
    if (sp != cfg.echo.end() && rest != cfg.echo.end()) {
      const bool photon = sp->second == "photon";
      if (photon != cfg.scenario->species.is_photon())
        throw ConfigError("species '" + sp->second + "' conflicts with rest_energy_mev = " + rest->second);
    }
    cfg.scenario->validate();
  }
  if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("dt_s must be positive");
  if (cfg.t_min && cfg.t_max && !(*cfg.t_max > *cfg.t_min)) throw ConfigError("t_max_s must exceed t_min_s");
  if (cfg.x_min && cfg.x_max && !(*cfg.x_max > *cfg.x_min)) throw ConfigError("x_max_fm must exceed x_min_fm");
}

inline RunConfig parse_config_text(const std::string& text, RunConfig cfg = {}) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    apply_key(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

inline RunConfig load_config(const std::string& path, RunConfig cfg = {}) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), std::move(cfg));
}

}  // namespace rqt::cli
