#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frontload/error.hpp"

namespace frontload {

enum class Scenario { fig3, fig4, cut_pulse, encode_demo, hartman, window_scan };

inline std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::fig3: return "fig3";
    case Scenario::fig4: return "fig4";
    case Scenario::cut_pulse: return "cut";
    case Scenario::encode_demo: return "encode";
    case Scenario::hartman: return "hartman";
    case Scenario::window_scan: return "window";
  }
  return "unknown";
}

inline Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::fig3, Scenario::fig4, Scenario::cut_pulse, Scenario::encode_demo, Scenario::hartman,
                     Scenario::window_scan}) {
    if (scenario_name(s) == name) return s;
  }
  if (name == "cut_pulse") return Scenario::cut_pulse;
  if (name == "encode_demo") return Scenario::encode_demo;
  if (name == "window_scan") return Scenario::window_scan;
  throw DomainError("unknown scenario '" + name + "'");
}

using ParameterMap = std::map<std::string, std::string>;

/// Complete parameter set of a scenario. Lengths are in units of d, p0 in
/// units of 1/d.
inline ParameterMap default_parameters(Scenario s, bool paper_scale) {
  switch (s) {
    case Scenario::fig3:
      if (paper_scale)
        return {{"K", "150"}, {"n", "6"}, {"sigma", "1.5"}, {"span", "1.5"}, {"p0", "10"}, {"t", "0"},
                {"hump_offset", "-3"}, {"cut", "-1.5"}, {"grid_points", "4096"}, {"window_samples", "2001"}};
      return {{"K", "20"}, {"n", "2"}, {"sigma", "1.5"}, {"span", "1.5"}, {"p0", "10"}, {"t", "0"},
              {"hump_offset", "-3"}, {"cut", "-1.5"}, {"grid_points", "2048"}, {"window_samples", "801"}};
    case Scenario::fig4:
      if (paper_scale)
        return {{"p0", "3000"}, {"V_ratio", "2"}, {"d", "1"}, {"t", "1.5"}, {"sigma", "0.135"},
                {"hump_offset", "-3"}, {"grid_points", "2048"}, {"scan_points", "2001"}};
      return {{"p0", "30"}, {"V_ratio", "2"}, {"d", "1"}, {"t", "1.5"}, {"sigma", "2"},
              {"hump_offset", "-3"}, {"grid_points", "2048"}, {"scan_points", "2001"}};
    case Scenario::cut_pulse:
      return {{"channel", "spin"}, {"K", "40"}, {"n", "3"}, {"sigma", "1.5"}, {"span", "1.5"}, {"p0", "10"},
              {"V_ratio", "0.6"}, {"hump_offset", "-3"}, {"cut", "-1.5"}, {"grid_points", "2048"}};
    case Scenario::encode_demo:
      return {{"channel", "spin"}, {"K", "40"}, {"n", "3"}, {"sigma", "1.5"}, {"span", "1.5"}, {"p0", "10"},
              {"V_ratio", "2"}, {"hump_offset", "-3"}, {"cut", "-1.5"}, {"detector", "14"},
              {"noise", "1e-3"}, {"threshold", "1000"}, {"grid_points", "2048"}, {"time_steps", "160"}};
    case Scenario::hartman:
      if (paper_scale) return {{"p0", "1"}, {"V", "2"}, {"widths", "30,60,90,120,150"}, {"sigma_per_d", "2"},
                               {"time_per_d", "1.5"}, {"validity", "0.1"}, {"grid_points", "4096"}};
      return {{"p0", "1"}, {"V", "2"}, {"widths", "30,60,90"}, {"sigma_per_d", "2"}, {"time_per_d", "1.5"},
              {"validity", "0.1"}, {"grid_points", "4096"}};
    case Scenario::window_scan:
      if (paper_scale)
        return {{"K", "150"}, {"n", "6"}, {"n_max", "6"}, {"span", "1.5"}, {"sigma", "1.5"}, {"p0", "10"},
                {"hump_offset", "-3"}, {"samples", "2001"}};
      return {{"K", "40"}, {"n", "3"}, {"n_max", "6"}, {"span", "1.5"}, {"sigma", "1.5"}, {"p0", "10"},
              {"hump_offset", "-3"}, {"samples", "801"}};
  }
  return {};
}

/// Flat key=value text. Blank lines and lines starting with '#' are skipped.
inline ParameterMap parse_key_values(std::istream& is) {
  ParameterMap out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    s.erase(0, s.find_first_not_of(ws));
    auto end = s.find_last_not_of(ws);
    s.erase(end == std::string::npos ? 0 : end + 1);
    return s;
  };
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw DomainError("line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) throw DomainError("duplicate key '" + key + "'");
  }
  return out;
}

struct ExperimentConfig {
  Scenario scenario = Scenario::fig3;
  ParameterMap parameters;
  std::optional<int> digits;
  std::filesystem::path output_dir = ".";
  bool paper_scale = false;

  [[nodiscard]] const std::string& get(const std::string& key) const {
    auto it = parameters.find(key);
    if (it == parameters.end()) throw DomainError("missing parameter '" + key + "'");
    return it->second;
  }

  [[nodiscard]] double real(const std::string& key) const {
    const std::string& v = get(key);
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size()) throw DomainError("parameter '" + key + "' is not a number: '" + v + "'");
    return x;
  }

  [[nodiscard]] long integer(const std::string& key) const {
    const std::string& v = get(key);
    std::size_t used = 0;
    long x = 0;
    try {
      x = std::stol(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size()) throw DomainError("parameter '" + key + "' is not an integer: '" + v + "'");
    return x;
  }

  [[nodiscard]] std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double x = 0;
      try {
        x = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0) throw DomainError("parameter '" + key + "' has a bad entry '" + item + "'");
      out.push_back(x);
    }
    return out;
  }
};

/// Defaults for the scenario overridden by `overrides`. Unknown keys are
/// rejected; a `scenario` key must name the same scenario.
inline ExperimentConfig make_config(Scenario s, const ParameterMap& overrides, bool paper_scale = false) {
  ExperimentConfig cfg;
  cfg.scenario = s;
  cfg.paper_scale = paper_scale;
  cfg.parameters = default_parameters(s, paper_scale);
  for (const auto& [key, value] : overrides) {
    if (key == "scenario") {
      if (parse_scenario(value) != s) throw DomainError("config is for scenario '" + value + "'");
      continue;
    }
    auto it = cfg.parameters.find(key);
    if (it == cfg.parameters.end()) throw DomainError("unknown parameter '" + key + "' for " + scenario_name(s));
    it->second = value;
  }
  return cfg;
}

inline ExperimentConfig load_config(Scenario s, const std::filesystem::path& file, bool paper_scale = false) {
  std::ifstream in(file);
  if (!in) throw DomainError("cannot open config " + file.string());
  return make_config(s, parse_key_values(in), paper_scale);
}

}  // namespace frontload
