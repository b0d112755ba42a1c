#include "procalab/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "procalab/io.hpp"

namespace procalab {

namespace {

// Allowed keys per section; parsing rejects anything else.
const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"run", {"experiment", "seed", "out_dir", "threads"}},
      {"group", {"family", "matrix_size", "chart_radius"}},
      {"lattice", {"dimension", "side", "topology", "plaquette_rule"}},
      {"ymh", {"beta", "mass", "kappa", "boundary"}},
      {"mcmc",
       {"sweeps", "burn_in", "thin", "proposal_scale", "tune", "checkerboard",
        "snapshot_every"}},
      {"proca",
       {"beta", "mass", "samples", "conditioned", "eta_component_norm",
        "export_precision"}},
      {"form", {"family", "radius", "slice", "direction", "center", "slices"}},
      {"pair", {"epsilon", "snapshot", "beta"}},
      {"lift", {"snapshot", "scaled", "beta"}},
      {"compare",
       {"method", "quadrature_points", "beta_list", "samples", "epsilon"}},
      {"decay", {"mass_list", "fit_min", "fit_max", "beta"}},
      {"scaling",
       {"epsilon_list", "delta", "mass", "pad", "rate_constant", "error_terms"}},
      {"spectrum", {"beta", "mass"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void check_key(const std::string& section, const std::string& key) {
  const auto& sch = schema();
  auto it = sch.find(section);
  if (it == sch.end()) throw ConfigError(section, "unknown section");
  if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
    throw ConfigError(section + "." + key, "unknown key");
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno), "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (schema().find(section) == schema().end())
        throw ConfigError(section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(key, "key outside of any [section]");
    check_key(section, key);
    cfg.values_[section][key] = value;
  }
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
  return parse(read_text_file(path));
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  for (const auto& [section, keys] : schema()) {
    auto sit = values_.find(section);
    if (sit == values_.end()) continue;
    os << "[" << section << "]\n";
    for (const auto& key : keys) {
      auto kit = sit->second.find(key);
      if (kit != sit->second.end()) os << key << " = " << kit->second << "\n";
    }
    os << "\n";
  }
  return os.str();
}

std::vector<std::string> RunConfig::lines() const {
  std::vector<std::string> out;
  for (const auto& [section, keys] : values_)
    for (const auto& [key, value] : keys)
      out.push_back(section + "." + key + " = " + value);
  return out;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  auto sit = values_.find(section);
  return sit != values_.end() && sit->second.count(key) > 0;
}

std::string RunConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  auto sit = values_.find(section);
  if (sit == values_.end()) return fallback;
  auto kit = sit->second.find(key);
  return kit == sit->second.end() ? fallback : kit->second;
}

std::string RunConfig::require_string(const std::string& section,
                                      const std::string& key) const {
  if (!has(section, key)) throw ConfigError(section + "." + key, "missing required key");
  return get_string(section, key, "");
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(section + "." + key, "not a number: '" + v + "'");
  return x;
}

long RunConfig::get_long(const std::string& section, const std::string& key,
                         long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(section + "." + key, "not an integer: '" + v + "'");
  return x;
}

bool RunConfig::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError(section + "." + key, "not a boolean: '" + v + "'");
}

std::vector<double> RunConfig::get_double_list(const std::string& section,
                                               const std::string& key,
                                               const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  std::istringstream is(get_string(section, key, ""));
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError(section + "." + key, "bad list entry: '" + tok + "'");
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError(section + "." + key, "empty list");
  return out;
}

void RunConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  check_key(section, key);
  values_[section][key] = value;
}

}  // namespace procalab
