#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace procalab {

// Configuration error naming the offending field; the CLI maps it to exit 2.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& msg)
      : std::runtime_error(field_ + ": " + msg), field(std::move(field_)) {}
};

// Line-based "key = value" file with [section] headers and '#' comments.
// Unknown sections or keys are rejected against a fixed schema.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text);
  static RunConfig load_file(const std::string& path);

  // Canonical serialization (sections and keys in schema order); re-parsing
  // yields an equal config.
  std::string serialize() const;
  std::vector<std::string> lines() const;  // "section.key = value"

  bool operator==(const RunConfig& other) const { return values_ == other.values_; }

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::string require_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long get_long(const std::string& section, const std::string& key,
                long fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key,
                                      const std::vector<double>& fallback) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);

  // Convenience for the CLI-level settings.
  std::string experiment() const { return get_string("run", "experiment", ""); }
  std::uint64_t seed() const {
    return static_cast<std::uint64_t>(get_long("run", "seed", 0));
  }
  std::string out_dir() const { return get_string("run", "out_dir", "."); }
  int threads() const { return static_cast<int>(get_long("run", "threads", 1)); }

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace procalab
