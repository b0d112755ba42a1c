#pragma once

#include <string>
#include <vector>

#include "procalab/fields.hpp"

namespace procalab {

inline constexpr const char* kVersion = "0.1.0";

std::string fmt_double(double x);  // round-trip safe (%.17g)

// CSV with "# key = value" preamble lines, then a header row and data rows.
void write_csv(const std::string& path, const std::vector<std::string>& preamble,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Field snapshots: group + lattice blocks and a row-major [re, im] matrix per
// edge, in enumeration order. Gauge and algebra snapshots share the schema.
std::string gauge_snapshot_json(const GaugeConfig& cfg,
                                const std::vector<std::string>& config_lines = {});
std::string algebra_snapshot_json(const AlgebraEdgeField& field,
                                  const std::vector<std::string>& config_lines = {});
GaugeConfig load_gauge_snapshot(const std::string& json_text);
AlgebraEdgeField load_algebra_snapshot(const std::string& json_text);

}  // namespace procalab
