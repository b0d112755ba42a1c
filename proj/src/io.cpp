#include "procalab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace procalab {

using nlohmann::json;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& preamble,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  for (const auto& line : preamble) os << "# " << line << "\n";
  for (std::size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "");
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 < row.size() ? "," : "");
    os << "\n";
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << content;
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      rows.push_back({m(r, c).real(), m(r, c).imag()});
  return rows;
}

Matrix matrix_from_json(const json& j, int N) {
  Matrix m(N, N);
  if (static_cast<int>(j.size()) != N * N)
    throw std::runtime_error("snapshot: matrix entry count mismatch");
  int k = 0;
  for (Eigen::Index r = 0; r < N; ++r)
    for (Eigen::Index c = 0; c < N; ++c) {
      m(r, c) = cxd(j[static_cast<std::size_t>(k)][0].get<double>(),
                    j[static_cast<std::size_t>(k)][1].get<double>());
      ++k;
    }
  return m;
}

json group_to_json(const GroupSpec& g) {
  return json{{"family", family_name(g.family)},
              {"matrix_size", g.matrix_size},
              {"chart_radius", g.chart_radius}};
}

GroupSpec group_from_json(const json& j) {
  return GroupSpec::make(family_from_name(j.at("family").get<std::string>()),
                         j.at("matrix_size").get<int>(),
                         j.at("chart_radius").get<double>());
}

json lattice_to_json(const LatticeComplex& lat) {
  json j{{"dimension", lat.spec().dimension},
         {"side", lat.spec().side},
         {"topology", lat.is_torus() ? "torus" : "box"},
         {"plaquette_rule",
          lat.spec().plaquette_rule == BoxPlaquetteRule::Coupled ? "coupled"
                                                                 : "interior_only"},
         {"kind", lat.n_edges() == 4 && lat.n_plaquettes() == 1 &&
                          lat.spec().side == 1 && !lat.is_torus() &&
                          lat.boundary_edges().empty()
                      ? "single_plaquette"
                      : "lattice"}};
  return j;
}

std::shared_ptr<const LatticeComplex> lattice_from_json(const json& j) {
  if (j.at("kind").get<std::string>() == "single_plaquette")
    return std::make_shared<LatticeComplex>(LatticeComplex::make_single_plaquette());
  LatticeSpec spec;
  spec.dimension = j.at("dimension").get<int>();
  spec.side = j.at("side").get<int>();
  spec.topology =
      j.at("topology").get<std::string>() == "torus" ? Topology::Torus : Topology::Box;
  spec.plaquette_rule = j.at("plaquette_rule").get<std::string>() == "coupled"
                            ? BoxPlaquetteRule::Coupled
                            : BoxPlaquetteRule::InteriorOnly;
  return std::make_shared<LatticeComplex>(LatticeComplex::make(spec));
}

template <typename FieldT>
json snapshot_json(const std::string& schema, const FieldT& f,
                   const std::vector<Matrix>& entries,
                   const std::vector<std::string>& config_lines) {
  json j;
  j["schema"] = schema;
  j["version"] = kVersion;
  j["group"] = group_to_json(f.group);
  j["lattice"] = lattice_to_json(*f.lat);
  if (!config_lines.empty()) j["config"] = config_lines;
  json edges = json::array();
  for (int e = 0; e < f.lat->n_edges(); ++e) {
    const Edge& ed = f.lat->edges()[static_cast<std::size_t>(e)];
    json base = json::array();
    for (int c = 0; c < f.lat->dim(); ++c) base.push_back(ed.base[c]);
    edges.push_back(json{{"base", base},
                         {"dir", ed.dir + 1},
                         {"m", matrix_to_json(entries[static_cast<std::size_t>(e)])}});
  }
  j["edges"] = std::move(edges);
  return j;
}

template <typename FieldT>
void load_entries(const json& j, FieldT& f, std::vector<Matrix>& entries) {
  const auto& edges = j.at("edges");
  if (static_cast<int>(edges.size()) != f.lat->n_edges())
    throw std::runtime_error("snapshot: edge count mismatch");
  for (int e = 0; e < f.lat->n_edges(); ++e) {
    const Edge& ed = f.lat->edges()[static_cast<std::size_t>(e)];
    const auto& je = edges[static_cast<std::size_t>(e)];
    if (je.at("dir").get<int>() != ed.dir + 1)
      throw std::runtime_error("snapshot: edge order mismatch");
    for (int c = 0; c < f.lat->dim(); ++c)
      if (je.at("base")[static_cast<std::size_t>(c)].get<int>() != ed.base[c])
        throw std::runtime_error("snapshot: edge order mismatch");
    entries[static_cast<std::size_t>(e)] =
        matrix_from_json(je.at("m"), f.group.matrix_size);
  }
}

}  // namespace

std::string gauge_snapshot_json(const GaugeConfig& cfg,
                                const std::vector<std::string>& config_lines) {
  return snapshot_json("procalab/gauge-field-v1", cfg, cfg.U, config_lines).dump(1);
}

std::string algebra_snapshot_json(const AlgebraEdgeField& field,
                                  const std::vector<std::string>& config_lines) {
  return snapshot_json("procalab/algebra-field-v1", field, field.X, config_lines)
      .dump(1);
}

GaugeConfig load_gauge_snapshot(const std::string& json_text) {
  const json j = json::parse(json_text);
  if (j.at("schema").get<std::string>() != "procalab/gauge-field-v1")
    throw std::runtime_error("load_gauge_snapshot: wrong schema");
  GaugeConfig cfg;
  cfg.group = group_from_json(j.at("group"));
  cfg.lat = lattice_from_json(j.at("lattice"));
  cfg.U.assign(static_cast<std::size_t>(cfg.lat->n_edges()), cfg.group.identity());
  load_entries(j, cfg, cfg.U);
  return cfg;
}

AlgebraEdgeField load_algebra_snapshot(const std::string& json_text) {
  const json j = json::parse(json_text);
  if (j.at("schema").get<std::string>() != "procalab/algebra-field-v1")
    throw std::runtime_error("load_algebra_snapshot: wrong schema");
  AlgebraEdgeField f;
  f.group = group_from_json(j.at("group"));
  f.lat = lattice_from_json(j.at("lattice"));
  f.X.assign(static_cast<std::size_t>(f.lat->n_edges()), f.group.zero());
  load_entries(j, f, f.X);
  return f;
}

}  // namespace procalab
