#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace procalab {

constexpr int kMaxDim = 4;
using Coord = std::array<int, kMaxDim>;  // unused trailing coords are 0

enum class Topology { Torus, Box };

// Rule for which plaquettes a box carries. Coupled keeps every plaquette of
// Z^d with at least one edge meeting the box (edges falling outside the
// stored edge set contribute zero / identity), so interior and boundary
// edges interact and every stored edge lies in exactly 2(d-1) plaquettes.
// InteriorOnly keeps only plaquettes whose four edges are interior; it
// exists as a sensitivity switch.
enum class BoxPlaquetteRule { Coupled, InteriorOnly };

struct LatticeSpec {
  int dimension = 2;  // d >= 2
  int side = 1;       // L >= 1
  Topology topology = Topology::Torus;
  BoxPlaquetteRule plaquette_rule = BoxPlaquetteRule::Coupled;

  void validate() const;
};

// Positively oriented edge (a, a + e_dir).
struct Edge {
  Coord base{};
  int dir = 0;           // 0-based direction
  bool interior = true;  // box: both endpoints inside; torus: always true
};

// Plaquette at base a spanned by directions i<j. Edge slots are ordered
// e1=(a,i), e2=(a+e_i,j), e3=(a+e_j,i), e4=(a,j); the holonomy traverses
// e1, e2 forward and e3, e4 inverted, and the discrete derivative is
// (dX)_p = X1 + X2 - X3 - X4. A slot of -1 marks an edge outside the
// stored set (its value is taken as 0 in the algebra, identity in the group).
struct Plaquette {
  Coord base{};
  int dir_i = 0;
  int dir_j = 1;
  std::array<int, 4> edge{-1, -1, -1, -1};
};

// Concrete cell complex: edge and plaquette tables plus incidence.
class LatticeComplex {
 public:
  static LatticeComplex make(const LatticeSpec& spec);
  // Minimal calibration complex: one square, four edges, no boundary.
  static LatticeComplex make_single_plaquette(double mass_weight = 1.0);

  const LatticeSpec& spec() const { return spec_; }
  int dim() const { return spec_.dimension; }
  bool is_torus() const { return spec_.topology == Topology::Torus; }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Plaquette>& plaquettes() const { return plaqs_; }
  const std::vector<int>& interior_edges() const { return interior_; }
  const std::vector<int>& boundary_edges() const { return boundary_; }

  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_plaquettes() const { return static_cast<int>(plaqs_.size()); }

  // Plaquettes containing an edge, as (plaquette index, slot) pairs; an edge
  // can appear in the same plaquette twice on very small tori.
  const std::vector<std::pair<int, int>>& plaquettes_of_edge(int e) const {
    return plaqs_of_edge_[static_cast<std::size_t>(e)];
  }

  int edge_index(const Coord& base, int dir) const;  // -1 if absent

  // Graph distance on the vertex graph (torus: wrapped L1, box: Z^d L1),
  // minimized over endpoint pairs.
  int graph_distance(int e1, int e2) const;
  // Distance from an edge to the boundary-edge set (box only).
  int distance_to_boundary(int e) const;

  int vertex_distance(const Coord& a, const Coord& b) const;

  Coord edge_head(int e) const;  // base + e_dir (wrapped on the torus)

  std::string describe() const;

 private:
  LatticeSpec spec_;
  bool single_plaquette_ = false;
  std::vector<Edge> edges_;
  std::vector<Plaquette> plaqs_;
  std::vector<int> interior_;
  std::vector<int> boundary_;
  std::vector<std::vector<std::pair<int, int>>> plaqs_of_edge_;
  std::unordered_map<std::uint64_t, int> index_;

  void finalize();
  static std::uint64_t key(const Coord& a, int dir);
};

// Closed-form counts used as enumeration cross-checks.
long torus_edge_count(int d, int L);
long torus_plaquette_count(int d, int L);
long box_interior_edge_count(int d, int L);
long box_boundary_edge_count(int d, int L);

}  // namespace procalab
