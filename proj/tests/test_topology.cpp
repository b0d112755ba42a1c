#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "procalab/rng.hpp"
#include "procalab/topology.hpp"

using namespace procalab;

namespace {

std::shared_ptr<const LatticeComplex> torus(int d, int L) {
  LatticeSpec s;
  s.dimension = d;
  s.side = L;
  s.topology = Topology::Torus;
  return std::make_shared<LatticeComplex>(LatticeComplex::make(s));
}

std::shared_ptr<const LatticeComplex> box(int d, int L) {
  LatticeSpec s;
  s.dimension = d;
  s.side = L;
  s.topology = Topology::Box;
  return std::make_shared<LatticeComplex>(LatticeComplex::make(s));
}

// BFS oracle for the vertex distance, independent of the closed forms.
int bfs_vertex_distance(const LatticeComplex& lat, Coord a, Coord b) {
  const int d = lat.dim();
  const int L = lat.spec().side;
  auto enc = [&](const Coord& v) {
    long k = 0;
    for (int i = 0; i < d; ++i) k = k * 4096 + (v[i] + 2048);
    return k;
  };
  std::map<long, int> dist;
  std::queue<Coord> q;
  q.push(a);
  dist[enc(a)] = 0;
  while (!q.empty()) {
    Coord v = q.front();
    q.pop();
    const int dv = dist[enc(v)];
    if (v == b) return dv;
    for (int i = 0; i < d; ++i) {
      for (int s : {-1, 1}) {
        Coord w = v;
        w[i] += s;
        if (lat.is_torus()) {
          w[i] = ((w[i] % L) + L) % L;
        } else if (std::abs(w[i]) > L + 4) {
          continue;  // cap the search region on Z^d
        }
        if (dist.emplace(enc(w), dv + 1).second) q.push(w);
      }
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("torus counts match closed forms") {
  auto t23 = torus(2, 3);
  CHECK(t23->n_edges() == 18);
  CHECK(t23->n_plaquettes() == 9);
  CHECK(torus_edge_count(2, 3) == 18);
  CHECK(torus_plaquette_count(2, 3) == 9);

  auto t32 = torus(3, 2);
  CHECK(t32->n_edges() == 24);
  CHECK(t32->n_plaquettes() == 24);
}

TEST_CASE("box d=2 L=1 matches hand enumeration") {
  auto b = box(2, 1);
  // interior: both endpoints in {-1,0,1}^2 -> 2 dirs * 2 * 3 = 12
  // boundary: one endpoint outside -> 2 dirs * 2 sides * 3 = 12
  CHECK(static_cast<long>(b->interior_edges().size()) == 12);
  CHECK(static_cast<long>(b->boundary_edges().size()) == 12);
  CHECK(box_interior_edge_count(2, 1) == 12);
  CHECK(box_boundary_edge_count(2, 1) == 12);

  // Hand-enumerated interior x-edges: bases (a1, a2), a1 in {-1, 0}, a2 in
  // {-1, 0, 1}.
  std::set<std::pair<int, int>> expect_x;
  for (int a1 : {-1, 0})
    for (int a2 : {-1, 0, 1}) expect_x.insert({a1, a2});
  std::set<std::pair<int, int>> got_x;
  for (int e : b->interior_edges()) {
    const Edge& ed = b->edges()[static_cast<std::size_t>(e)];
    if (ed.dir == 0) got_x.insert({ed.base[0], ed.base[1]});
  }
  CHECK(got_x == expect_x);

  // Hand-enumerated boundary x-edges: a1 in {-2, 1}, a2 in {-1, 0, 1}.
  std::set<std::pair<int, int>> expect_bx;
  for (int a1 : {-2, 1})
    for (int a2 : {-1, 0, 1}) expect_bx.insert({a1, a2});
  std::set<std::pair<int, int>> got_bx;
  for (int e : b->boundary_edges()) {
    const Edge& ed = b->edges()[static_cast<std::size_t>(e)];
    if (ed.dir == 0) got_bx.insert({ed.base[0], ed.base[1]});
  }
  CHECK(got_bx == expect_bx);

  // Every stored edge lies in exactly 2(d-1) = 2 plaquettes.
  for (int e = 0; e < b->n_edges(); ++e)
    CHECK(b->plaquettes_of_edge(e).size() == 2);

  // Interior-only rule keeps just the four fully interior plaquettes.
  LatticeSpec s;
  s.dimension = 2;
  s.side = 1;
  s.topology = Topology::Box;
  s.plaquette_rule = BoxPlaquetteRule::InteriorOnly;
  auto b2 = LatticeComplex::make(s);
  CHECK(b2.n_plaquettes() == 4);
}

TEST_CASE("boundary edges: errors and distance zero") {
  CHECK_THROWS_AS(([&] {
                    LatticeSpec s;
                    s.dimension = 1;
                    s.side = 3;
                    return LatticeComplex::make(s);
                  }()),
                  std::invalid_argument);
  auto t = torus(2, 3);
  CHECK(t->boundary_edges().empty());
  auto b = box(2, 2);
  for (int e : b->boundary_edges()) CHECK(b->distance_to_boundary(e) == 0);
}

TEST_CASE("edges per plaquette incidence on the torus") {
  for (auto lat : {torus(2, 4), torus(3, 3)}) {
    const int expected = 2 * (lat->dim() - 1);
    for (int e = 0; e < lat->n_edges(); ++e)
      CHECK(static_cast<int>(lat->plaquettes_of_edge(e).size()) == expected);
  }
}

TEST_CASE("plaquette boundary is closed (d of d vanishes)") {
  // Signed vertex boundary of the 4-edge chain with signs +,+,-,- is empty.
  for (auto lat : {torus(2, 3), torus(3, 2), box(2, 2)}) {
    for (const Plaquette& p : lat->plaquettes()) {
      std::map<std::array<int, kMaxDim>, int> charge;
      const double sign[4] = {1, 1, -1, -1};
      for (int s = 0; s < 4; ++s) {
        if (p.edge[s] < 0) continue;
        const int e = p.edge[s];
        const Edge& ed = lat->edges()[static_cast<std::size_t>(e)];
        charge[ed.base] -= static_cast<int>(sign[s]);
        charge[lat->edge_head(e)] += static_cast<int>(sign[s]);
      }
      // Only fully stored plaquettes close up; truncated ones are cut by
      // construction.
      bool full = true;
      for (int s = 0; s < 4; ++s) full = full && p.edge[s] >= 0;
      if (full)
        for (const auto& [v, c] : charge) CHECK(c == 0);
    }
  }
}

TEST_CASE("deterministic lexicographic enumeration") {
  auto t = torus(2, 2);
  const auto& edges = t->edges();
  for (std::size_t e = 1; e < edges.size(); ++e) {
    const auto a = std::make_tuple(edges[e - 1].base[0], edges[e - 1].base[1],
                                   edges[e - 1].dir);
    const auto b = std::make_tuple(edges[e].base[0], edges[e].base[1], edges[e].dir);
    CHECK(a < b);
  }
  // Rebuilding yields the identical table.
  auto t2 = torus(2, 2);
  for (int e = 0; e < t->n_edges(); ++e) {
    CHECK(t->edges()[static_cast<std::size_t>(e)].base ==
          t2->edges()[static_cast<std::size_t>(e)].base);
    CHECK(t->edges()[static_cast<std::size_t>(e)].dir ==
          t2->edges()[static_cast<std::size_t>(e)].dir);
  }
}

TEST_CASE("graph distance: basics and BFS oracle") {
  auto t = torus(2, 5);
  for (int e = 0; e < t->n_edges(); e += 7) CHECK(t->graph_distance(e, e) == 0);

  // adjacent parallel edges at distance 1
  const int e1 = t->edge_index(Coord{0, 0, 0, 0}, 0);
  const int e2 = t->edge_index(Coord{0, 1, 0, 0}, 0);
  CHECK(t->graph_distance(e1, e2) == 1);

  Rng rng(61);
  for (auto lat : {torus(2, 4), box(2, 2)}) {
    for (int trial = 0; trial < 40; ++trial) {
      const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(lat->n_edges())));
      const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(lat->n_edges())));
      const Edge& ea = lat->edges()[static_cast<std::size_t>(a)];
      const Edge& eb = lat->edges()[static_cast<std::size_t>(b)];
      const int oracle = std::min(
          {bfs_vertex_distance(*lat, ea.base, eb.base),
           bfs_vertex_distance(*lat, ea.base, lat->edge_head(b)),
           bfs_vertex_distance(*lat, lat->edge_head(a), eb.base),
           bfs_vertex_distance(*lat, lat->edge_head(a), lat->edge_head(b))});
      CHECK(lat->graph_distance(a, b) == oracle);
    }
  }
}

TEST_CASE("distance to boundary matches BFS over boundary set") {
  auto b = box(2, 3);
  Rng rng(67);
  for (int trial = 0; trial < 25; ++trial) {
    const int e = b->interior_edges()[rng.below(b->interior_edges().size())];
    int oracle = 1 << 28;
    for (int be : b->boundary_edges())
      oracle = std::min(oracle, b->graph_distance(e, be));
    CHECK(b->distance_to_boundary(e) == oracle);
  }
}

TEST_CASE("single plaquette complex") {
  auto sp = LatticeComplex::make_single_plaquette();
  CHECK(sp.n_edges() == 4);
  CHECK(sp.n_plaquettes() == 1);
  CHECK(sp.boundary_edges().empty());
  for (int e = 0; e < 4; ++e) CHECK(sp.plaquettes_of_edge(e).size() == 1);
}
