#include "procalab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace procalab {

namespace {

int wrap(int x, int L) {
  int r = x % L;
  return r < 0 ? r + L : r;
}

bool in_box(const Coord& a, int d, int L) {
  for (int i = 0; i < d; ++i)
    if (a[i] < -L || a[i] > L) return false;
  return true;
}

// Iterate a in lexicographic order over [lo, hi]^d.
template <typename F>
void for_each_coord(int d, int lo, int hi, F&& f) {
  Coord a{};
  for (int i = 0; i < d; ++i) a[i] = lo;
  while (true) {
    f(a);
    int i = d - 1;
    while (i >= 0) {
      if (++a[i] <= hi) break;
      a[i] = lo;
      --i;
    }
    if (i < 0) break;
  }
}

}  // namespace

void LatticeSpec::validate() const {
  if (dimension < 2 || dimension > kMaxDim)
    throw std::invalid_argument("LatticeSpec: dimension must be in [2, " +
                                std::to_string(kMaxDim) + "]");
  if (side < 1) throw std::invalid_argument("LatticeSpec: side must be >= 1");
}

std::uint64_t LatticeComplex::key(const Coord& a, int dir) {
  std::uint64_t k = static_cast<std::uint64_t>(dir + 1);
  for (int i = 0; i < kMaxDim; ++i)
    k = (k << 12) | static_cast<std::uint64_t>(a[i] + 1024);
  return k;
}

LatticeComplex LatticeComplex::make(const LatticeSpec& spec) {
  spec.validate();
  LatticeComplex lc;
  lc.spec_ = spec;
  const int d = spec.dimension;
  const int L = spec.side;

  if (spec.topology == Topology::Torus) {
    for_each_coord(d, 0, L - 1, [&](const Coord& a) {
      for (int i = 0; i < d; ++i) {
        lc.index_[key(a, i)] = static_cast<int>(lc.edges_.size());
        lc.edges_.push_back(Edge{a, i, true});
      }
    });
    for_each_coord(d, 0, L - 1, [&](const Coord& a) {
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
          Plaquette p;
          p.base = a;
          p.dir_i = i;
          p.dir_j = j;
          Coord ai = a, aj = a;
          ai[i] = wrap(a[i] + 1, L);
          aj[j] = wrap(a[j] + 1, L);
          p.edge[0] = lc.index_.at(key(a, i));
          p.edge[1] = lc.index_.at(key(ai, j));
          p.edge[2] = lc.index_.at(key(aj, i));
          p.edge[3] = lc.index_.at(key(a, j));
          lc.plaqs_.push_back(p);
        }
      }
    });
  } else {
    // Box Q_L = [-L, L]^d. Stored edges have at least one endpoint inside;
    // bases range over [-L-1, L].
    for_each_coord(d, -L - 1, L, [&](const Coord& a) {
      for (int i = 0; i < d; ++i) {
        Coord b = a;
        b[i] += 1;
        const bool a_in = in_box(a, d, L);
        const bool b_in = in_box(b, d, L);
        if (!a_in && !b_in) continue;
        lc.index_[key(a, i)] = static_cast<int>(lc.edges_.size());
        lc.edges_.push_back(Edge{a, i, a_in && b_in});
      }
    });
    for_each_coord(d, -L - 2, L + 1, [&](const Coord& a) {
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
          Plaquette p;
          p.base = a;
          p.dir_i = i;
          p.dir_j = j;
          Coord ai = a, aj = a;
          ai[i] += 1;
          aj[j] += 1;
          const std::array<std::pair<Coord, int>, 4> slots = {
              std::make_pair(a, i), std::make_pair(ai, j),
              std::make_pair(aj, i), std::make_pair(a, j)};
          int present = 0, interior = 0;
          for (int s = 0; s < 4; ++s) {
            auto it = lc.index_.find(key(slots[s].first, slots[s].second));
            if (it != lc.index_.end()) {
              p.edge[s] = it->second;
              ++present;
              if (lc.edges_[static_cast<std::size_t>(it->second)].interior)
                ++interior;
            }
          }
          const bool keep =
              spec.plaquette_rule == BoxPlaquetteRule::Coupled
                  ? present >= 1
                  : (present == 4 && interior == 4);
          if (keep) lc.plaqs_.push_back(p);
        }
      }
    });
  }

  lc.finalize();
  return lc;
}

LatticeComplex LatticeComplex::make_single_plaquette(double) {
  LatticeComplex lc;
  lc.spec_.dimension = 2;
  lc.spec_.side = 1;
  lc.spec_.topology = Topology::Box;
  lc.single_plaquette_ = true;
  const Coord o{0, 0, 0, 0};
  Coord ex{1, 0, 0, 0}, ey{0, 1, 0, 0};
  lc.edges_.push_back(Edge{o, 0, true});
  lc.edges_.push_back(Edge{ex, 1, true});
  lc.edges_.push_back(Edge{ey, 0, true});
  lc.edges_.push_back(Edge{o, 1, true});
  for (int e = 0; e < 4; ++e)
    lc.index_[key(lc.edges_[static_cast<std::size_t>(e)].base,
                  lc.edges_[static_cast<std::size_t>(e)].dir)] = e;
  Plaquette p;
  p.base = o;
  p.edge = {0, 1, 2, 3};
  lc.plaqs_.push_back(p);
  lc.finalize();
  return lc;
}

void LatticeComplex::finalize() {
  plaqs_of_edge_.assign(edges_.size(), {});
  for (int pi = 0; pi < n_plaquettes(); ++pi) {
    for (int s = 0; s < 4; ++s) {
      const int e = plaqs_[static_cast<std::size_t>(pi)].edge[s];
      if (e >= 0) plaqs_of_edge_[static_cast<std::size_t>(e)].push_back({pi, s});
    }
  }
  interior_.clear();
  boundary_.clear();
  for (int e = 0; e < n_edges(); ++e) {
    if (edges_[static_cast<std::size_t>(e)].interior)
      interior_.push_back(e);
    else
      boundary_.push_back(e);
  }
}

int LatticeComplex::edge_index(const Coord& base, int dir) const {
  auto it = index_.find(key(base, dir));
  return it == index_.end() ? -1 : it->second;
}

int LatticeComplex::vertex_distance(const Coord& a, const Coord& b) const {
  const int d = spec_.dimension;
  const int L = spec_.side;
  int dist = 0;
  for (int i = 0; i < d; ++i) {
    int delta = std::abs(a[i] - b[i]);
    if (spec_.topology == Topology::Torus) delta = std::min(delta, L - delta);
    dist += delta;
  }
  return dist;
}

Coord LatticeComplex::edge_head(int e) const {
  const Edge& ed = edges_[static_cast<std::size_t>(e)];
  Coord h = ed.base;
  h[ed.dir] += 1;
  if (is_torus()) h[ed.dir] = wrap(h[ed.dir], spec_.side);
  return h;
}

int LatticeComplex::graph_distance(int e1, int e2) const {
  const Edge& a = edges_[static_cast<std::size_t>(e1)];
  const Edge& b = edges_[static_cast<std::size_t>(e2)];
  const Coord a2 = edge_head(e1), b2 = edge_head(e2);
  int best = vertex_distance(a.base, b.base);
  best = std::min(best, vertex_distance(a.base, b2));
  best = std::min(best, vertex_distance(a2, b.base));
  best = std::min(best, vertex_distance(a2, b2));
  return best;
}

int LatticeComplex::distance_to_boundary(int e) const {
  if (spec_.topology != Topology::Box || single_plaquette_)
    throw std::logic_error("distance_to_boundary: box lattices only");
  const int d = spec_.dimension;
  const int L = spec_.side;
  auto vertex_dist = [&](const Coord& v) {
    int best = 1 << 28;
    for (int i = 0; i < d; ++i) best = std::min(best, L - std::abs(v[i]));
    return std::max(best, 0);
  };
  const Edge& ed = edges_[static_cast<std::size_t>(e)];
  return std::min(vertex_dist(ed.base), vertex_dist(edge_head(e)));
}

std::string LatticeComplex::describe() const {
  std::ostringstream os;
  if (single_plaquette_) {
    os << "single-plaquette";
  } else {
    os << (is_torus() ? "torus" : "box") << " d=" << spec_.dimension
       << " L=" << spec_.side;
  }
  os << " edges=" << n_edges() << " plaquettes=" << n_plaquettes();
  return os.str();
}

long torus_edge_count(int d, int L) {
  long v = 1;
  for (int i = 0; i < d; ++i) v *= L;
  return static_cast<long>(d) * v;
}

long torus_plaquette_count(int d, int L) {
  long v = 1;
  for (int i = 0; i < d; ++i) v *= L;
  return static_cast<long>(d) * (d - 1) / 2 * v;
}

long box_interior_edge_count(int d, int L) {
  long side = 2L * L + 1;
  long per_dir = 2L * L;
  for (int i = 0; i < d - 1; ++i) per_dir *= side;
  return static_cast<long>(d) * per_dir;
}

long box_boundary_edge_count(int d, int L) {
  long side = 2L * L + 1;
  long per_dir = 2;
  for (int i = 0; i < d - 1; ++i) per_dir *= side;
  return static_cast<long>(d) * per_dir;
}

}  // namespace procalab
