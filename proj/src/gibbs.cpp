#include "procalab/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "procalab/stats.hpp"

namespace procalab {

void YmhParams::validate() const {
  if (!(beta >= 0)) throw std::invalid_argument("YmhParams: beta must be >= 0");
  if (!(mass > 0)) throw std::invalid_argument("YmhParams: mass must be > 0");
  if (!(kappa > 0) || !(kappa < 0.5))
    throw std::invalid_argument("YmhParams: kappa must be in (0, 1/2)");
  if (!lattice) throw std::invalid_argument("YmhParams: lattice not set");
  if (boundary == BoundaryCondition::Fixed) {
    if (lattice->is_torus())
      throw std::invalid_argument("YmhParams: fixed boundary requires box topology");
    if (!gamma.empty() && gamma.size() != lattice->boundary_edges().size())
      throw std::invalid_argument("YmhParams: gamma size mismatch with boundary edges");
  }
}

double YmhParams::threshold_e1() const { return std::pow(beta, kappa - 0.5); }
double YmhParams::threshold_e2() const { return std::pow(beta, kappa / 2.0 - 0.5); }

GroupElement holonomy(const GaugeConfig& cfg, int plaquette) {
  const Plaquette& p = cfg.lat->plaquettes()[static_cast<std::size_t>(plaquette)];
  const int N = cfg.group.matrix_size;
  Matrix h = Matrix::Identity(N, N);
  if (p.edge[0] >= 0) h = cfg.U[static_cast<std::size_t>(p.edge[0])];
  if (p.edge[1] >= 0) h = h * cfg.U[static_cast<std::size_t>(p.edge[1])];
  if (p.edge[2] >= 0) h = h * cfg.U[static_cast<std::size_t>(p.edge[2])].adjoint();
  if (p.edge[3] >= 0) h = h * cfg.U[static_cast<std::size_t>(p.edge[3])].adjoint();
  return h;
}

namespace {

// Holonomy with edge `sub` replaced by U_sub wherever it appears.
GroupElement holonomy_with(const GaugeConfig& cfg, const Plaquette& p, int sub,
                           const GroupElement& U_sub) {
  const int N = cfg.group.matrix_size;
  auto val = [&](int slot) -> const GroupElement& {
    return p.edge[slot] == sub ? U_sub : cfg.U[static_cast<std::size_t>(p.edge[slot])];
  };
  Matrix h = Matrix::Identity(N, N);
  if (p.edge[0] >= 0) h = val(0);
  if (p.edge[1] >= 0) h = h * val(1);
  if (p.edge[2] >= 0) h = h * val(2).adjoint();
  if (p.edge[3] >= 0) h = h * val(3).adjoint();
  return h;
}

double plaquette_energy(const GroupElement& h) {
  const double d = dist_to_identity(h);
  return 0.5 * d * d;
}

std::vector<int> updatable_edges(const GaugeConfig& cfg,
                                 BoundaryCondition boundary) {
  if (boundary == BoundaryCondition::Fixed) return cfg.lat->interior_edges();
  std::vector<int> all(static_cast<std::size_t>(cfg.lat->n_edges()));
  for (int e = 0; e < cfg.lat->n_edges(); ++e) all[static_cast<std::size_t>(e)] = e;
  return all;
}

bool metropolis_accept(double beta, double delta, double u) {
  return delta <= 0.0 || u < std::exp(-beta * delta);
}

// Colors such that no two same-color edges share a plaquette: direction plus
// base-coordinate parity vector.
int edge_color(const Edge& ed, int d) {
  int c = ed.dir;
  for (int i = 0; i < d; ++i) c = c * 2 + (((ed.base[i] % 2) + 2) % 2);
  return c;
}

}  // namespace

double action(const GaugeConfig& cfg, const YmhParams& params) {
  double s = 0;
  for (int p = 0; p < cfg.lat->n_plaquettes(); ++p)
    s += plaquette_energy(holonomy(cfg, p));
  double mass_term = 0;
  for (const auto& U : cfg.U) {
    const double d = dist_to_identity(U);
    mass_term += d * d;
  }
  return s + 0.5 * params.mass * mass_term;
}

double local_action_delta(const GaugeConfig& cfg, int e, const GroupElement& U_new,
                          const YmhParams& params) {
  if (params.boundary == BoundaryCondition::Fixed &&
      !cfg.lat->edges()[static_cast<std::size_t>(e)].interior)
    throw std::invalid_argument("local_action_delta: edge is fixed boundary data");
  double delta = 0;
  int last_p = -1;
  for (const auto& [p, slot] : cfg.lat->plaquettes_of_edge(e)) {
    if (p == last_p) continue;  // edge may sit in one plaquette twice (tiny tori)
    last_p = p;
    const Plaquette& plaq = cfg.lat->plaquettes()[static_cast<std::size_t>(p)];
    delta += plaquette_energy(holonomy_with(cfg, plaq, e, U_new)) -
             plaquette_energy(holonomy_with(cfg, plaq, e, cfg.U[static_cast<std::size_t>(e)]));
  }
  const double dn = dist_to_identity(U_new);
  const double dr = dist_to_identity(cfg.U[static_cast<std::size_t>(e)]);
  delta += 0.5 * params.mass * (dn * dn - dr * dr);
  return delta;
}

SweepResult metropolis_sweep(GaugeConfig& cfg, const YmhParams& params,
                             double sigma, Rng& rng) {
  if (!(sigma > 0)) throw std::invalid_argument("metropolis_sweep: sigma must be > 0");
  const std::vector<int> edges = updatable_edges(cfg, params.boundary);
  long accepted = 0;
  for (int e : edges) {
    const GroupElement proposal =
        cfg.U[static_cast<std::size_t>(e)] * mat_exp(cfg.group.gaussian(rng, sigma));
    const double delta = local_action_delta(cfg, e, proposal, params);
    if (metropolis_accept(params.beta, delta, rng.uniform())) {
      cfg.U[static_cast<std::size_t>(e)] = proposal;
      ++accepted;
    }
  }
  return SweepResult{edges.empty() ? 1.0
                                   : static_cast<double>(accepted) /
                                         static_cast<double>(edges.size())};
}

SweepResult metropolis_sweep_checkerboard(GaugeConfig& cfg, const YmhParams& params,
                                          double sigma, Rng& rng, int threads) {
  if (!(sigma > 0)) throw std::invalid_argument("metropolis_sweep: sigma must be > 0");
  if (cfg.lat->is_torus() && cfg.lat->spec().side % 2 != 0)
    throw std::invalid_argument("checkerboard sweep requires even torus side");
  const int d = cfg.lat->dim();
  const std::vector<int> edges = updatable_edges(cfg, params.boundary);
  const int n_colors = d << d;
  std::vector<std::vector<int>> by_color(static_cast<std::size_t>(n_colors));
  for (int e : edges)
    by_color[static_cast<std::size_t>(edge_color(
                  cfg.lat->edges()[static_cast<std::size_t>(e)], d))]
        .push_back(e);

  long accepted = 0;
  struct Move {
    int edge;
    GroupElement proposal;
    double u;
    bool accepted = false;
  };
  for (auto& color : by_color) {
    if (color.empty()) continue;
    std::vector<Move> moves;
    moves.reserve(color.size());
    for (int e : color)
      moves.push_back(Move{e,
                           cfg.U[static_cast<std::size_t>(e)] *
                               mat_exp(cfg.group.gaussian(rng, sigma)),
                           rng.uniform()});
    const int nt = std::max(1, threads);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= moves.size()) break;
        Move& mv = moves[k];
        const double delta = local_action_delta(cfg, mv.edge, mv.proposal, params);
        mv.accepted = metropolis_accept(params.beta, delta, mv.u);
      }
    };
    if (nt == 1) {
      work();
    } else {
      for (int t = 0; t < nt; ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    for (const Move& mv : moves) {
      if (mv.accepted) {
        cfg.U[static_cast<std::size_t>(mv.edge)] = mv.proposal;
        ++accepted;
      }
    }
  }
  return SweepResult{edges.empty() ? 1.0
                                   : static_cast<double>(accepted) /
                                         static_cast<double>(edges.size())};
}

GaugeConfig initial_config(const YmhParams& params) {
  params.validate();
  GaugeConfig cfg = GaugeConfig::identity(params.lattice, params.group);
  if (params.boundary == BoundaryCondition::Fixed && !params.gamma.empty()) {
    const auto& bd = params.lattice->boundary_edges();
    for (std::size_t k = 0; k < bd.size(); ++k)
      cfg.U[static_cast<std::size_t>(bd[k])] = params.gamma[k];
  }
  return cfg;
}

ChainStats run_chain(GaugeConfig& cfg, const YmhParams& params,
                     const ChainOptions& opts, Rng& rng,
                     const RecordCallback& on_record) {
  params.validate();
  double sigma = opts.proposal_scale;
  auto sweep = [&](double s) {
    return opts.checkerboard
               ? metropolis_sweep_checkerboard(cfg, params, s, rng, opts.threads)
               : metropolis_sweep(cfg, params, s, rng);
  };

  // Burn-in with optional proposal tuning toward the target acceptance.
  double acc_window = 0;
  long window = 0;
  for (long i = 0; i < opts.burn_in; ++i) {
    acc_window += sweep(sigma).acceptance;
    ++window;
    if (opts.tune_proposal && window == 50) {
      const double acc = acc_window / static_cast<double>(window);
      if (acc > opts.target_acceptance + 0.1) sigma *= 1.3;
      if (acc < opts.target_acceptance - 0.1) sigma /= 1.3;
      acc_window = 0;
      window = 0;
    }
  }

  ChainStats stats;
  stats.tuned_sigma = sigma;
  double acc_sum = 0;
  for (long i = 0; i < opts.sweeps; ++i) {
    double acc = 0;
    for (long t = 0; t < opts.thin; ++t) acc += sweep(sigma).acceptance;
    acc /= static_cast<double>(std::max<long>(opts.thin, 1));
    stats.action_trace.push_back(action(cfg, params));
    stats.acceptance_trace.push_back(acc);
    stats.max_dev_trace.push_back(max_edge_deviation(cfg));
    stats.e1_trace.push_back(event_e1(cfg, params) ? 1 : 0);
    stats.e2_trace.push_back(event_e2(cfg, params) ? 1 : 0);
    acc_sum += acc;
    ++stats.recorded;
    if (on_record) on_record(cfg, i);
  }
  stats.mean_acceptance =
      stats.recorded > 0 ? acc_sum / static_cast<double>(stats.recorded) : 0.0;
  stats.tau_action = autocorrelation_time(stats.action_trace);
  return stats;
}

bool event_e1(const GaugeConfig& cfg, const YmhParams& params) {
  const double t = params.threshold_e1();
  for (int e : cfg.lat->interior_edges())
    if (dist_to_identity(cfg.U[static_cast<std::size_t>(e)]) > t) return false;
  return true;
}

bool event_e2(const GaugeConfig& cfg, const YmhParams& params) {
  const double t = params.threshold_e2();
  for (int e : cfg.lat->boundary_edges())
    if (dist_to_identity(cfg.U[static_cast<std::size_t>(e)]) > t) return false;
  return true;
}

double max_edge_deviation(const GaugeConfig& cfg) {
  double m = 0;
  for (const auto& U : cfg.U) m = std::max(m, dist_to_identity(U));
  return m;
}

std::pair<double, double> event_frequencies(const ChainStats& stats) {
  if (stats.recorded == 0) return {0.0, 0.0};
  double f1 = 0, f2 = 0;
  for (auto b : stats.e1_trace) f1 += b;
  for (auto b : stats.e2_trace) f2 += b;
  const double n = static_cast<double>(stats.recorded);
  return {f1 / n, f2 / n};
}

AlgebraEdgeField lift(const GaugeConfig& cfg, double chart_radius, bool scaled,
                      double beta) {
  AlgebraEdgeField f = AlgebraEdgeField::zero(cfg.lat, cfg.group);
  const double scale = scaled ? std::sqrt(beta) : 1.0;
  for (int e = 0; e < cfg.lat->n_edges(); ++e)
    f.X[static_cast<std::size_t>(e)] =
        scale * truncated_log(cfg.U[static_cast<std::size_t>(e)], chart_radius);
  return f;
}

GaugeConfig gauge_transform(const GaugeConfig& cfg,
                            const std::function<GroupElement(const Coord&)>& g) {
  GaugeConfig out = cfg;
  for (int e = 0; e < cfg.lat->n_edges(); ++e) {
    const Edge& ed = cfg.lat->edges()[static_cast<std::size_t>(e)];
    out.U[static_cast<std::size_t>(e)] =
        g(ed.base) * cfg.U[static_cast<std::size_t>(e)] *
        g(cfg.lat->edge_head(e)).adjoint();
  }
  return out;
}

}  // namespace procalab
