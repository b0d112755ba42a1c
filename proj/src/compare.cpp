#include "procalab/compare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "procalab/stats.hpp"

namespace procalab {

namespace {

const double kSign[4] = {1.0, 1.0, -1.0, -1.0};

AlgebraEdgeField with_boundary(const AlgebraEdgeField& X, const ProcaBoundary& eta) {
  AlgebraEdgeField full = X;
  const auto& bd = X.lat->boundary_edges();
  if (eta.eta.size() != bd.size())
    throw std::invalid_argument("boundary data size mismatch");
  for (std::size_t k = 0; k < bd.size(); ++k)
    full.X[static_cast<std::size_t>(bd[k])] = eta.eta[k];
  return full;
}

}  // namespace

double algebra_action(const AlgebraEdgeField& X, double mass) {
  const LatticeComplex& lat = *X.lat;
  const int N = X.group.matrix_size;
  double plaq = 0;
  Matrix dx(N, N);
  for (const Plaquette& p : lat.plaquettes()) {
    dx.setZero();
    for (int s = 0; s < 4; ++s)
      if (p.edge[s] >= 0) dx += kSign[s] * X.X[static_cast<std::size_t>(p.edge[s])];
    plaq += dx.squaredNorm();
  }
  double mass_term = 0;
  for (const auto& x : X.X) mass_term += x.squaredNorm();
  return 0.5 * plaq + 0.5 * mass * mass_term;
}

double log_density_lifted_ymh(const AlgebraEdgeField& X, const YmhParams& params,
                              const ProcaBoundary& eta) {
  GaugeConfig cfg;
  cfg.lat = X.lat;
  cfg.group = X.group;
  cfg.U.resize(X.X.size());
  double log_jacobian = 0;
  for (int e = 0; e < X.lat->n_edges(); ++e)
    cfg.U[static_cast<std::size_t>(e)] = mat_exp(X.X[static_cast<std::size_t>(e)]);
  const auto& bd = X.lat->boundary_edges();
  if (eta.eta.size() != bd.size() && !bd.empty())
    throw std::invalid_argument("log_density_lifted_ymh: boundary data size mismatch");
  for (std::size_t k = 0; k < bd.size(); ++k)
    cfg.U[static_cast<std::size_t>(bd[k])] = mat_exp(eta.eta[k]);
  for (int e : X.lat->interior_edges()) {
    const double dist = dist_to_identity(cfg.U[static_cast<std::size_t>(e)]);
    if (!(dist < X.group.chart_radius))
      throw std::domain_error("log_density_lifted_ymh: edge " + std::to_string(e) +
                              " leaves the chart (||I - exp X|| = " +
                              std::to_string(dist) + ")");
    log_jacobian +=
        std::log(exp_jacobian_det(X.group, X.X[static_cast<std::size_t>(e)]));
  }
  return -params.beta * action(cfg, params) + log_jacobian;
}

double log_density_proca(const AlgebraEdgeField& X, const YmhParams& params,
                         const ProcaBoundary& eta) {
  const AlgebraEdgeField full =
      X.lat->boundary_edges().empty() ? X : with_boundary(X, eta);
  return -params.beta * algebra_action(full, params.mass);
}

double residual_psi(const AlgebraEdgeField& X, const YmhParams& params,
                    const ProcaBoundary& eta) {
  return std::exp(log_density_lifted_ymh(X, params, eta) -
                  log_density_proca(X, params, eta)) -
         1.0;
}

double action_gap(const AlgebraEdgeField& X, const YmhParams& params) {
  GaugeConfig cfg;
  cfg.lat = X.lat;
  cfg.group = X.group;
  cfg.U.resize(X.X.size());
  for (std::size_t e = 0; e < X.X.size(); ++e) cfg.U[e] = mat_exp(X.X[e]);
  return std::abs(action(cfg, params) - algebra_action(X, params.mass));
}

double tv_on_grid(int n, double t, int K,
                  const std::function<double(const std::vector<double>&)>& logf1,
                  const std::function<double(const std::vector<double>&)>& logf2) {
  if (n < 1 || n > 6) throw std::invalid_argument("tv_on_grid: n must be in [1, 6]");
  if (K < 2) throw std::invalid_argument("tv_on_grid: need K >= 2");
  const double h = 2.0 * t / K;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> theta(static_cast<std::size_t>(n), 0.0);
  std::vector<double> v1, v2;
  const long cells = static_cast<long>(std::pow(K, n));
  v1.reserve(static_cast<std::size_t>(cells));
  v2.reserve(static_cast<std::size_t>(cells));
  // Two passes folded into one: store log values and normalize by max to
  // avoid underflow.
  double m1 = -1e300, m2 = -1e300;
  for (;;) {
    for (int c = 0; c < n; ++c)
      theta[static_cast<std::size_t>(c)] =
          -t + (idx[static_cast<std::size_t>(c)] + 0.5) * h;
    const double a = logf1(theta);
    const double b = logf2(theta);
    v1.push_back(a);
    v2.push_back(b);
    m1 = std::max(m1, a);
    m2 = std::max(m2, b);
    int c = n - 1;
    while (c >= 0) {
      if (++idx[static_cast<std::size_t>(c)] < K) break;
      idx[static_cast<std::size_t>(c)] = 0;
      --c;
    }
    if (c < 0) break;
  }
  double w1 = 0, w2 = 0;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    v1[i] = std::isfinite(v1[i]) ? std::exp(v1[i] - m1) : 0.0;
    v2[i] = std::isfinite(v2[i]) ? std::exp(v2[i] - m2) : 0.0;
    w1 += v1[i];
    w2 += v2[i];
  }
  if (!(w1 > 0) || !(w2 > 0))
    throw std::runtime_error("tv_on_grid: a density vanishes on the grid");
  double tv = 0;
  for (std::size_t i = 0; i < v1.size(); ++i)
    tv += std::abs(v1[i] / w1 - v2[i] / w2);
  return 0.5 * tv;
}

TvResult exact_tv_u1(const YmhParams& params, const std::vector<double>& eta_angles,
                     int points_per_edge, bool zero_quartic_mode,
                     int max_free_edges) {
  params.validate();
  if (params.group.family != GroupFamily::Circle)
    throw std::invalid_argument("exact_tv_u1: group must be U(1)");
  const LatticeComplex& lat = *params.lattice;
  const std::vector<int>& free_edges =
      params.boundary == BoundaryCondition::Fixed
          ? lat.interior_edges()
          : [&] {
              std::vector<int> all(static_cast<std::size_t>(lat.n_edges()));
              for (int e = 0; e < lat.n_edges(); ++e)
                all[static_cast<std::size_t>(e)] = e;
              return all;
            }();
  const int n = static_cast<int>(free_edges.size());
  if (n > max_free_edges)
    throw std::invalid_argument("exact_tv_u1: too many free edges (" +
                                std::to_string(n) + ")");

  // Event region in angle coordinates: ||I - U|| = 2|sin(theta/2)| <= thr.
  const double thr = params.threshold_e1();
  const double chart_angle = 2.0 * std::asin(params.group.chart_radius / 2.0);
  const double t =
      std::min(thr < 2.0 ? 2.0 * std::asin(thr / 2.0) : M_PI, chart_angle);

  // Fixed boundary angles (verbatim), zero elsewhere.
  std::vector<double> fixed_angle(static_cast<std::size_t>(lat.n_edges()), 0.0);
  const auto& bd = lat.boundary_edges();
  if (!eta_angles.empty()) {
    if (eta_angles.size() != bd.size())
      throw std::invalid_argument("exact_tv_u1: eta size mismatch");
    for (std::size_t k = 0; k < bd.size(); ++k)
      fixed_angle[static_cast<std::size_t>(bd[k])] = eta_angles[k];
  }
  std::vector<int> slot(static_cast<std::size_t>(lat.n_edges()), -1);
  for (int i = 0; i < n; ++i) slot[static_cast<std::size_t>(free_edges[static_cast<std::size_t>(i)])] = i;

  const double m = params.mass;
  const double beta = params.beta;
  auto ymh_u1 = [&](const std::vector<double>& th) {
    double plaq = 0;
    for (const Plaquette& p : lat.plaquettes()) {
      double phi = 0;
      for (int s = 0; s < 4; ++s) {
        if (p.edge[s] < 0) continue;
        const int e = p.edge[s];
        const double ang = slot[static_cast<std::size_t>(e)] >= 0
                               ? th[static_cast<std::size_t>(slot[static_cast<std::size_t>(e)])]
                               : fixed_angle[static_cast<std::size_t>(e)];
        phi += kSign[s] * ang;
      }
      plaq += 1.0 - std::cos(phi);
    }
    double mass_term = 0;
    for (int e = 0; e < lat.n_edges(); ++e) {
      const double ang = slot[static_cast<std::size_t>(e)] >= 0
                             ? th[static_cast<std::size_t>(slot[static_cast<std::size_t>(e)])]
                             : fixed_angle[static_cast<std::size_t>(e)];
      mass_term += 1.0 - std::cos(ang);
    }
    return -beta * (plaq + m * mass_term);
  };
  auto proca_u1 = [&](const std::vector<double>& th) {
    double plaq = 0;
    for (const Plaquette& p : lat.plaquettes()) {
      double phi = 0;
      for (int s = 0; s < 4; ++s) {
        if (p.edge[s] < 0) continue;
        const int e = p.edge[s];
        const double ang = slot[static_cast<std::size_t>(e)] >= 0
                               ? th[static_cast<std::size_t>(slot[static_cast<std::size_t>(e)])]
                               : fixed_angle[static_cast<std::size_t>(e)];
        phi += kSign[s] * ang;
      }
      plaq += 0.5 * phi * phi;
    }
    double mass_term = 0;
    for (int e = 0; e < lat.n_edges(); ++e) {
      const double ang = slot[static_cast<std::size_t>(e)] >= 0
                             ? th[static_cast<std::size_t>(slot[static_cast<std::size_t>(e)])]
                             : fixed_angle[static_cast<std::size_t>(e)];
      mass_term += 0.5 * ang * ang;
    }
    return -beta * (plaq + m * mass_term);
  };

  TvResult r;
  r.region_halfwidth = t;
  r.cells = static_cast<long>(std::pow(points_per_edge, n));
  r.tv = tv_on_grid(n, t, points_per_edge,
                    zero_quartic_mode
                        ? std::function<double(const std::vector<double>&)>(proca_u1)
                        : std::function<double(const std::vector<double>&)>(ymh_u1),
                    proca_u1);
  return r;
}

double tv_l1_bound(const std::vector<double>& f1, const std::vector<double>& f2) {
  if (f1.size() != f2.size()) throw std::invalid_argument("tv_l1_bound: size mismatch");
  double diff = 0, n1 = 0, n2 = 0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    diff += std::abs(f1[i] - f2[i]);
    n1 += std::abs(f1[i]);
    n2 += std::abs(f2[i]);
  }
  return diff / std::max(n1, n2);
}

TvIdentity tv_conditional_identity_check(
    const std::vector<double>& sample_a, const std::vector<double>& sample_b,
    const std::function<bool(double)>& event, double lo, double hi, int bins) {
  if (sample_a.empty() || sample_b.empty())
    throw std::invalid_argument("tv_conditional_identity_check: empty sample");
  std::vector<double> conditioned;
  for (double x : sample_b)
    if (event(x)) conditioned.push_back(x);
  if (conditioned.empty())
    throw std::invalid_argument("tv_conditional_identity_check: empty event");

  const auto ha = histogram_density(sample_a, lo, hi, static_cast<std::size_t>(bins));
  const auto hb =
      histogram_density(conditioned, lo, hi, static_cast<std::size_t>(bins));
  const double w = (hi - lo) / bins;
  TvIdentity out;
  for (std::size_t i = 0; i < ha.size(); ++i)
    out.lhs += 0.5 * std::abs(ha[i] - hb[i]) * w;
  long fails = 0;
  for (double x : sample_a)
    if (!event(x)) ++fails;
  out.rhs = static_cast<double>(fails) / static_cast<double>(sample_a.size());
  // Histogram L1 noise floor: E|p_hat - p| ~ sqrt(2 p / (pi n)) per bin.
  out.noise_scale =
      0.5 * std::sqrt(2.0 / M_PI) *
      std::sqrt(static_cast<double>(bins) *
                (1.0 / static_cast<double>(sample_a.size()) +
                 1.0 / static_cast<double>(conditioned.size())));
  return out;
}

MomentReport moment_comparison(const std::function<AlgebraEdgeField()>& draw_a,
                               const std::function<AlgebraEdgeField()>& draw_b,
                               const std::vector<PairingCoefficients>& forms,
                               long n_a, long n_b) {
  const std::size_t nf = forms.size();
  auto quartic = [](const AlgebraEdgeField& f) {
    const LatticeComplex& lat = *f.lat;
    if (lat.n_plaquettes() == 0) return 0.0;
    const int N = f.group.matrix_size;
    Matrix dx(N, N);
    double s = 0;
    for (const Plaquette& p : lat.plaquettes()) {
      dx.setZero();
      for (int sl = 0; sl < 4; ++sl)
        if (p.edge[sl] >= 0) dx += kSign[sl] * f.X[static_cast<std::size_t>(p.edge[sl])];
      const double n2 = dx.squaredNorm();
      s += n2 * n2;
    }
    return s / lat.n_plaquettes();
  };

  struct Acc {
    std::vector<std::vector<double>> pairings;  // [form][sample]
    std::vector<double> quartics;
  };
  auto collect = [&](const std::function<AlgebraEdgeField()>& draw, long n) {
    Acc acc;
    acc.pairings.assign(nf, {});
    for (long i = 0; i < n; ++i) {
      const AlgebraEdgeField f = draw();
      for (std::size_t r = 0; r < nf; ++r)
        acc.pairings[r].push_back(forms[r].apply(f));
      acc.quartics.push_back(quartic(f));
    }
    return acc;
  };
  const Acc a = collect(draw_a, n_a);
  const Acc b = collect(draw_b, n_b);

  MomentReport rep;
  rep.samples_a = n_a;
  rep.samples_b = n_b;
  auto add_entry = [&](const std::string& name, const std::vector<double>& va,
                       const std::vector<double>& vb) {
    MomentEntry e;
    e.name = name;
    e.mean_a = mean(va);
    e.mean_b = mean(vb);
    e.se_a = std::sqrt(variance(va) / static_cast<double>(va.size()));
    e.se_b = std::sqrt(variance(vb) / static_cast<double>(vb.size()));
    const double denom = std::sqrt(e.se_a * e.se_a + e.se_b * e.se_b);
    e.zscore = denom > 0 ? (e.mean_a - e.mean_b) / denom : 0.0;
    rep.entries.push_back(e);
  };
  for (std::size_t r = 0; r < nf; ++r) {
    add_entry("pairing_" + std::to_string(r), a.pairings[r], b.pairings[r]);
    std::vector<double> sqa(a.pairings[r].size()), sqb(b.pairings[r].size());
    for (std::size_t i = 0; i < sqa.size(); ++i) sqa[i] = a.pairings[r][i] * a.pairings[r][i];
    for (std::size_t i = 0; i < sqb.size(); ++i) sqb[i] = b.pairings[r][i] * b.pairings[r][i];
    add_entry("pairing_" + std::to_string(r) + "_sq", sqa, sqb);
    rep.ks_stats.push_back(ks_two_sample(a.pairings[r], b.pairings[r]));
    rep.ks_pvalues.push_back(ks_two_sample_pvalue(
        rep.ks_stats.back(), a.pairings[r].size(), b.pairings[r].size()));
  }
  add_entry("plaquette_quartic", a.quartics, b.quartics);
  return rep;
}

}  // namespace procalab
