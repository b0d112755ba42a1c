#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "procalab/fields.hpp"
#include "procalab/rng.hpp"

namespace procalab {

enum class BoundaryCondition { Periodic, Fixed };

struct YmhParams {
  double beta = 1.0;   // inverse gauge coupling
  double mass = 1.0;   // m > 0
  double kappa = 0.1;  // event-threshold exponent, in (0, 1/2)
  GroupSpec group;
  std::shared_ptr<const LatticeComplex> lattice;
  BoundaryCondition boundary = BoundaryCondition::Periodic;
  // Fixed boundary values gamma_e, ordered like lattice->boundary_edges();
  // empty means identity.
  std::vector<GroupElement> gamma;

  void validate() const;
  double threshold_e1() const;  // beta^{kappa - 1/2}
  double threshold_e2() const;  // beta^{kappa/2 - 1/2}
};

// Holonomy U_{e1} U_{e2} U_{e3}^{-1} U_{e4}^{-1}; absent slots act as identity.
GroupElement holonomy(const GaugeConfig& cfg, int plaquette);

// (1/2) sum_p ||I - dU_p||^2 + (m/2) sum_e ||I - U_e||^2 over the stored sets.
double action(const GaugeConfig& cfg, const YmhParams& params);

// Action change from setting edge e to U_new, touching only the plaquettes
// containing e plus the edge mass term.
double local_action_delta(const GaugeConfig& cfg, int e, const GroupElement& U_new,
                          const YmhParams& params);

struct SweepResult {
  double acceptance = 0.0;
};

// One pass over the updatable edges in index order; proposal
// U_e <- U_e exp(sigma xi) with xi standard Gaussian in the algebra, accepted
// with min(1, exp(-beta dH)). The proposal is symmetric, so no Jacobian
// correction enters.
SweepResult metropolis_sweep(GaugeConfig& cfg, const YmhParams& params,
                             double sigma, Rng& rng);

// Checkerboard variant: colors = (direction, base-coordinate parities) are
// plaquette-disjoint, so each color class updates in parallel. Proposal and
// acceptance randomness is pre-drawn sequentially, keeping the chain
// deterministic for a fixed seed regardless of thread count. Torus lattices
// need even side length.
SweepResult metropolis_sweep_checkerboard(GaugeConfig& cfg, const YmhParams& params,
                                          double sigma, Rng& rng, int threads);

struct ChainOptions {
  long sweeps = 1000;      // recorded sweeps (after burn-in, thinned)
  long burn_in = 1000;
  long thin = 10;
  double proposal_scale = 0.5;
  bool tune_proposal = true;      // during burn-in only
  double target_acceptance = 0.4;
  bool checkerboard = false;
  int threads = 1;
};

struct ChainStats {
  long recorded = 0;
  double mean_acceptance = 0.0;
  double tuned_sigma = 0.0;
  double tau_action = 1.0;  // integrated autocorrelation time of the action
  std::vector<double> action_trace;
  std::vector<double> acceptance_trace;
  std::vector<double> max_dev_trace;  // max_e ||I - U_e||
  std::vector<std::uint8_t> e1_trace;
  std::vector<std::uint8_t> e2_trace;
};

using RecordCallback = std::function<void(const GaugeConfig&, long sweep)>;

ChainStats run_chain(GaugeConfig& cfg, const YmhParams& params,
                     const ChainOptions& opts, Rng& rng,
                     const RecordCallback& on_record = {});

GaugeConfig initial_config(const YmhParams& params);

bool event_e1(const GaugeConfig& cfg, const YmhParams& params);
bool event_e2(const GaugeConfig& cfg, const YmhParams& params);  // vacuous on torus
double max_edge_deviation(const GaugeConfig& cfg);

// Empirical frequencies of the events over a recorded chain.
std::pair<double, double> event_frequencies(const ChainStats& stats);

// Log-coordinate lift: X_e = Log(U_e), zero outside the chart; the scaled
// variant multiplies by sqrt(beta).
AlgebraEdgeField lift(const GaugeConfig& cfg, double chart_radius, bool scaled,
                      double beta);

// Site map g applied as U_(x,y) -> g(x) U g(y)^{-1}.
GaugeConfig gauge_transform(const GaugeConfig& cfg,
                            const std::function<GroupElement(const Coord&)>& g);

}  // namespace procalab
