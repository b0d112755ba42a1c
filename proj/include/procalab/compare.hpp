#pragma once

#include <functional>
#include <string>
#include <vector>

#include "procalab/continuum.hpp"
#include "procalab/gibbs.hpp"
#include "procalab/proca.hpp"

namespace procalab {

// Gaussian action of an algebra-valued edge field,
// S(X) = (1/2) sum_p ||(dX)_p||^2 + (m/2) sum_e ||X_e||^2,
// over the stored plaquette and edge sets (absent plaquette slots are zero).
double algebra_action(const AlgebraEdgeField& X, double mass);

// Log density (unnormalized) of the log-coordinate pushforward of the YMH
// measure: -beta H(exp X) + sum_{interior e} log|det M(X_e)|, with boundary
// group values exp(eta_e). Interior entries of X must lift group elements
// inside the chart; throws std::domain_error otherwise.
double log_density_lifted_ymh(const AlgebraEdgeField& X, const YmhParams& params,
                              const ProcaBoundary& eta);

// Log density (unnormalized) of the lattice Proca field, -beta S(X), with
// boundary entries replaced by eta.
double log_density_proca(const AlgebraEdgeField& X, const YmhParams& params,
                         const ProcaBoundary& eta);

// exp(log_density_lifted_ymh - log_density_proca) - 1.
double residual_psi(const AlgebraEdgeField& X, const YmhParams& params,
                    const ProcaBoundary& eta);

// |H(exp X) - S(X)| for the same configuration (eta = 0 outside interior).
double action_gap(const AlgebraEdgeField& X, const YmhParams& params);

// Total variation between two log-densities on the midpoint grid
// [-t, t]^n with K points per axis. Log densities may return -inf to carve
// out events.
double tv_on_grid(int n, double t, int K,
                  const std::function<double(const std::vector<double>&)>& logf1,
                  const std::function<double(const std::vector<double>&)>& logf2);

struct TvResult {
  double tv = 0.0;
  double region_halfwidth = 0.0;  // per-edge angle bound of the event region
  long cells = 0;
};

// Exact (quadrature) total variation between the lifted U(1) YMH density and
// the lattice Proca density, both conditioned on the norm-threshold event
// ||I - U_e|| <= beta^{kappa - 1/2}. Requires G = U(1) and at most
// max_free_edges updatable edges. zero_quartic_mode replaces H by S in the
// first density (diagnostic: TV should vanish to quadrature error).
TvResult exact_tv_u1(const YmhParams& params, const std::vector<double>& eta_angles,
                     int points_per_edge, bool zero_quartic_mode = false,
                     int max_free_edges = 6);

// Claim-style TV bound ||f1 - f2||_1 / max(||f1||_1, ||f2||_1) for grid
// densities; used with tv_on_grid in tests.
double tv_l1_bound(const std::vector<double>& f1, const std::vector<double>& f2);

// Estimates d_TV(P, P_E) from a reference sample (histogram route) and
// compares with the exact identity d_TV(P, P_E) = P(E^c). Bins must align
// with the event boundary for the histogram estimate to be consistent.
struct TvIdentity {
  double lhs = 0.0;  // histogram TV between sample_a and conditioned sample_b
  double rhs = 0.0;  // empirical P(E^c) from sample_a
  double noise_scale = 0.0;  // expected statistical floor of lhs - rhs
};

TvIdentity tv_conditional_identity_check(
    const std::vector<double>& sample_a, const std::vector<double>& sample_b,
    const std::function<bool(double)>& event, double lo, double hi, int bins);

struct MomentEntry {
  std::string name;
  double mean_a = 0.0, mean_b = 0.0;
  double se_a = 0.0, se_b = 0.0;
  double zscore = 0.0;
};

struct MomentReport {
  std::vector<MomentEntry> entries;
  std::vector<double> ks_stats;     // per pairing functional
  std::vector<double> ks_pvalues;
  long samples_a = 0, samples_b = 0;
};

// Low-order observable comparison between two field ensembles: pairings
// against each functional, their squares, and the plaquette-local quartic
// mean_p ||(dX)_p||^4.
MomentReport moment_comparison(const std::function<AlgebraEdgeField()>& draw_a,
                               const std::function<AlgebraEdgeField()>& draw_b,
                               const std::vector<PairingCoefficients>& forms,
                               long n_a, long n_b);

}  // namespace procalab
