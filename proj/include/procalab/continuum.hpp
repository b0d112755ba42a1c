#pragma once

#include <memory>
#include <vector>

#include "procalab/fields.hpp"
#include "procalab/proca.hpp"
#include "procalab/testform.hpp"

namespace procalab {

// Precomputed coefficients of the rescaled pairing
//   Z = eps^{-(d-2)/2} sqrt(beta) sum_{l, e=(a,j)} <X_e, V_l> u^l_j(a),
// with u the cell integrals of the form over eps*(a + [-1/2,1/2]^d).
struct PairingCoefficients {
  std::shared_ptr<const LatticeComplex> lat;
  double scale = 1.0;
  std::vector<Eigen::VectorXd> u;  // one vector over edges per slice

  double apply(const AlgebraEdgeField& field) const;
};

// Throws std::invalid_argument if the lattice does not cover supp(F)/eps.
PairingCoefficients build_pairing(std::shared_ptr<const LatticeComplex> lat,
                                  const TestForm& F, double eps, double beta);

double pair_field(const AlgebraEdgeField& field, const TestForm& F, double eps,
                  double beta);

struct QuadratureOptions {
  int points_per_dim = 0;   // 0 = default by dimension (1024 / 128)
  double kmax = 64.0;
};

// sum_l (F^l, R_m F^l) by Fourier quadrature with the multiplier
// (delta_ij + k_i k_j / m) / (|k|^2 + m).
double continuum_variance(const TestForm& F, double m,
                          const QuadratureOptions& opts = {});

// Same integrand restricted to K_m only (valid variance for divergence-free
// forms); used as an independent quadrature route in tests.
double continuum_variance_km_only(const TestForm& F, double m,
                                  const QuadratureOptions& opts = {});

// Samples of G = R_m F^l on the tensor grid {eps*g : g in [-L-1, L]^d}
// (d = 2 only). Result indexed [j][ix][iy].
std::vector<Eigen::MatrixXd> evaluate_rm_f_grid(const TestForm& F, int slice,
                                                double m, double eps, int L,
                                                const QuadratureOptions& opts = {});

struct LatticeVarianceOptions {
  double delta = 0.5;     // box side L = floor(eps^{-1-delta})
  int min_side = 0;       // override: L = max(L, min_side)
  double beta = 1.0;      // cancels exactly; kept to exercise the contract
};

struct LatticeVarianceResult {
  double variance = 0.0;
  int side = 0;
  int n_edges = 0;
  double lattice_mass = 0.0;  // eps^2 m
};

// Exact Gaussian variance of the pairing Z under the free lattice field on
// the box: sum_l eps^{-(d-2)} u_l^T (m_lat I + d*d)^{-1} u_l with
// m_lat = eps^2 m, which converges to continuum_variance(F, m).
LatticeVarianceResult lattice_variance(const TestForm& F, double eps, double m,
                                       const LatticeVarianceOptions& opts = {});

struct ErrorTerms {
  double eps = 0.0;
  int side = 0;
  double norm_u = 0.0;            // ||u||, u = cell integrals
  double norm_w = 0.0;            // ||w||, w(e) = eps^d F_j(eps a)
  double norm_u_minus_w = 0.0;
  double norm_r_tilde = 0.0;      // operator norm estimate of eps^{-(d-2)} R
  double norm_w_minus_rinv_x = 0.0;  // x(e) = (R_m F)_j(eps a)
  double quad_diff = 0.0;         // |u^T Rt u - w^T x|
  double u_rt_u = 0.0;
  double w_t_x = 0.0;
};

struct ErrorTermOptions {
  double pad = 12.0;   // physical margin between supp F and the box boundary
  QuadratureOptions quadrature;
};

// Error-term diagnostics of the discrete-to-continuum comparison for a
// single-slice form (d = 2).
ErrorTerms error_terms_AB(const TestForm& F, double eps, double m,
                          const ErrorTermOptions& opts = {});

struct ScalingRow {
  double eps;
  double lattice_var;
  double continuum_var;
  double rel_gap;
  int side;
};

std::vector<ScalingRow> scaling_study(const TestForm& F, double m,
                                      const std::vector<double>& eps_list,
                                      const LatticeVarianceOptions& opts = {});

// Richardson extrapolation of the lattice sequence assuming O(eps^2) error.
double richardson_limit(const std::vector<ScalingRow>& rows);

}  // namespace procalab
