#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "procalab/fields.hpp"
#include "procalab/rng.hpp"
#include "procalab/stats.hpp"

namespace procalab {

// Precision of one scalar component of the lattice Proca field:
// beta * (m I + d* d) over the stored edge set, where (dX)_p sums the four
// plaquette edges with signs +,+,-,- and absent edges contribute zero.
struct PrecisionOperator {
  std::shared_ptr<const LatticeComplex> lat;
  double beta = 1.0;
  double mass = 1.0;
  Eigen::SparseMatrix<double> matrix;
};

PrecisionOperator assemble_precision(std::shared_ptr<const LatticeComplex> lat,
                                     double beta, double mass);

// The Gaussian action quadratic form beta*(sum_p (dX)_p^2 + m sum_e X_e^2)
// evaluated by direct summation over plaquettes and edges.
double quadratic_form_direct(const LatticeComplex& lat, double beta, double mass,
                             const Eigen::VectorXd& x);

// Shared factorization of a PrecisionOperator. Dense Cholesky up to
// kDenseLimit edges, sparse Cholesky above; Mode forces a path.
class PrecisionSolver {
 public:
  enum class Mode { Auto, Dense, Sparse };
  static constexpr int kDenseLimit = 5000;

  explicit PrecisionSolver(PrecisionOperator op, Mode mode = Mode::Auto);

  const PrecisionOperator& op() const { return op_; }
  const LatticeComplex& lat() const { return *op_.lat; }
  int size() const { return op_.matrix.rows(); }
  bool dense() const { return dense_.has_value(); }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  // Draw from N(0, P^{-1}) for one scalar component.
  Eigen::VectorXd sample_component(Rng& rng) const;
  // (P^{-1})(e, e'), i.e. the field covariance including the beta factor.
  double covariance_entry(int e1, int e2) const;
  Eigen::MatrixXd dense_covariance() const;  // guarded by kDenseLimit

 private:
  PrecisionOperator op_;
  std::optional<Eigen::LLT<Eigen::MatrixXd>> dense_;
  std::optional<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> sparse_;
  mutable std::vector<std::pair<int, Eigen::VectorXd>> column_cache_;
};

// n_components independent scalar fields assembled along the group basis.
AlgebraEdgeField sample_free(const PrecisionSolver& solver, const GroupSpec& spec,
                             Rng& rng);

// Extreme eigenvalues of (m I + d* d) = op.matrix / beta (dense eigensolve,
// sizes up to PrecisionSolver::kDenseLimit).
std::pair<double, double> spectrum_bounds(const PrecisionOperator& op);

// Boundary data eta: one algebra element per boundary edge, ordered like
// lat.boundary_edges().
struct ProcaBoundary {
  std::vector<AlgebraElement> eta;

  static ProcaBoundary zero(const LatticeComplex& lat, const GroupSpec& spec);
  static ProcaBoundary constant(const LatticeComplex& lat, const AlgebraElement& v);
  double sup_norm() const;
  Eigen::VectorXd component(const GroupSpec& spec, int i) const;
};

// Gaussian conditioning of the free field on its boundary-edge block.
// Blocks T (interior x interior), S (boundary x boundary) and
// Q (interior x boundary) tile the free covariance R = P^{-1}; the
// conditional law per scalar component is N(Q S^{-1} eta_i, T - Q S^{-1} Q^T).
class BoundaryConditioner {
 public:
  // want_T materializes the interior covariance block (needed for
  // conditional_covariance); defaults to on when the lattice is desk-scale.
  explicit BoundaryConditioner(const PrecisionSolver& solver, int want_T = -1);

  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::MatrixXd& S() const { return S_; }
  const Eigen::MatrixXd& T() const;

  Eigen::VectorXd mean_component(const Eigen::VectorXd& eta_i) const;
  Eigen::MatrixXd conditional_covariance() const;  // T - Q S^{-1} Q^T

  // Kriging draw of one scalar component on the interior edges: a joint free
  // sample corrected by the boundary residual solve.
  Eigen::VectorXd sample_component(const Eigen::VectorXd& eta_i, Rng& rng) const;

  // Full-field versions; boundary edges carry eta verbatim.
  AlgebraEdgeField mean_field(const GroupSpec& spec, const ProcaBoundary& eta) const;
  AlgebraEdgeField sample(const GroupSpec& spec, const ProcaBoundary& eta,
                          Rng& rng) const;

  // Hilbert-Schmidt norm of the covariance change Sigma_cond - Sigma_free
  // restricted to interior edges inside [-M, M]^d (eta-independent).
  double covariance_difference_norm(int M) const;

  const PrecisionSolver& solver() const { return solver_; }

 private:
  const PrecisionSolver& solver_;
  std::vector<int> interior_, boundary_;
  Eigen::MatrixXd Q_, S_;
  std::optional<Eigen::MatrixXd> T_;
  Eigen::LLT<Eigen::MatrixXd> S_llt_;
};

struct BoundaryInfluence {
  std::vector<int> edges;          // interior edge ids
  std::vector<int> distance;       // graph distance to the boundary set
  std::vector<double> mean_norm;   // ||E[X_e]||
  LinearFit decay_fit;             // log(binned mean) vs distance
};

BoundaryInfluence boundary_influence_profile(const BoundaryConditioner& cond,
                                             const GroupSpec& spec,
                                             const ProcaBoundary& eta,
                                             int fit_min_dist = 1,
                                             int fit_max_dist = -1);

struct DecayProfile {
  std::vector<double> distance;   // bin centers
  std::vector<double> mean_cov;   // mean |cov| per distance bin
  LinearFit fit;                  // log mean_cov vs distance over fit range
};

// |cov(center, e')| binned by graph distance, with a log-linear fit over
// [fit_min, fit_max]; entries below the floor are discarded as solver noise.
DecayProfile covariance_decay_profile(const PrecisionSolver& solver,
                                      int center_edge, int fit_min = 2,
                                      int fit_max = -1, double floor = 1e-13);

void export_precision_triplets(const PrecisionOperator& op, std::ostream& os);

}  // namespace procalab
