#include "procalab/proca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace procalab {

namespace {

bool edge_in_subbox(const LatticeComplex& lat, int e, int M) {
  const Edge& ed = lat.edges()[static_cast<std::size_t>(e)];
  Coord h = ed.base;
  h[ed.dir] += 1;
  for (int i = 0; i < lat.dim(); ++i)
    if (std::abs(ed.base[i]) > M || std::abs(h[i]) > M) return false;
  return true;
}

}  // namespace

GaugeConfig GaugeConfig::identity(std::shared_ptr<const LatticeComplex> lat,
                                  const GroupSpec& spec) {
  GaugeConfig cfg;
  cfg.lat = std::move(lat);
  cfg.group = spec;
  cfg.U.assign(static_cast<std::size_t>(cfg.lat->n_edges()), spec.identity());
  return cfg;
}

AlgebraEdgeField AlgebraEdgeField::zero(std::shared_ptr<const LatticeComplex> lat,
                                        const GroupSpec& spec) {
  AlgebraEdgeField f;
  f.lat = std::move(lat);
  f.group = spec;
  f.X.assign(static_cast<std::size_t>(f.lat->n_edges()), spec.zero());
  return f;
}

Eigen::VectorXd AlgebraEdgeField::component(int i) const {
  Eigen::VectorXd v(lat->n_edges());
  for (int e = 0; e < lat->n_edges(); ++e)
    v[e] = hs_inner(X[static_cast<std::size_t>(e)], group.basis[static_cast<std::size_t>(i)]).real();
  return v;
}

void AlgebraEdgeField::set_from_components(const std::vector<Eigen::VectorXd>& comps) {
  for (int e = 0; e < lat->n_edges(); ++e) {
    Matrix m = group.zero();
    for (int i = 0; i < group.algebra_dim; ++i)
      m += comps[static_cast<std::size_t>(i)][e] * group.basis[static_cast<std::size_t>(i)];
    X[static_cast<std::size_t>(e)] = m;
  }
}

double AlgebraEdgeField::max_norm() const {
  double m = 0;
  for (const auto& x : X) m = std::max(m, x.norm());
  return m;
}

PrecisionOperator assemble_precision(std::shared_ptr<const LatticeComplex> lat,
                                     double beta, double mass) {
  if (!(beta > 0)) throw std::invalid_argument("assemble_precision: beta must be > 0");
  if (!(mass > 0)) throw std::invalid_argument("assemble_precision: mass must be > 0");
  PrecisionOperator op;
  op.lat = std::move(lat);
  op.beta = beta;
  op.mass = mass;
  const int n = op.lat->n_edges();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * 8);
  for (int e = 0; e < n; ++e) trips.emplace_back(e, e, beta * mass);
  static const double sign[4] = {1.0, 1.0, -1.0, -1.0};
  for (const Plaquette& p : op.lat->plaquettes()) {
    for (int a = 0; a < 4; ++a) {
      if (p.edge[a] < 0) continue;
      for (int b = 0; b < 4; ++b) {
        if (p.edge[b] < 0) continue;
        trips.emplace_back(p.edge[a], p.edge[b], beta * sign[a] * sign[b]);
      }
    }
  }
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  return op;
}

double quadratic_form_direct(const LatticeComplex& lat, double beta, double mass,
                             const Eigen::VectorXd& x) {
  double plaq = 0;
  static const double sign[4] = {1.0, 1.0, -1.0, -1.0};
  for (const Plaquette& p : lat.plaquettes()) {
    double dx = 0;
    for (int s = 0; s < 4; ++s)
      if (p.edge[s] >= 0) dx += sign[s] * x[p.edge[s]];
    plaq += dx * dx;
  }
  return beta * (plaq + mass * x.squaredNorm());
}

PrecisionSolver::PrecisionSolver(PrecisionOperator op, Mode mode) : op_(std::move(op)) {
  const int n = op_.matrix.rows();
  const bool use_dense =
      mode == Mode::Dense || (mode == Mode::Auto && n <= kDenseLimit);
  if (use_dense) {
    dense_.emplace(Eigen::MatrixXd(op_.matrix));
    if (dense_->info() != Eigen::Success)
      throw std::runtime_error("PrecisionSolver: dense Cholesky failed (non-PD assembly?)");
  } else {
    sparse_.emplace();
    sparse_->compute(op_.matrix);
    if (sparse_->info() != Eigen::Success)
      throw std::runtime_error("PrecisionSolver: sparse Cholesky failed (non-PD assembly?)");
  }
}

Eigen::VectorXd PrecisionSolver::solve(const Eigen::VectorXd& b) const {
  if (dense_) return dense_->solve(b);
  return sparse_->solve(b);
}

Eigen::VectorXd PrecisionSolver::sample_component(Rng& rng) const {
  const int n = size();
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  if (dense_) {
    // P = L L^T, so x = L^{-T} z has covariance P^{-1}.
    return dense_->matrixU().solve(z);
  }
  // Sparse factor is of the permuted matrix: P_perm = Pm A Pm^T = L L^T,
  // hence x = Pm^T L^{-T} z has covariance A^{-1}.
  Eigen::VectorXd y = sparse_->matrixU().solve(z);
  return sparse_->permutationPinv() * y;
}

double PrecisionSolver::covariance_entry(int e1, int e2) const {
  for (const auto& [e, col] : column_cache_)
    if (e == e2) return col[e1];
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(size());
  unit[e2] = 1.0;
  Eigen::VectorXd col = solve(unit);
  if (column_cache_.size() > 64) column_cache_.clear();
  column_cache_.emplace_back(e2, col);
  return col[e1];
}

Eigen::MatrixXd PrecisionSolver::dense_covariance() const {
  const int n = size();
  if (n > kDenseLimit)
    throw std::invalid_argument("dense_covariance: lattice too large");
  Eigen::MatrixXd R(n, n);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    unit[j] = 1.0;
    R.col(j) = solve(unit);
    unit[j] = 0.0;
  }
  return 0.5 * (R + R.transpose());
}

AlgebraEdgeField sample_free(const PrecisionSolver& solver, const GroupSpec& spec,
                             Rng& rng) {
  AlgebraEdgeField f = AlgebraEdgeField::zero(solver.op().lat, spec);
  std::vector<Eigen::VectorXd> comps;
  comps.reserve(static_cast<std::size_t>(spec.algebra_dim));
  for (int i = 0; i < spec.algebra_dim; ++i)
    comps.push_back(solver.sample_component(rng));
  f.set_from_components(comps);
  return f;
}

std::pair<double, double> spectrum_bounds(const PrecisionOperator& op) {
  const int n = op.matrix.rows();
  if (n > PrecisionSolver::kDenseLimit)
    throw std::invalid_argument("spectrum_bounds: lattice too large for dense eigensolve");
  Eigen::MatrixXd A = Eigen::MatrixXd(op.matrix) / op.beta;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

ProcaBoundary ProcaBoundary::zero(const LatticeComplex& lat, const GroupSpec& spec) {
  ProcaBoundary b;
  b.eta.assign(lat.boundary_edges().size(), spec.zero());
  return b;
}

ProcaBoundary ProcaBoundary::constant(const LatticeComplex& lat,
                                      const AlgebraElement& v) {
  ProcaBoundary b;
  b.eta.assign(lat.boundary_edges().size(), v);
  return b;
}

double ProcaBoundary::sup_norm() const {
  double m = 0;
  for (const auto& x : eta) m = std::max(m, x.norm());
  return m;
}

Eigen::VectorXd ProcaBoundary::component(const GroupSpec& spec, int i) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(eta.size()));
  for (std::size_t k = 0; k < eta.size(); ++k)
    v[static_cast<Eigen::Index>(k)] =
        hs_inner(eta[k], spec.basis[static_cast<std::size_t>(i)]).real();
  return v;
}

BoundaryConditioner::BoundaryConditioner(const PrecisionSolver& solver, int want_T)
    : solver_(solver),
      interior_(solver.lat().interior_edges()),
      boundary_(solver.lat().boundary_edges()) {
  if (solver.lat().is_torus() || boundary_.empty())
    throw std::invalid_argument("BoundaryConditioner: box lattices with boundary only");
  const auto ni = static_cast<Eigen::Index>(interior_.size());
  const auto nb = static_cast<Eigen::Index>(boundary_.size());
  Q_.resize(ni, nb);
  S_.resize(nb, nb);
  // Covariance columns for boundary edges: R(:, b) = P^{-1} e_b.
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(solver.size());
  for (Eigen::Index j = 0; j < nb; ++j) {
    unit[boundary_[static_cast<std::size_t>(j)]] = 1.0;
    Eigen::VectorXd col = solver.solve(unit);
    unit[boundary_[static_cast<std::size_t>(j)]] = 0.0;
    for (Eigen::Index i = 0; i < ni; ++i) Q_(i, j) = col[interior_[static_cast<std::size_t>(i)]];
    for (Eigen::Index i = 0; i < nb; ++i) S_(i, j) = col[boundary_[static_cast<std::size_t>(i)]];
  }
  S_ = 0.5 * (S_ + S_.transpose().eval());
  S_llt_.compute(S_);
  if (S_llt_.info() != Eigen::Success)
    throw std::runtime_error("BoundaryConditioner: boundary covariance not PD");
  const bool mat_T = want_T >= 0 ? want_T != 0
                                 : solver.size() <= PrecisionSolver::kDenseLimit;
  if (mat_T) {
    Eigen::MatrixXd R = solver.dense_covariance();
    Eigen::MatrixXd T(ni, ni);
    for (Eigen::Index i = 0; i < ni; ++i)
      for (Eigen::Index j = 0; j < ni; ++j)
        T(i, j) = R(interior_[static_cast<std::size_t>(i)], interior_[static_cast<std::size_t>(j)]);
    T_ = std::move(T);
  }
}

const Eigen::MatrixXd& BoundaryConditioner::T() const {
  if (!T_) throw std::logic_error("BoundaryConditioner: T not materialized");
  return *T_;
}

Eigen::VectorXd BoundaryConditioner::mean_component(const Eigen::VectorXd& eta_i) const {
  return Q_ * S_llt_.solve(eta_i);
}

Eigen::MatrixXd BoundaryConditioner::conditional_covariance() const {
  const Eigen::MatrixXd& T = this->T();
  return T - Q_ * S_llt_.solve(Q_.transpose());
}

Eigen::VectorXd BoundaryConditioner::sample_component(const Eigen::VectorXd& eta_i,
                                                      Rng& rng) const {
  Eigen::VectorXd joint = solver_.sample_component(rng);
  Eigen::VectorXd y_bd(static_cast<Eigen::Index>(boundary_.size()));
  for (std::size_t i = 0; i < boundary_.size(); ++i)
    y_bd[static_cast<Eigen::Index>(i)] = joint[boundary_[i]];
  Eigen::VectorXd correction = Q_ * S_llt_.solve(eta_i - y_bd);
  Eigen::VectorXd out(static_cast<Eigen::Index>(interior_.size()));
  for (std::size_t i = 0; i < interior_.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = joint[interior_[i]] + correction[static_cast<Eigen::Index>(i)];
  return out;
}

AlgebraEdgeField BoundaryConditioner::mean_field(const GroupSpec& spec,
                                                 const ProcaBoundary& eta) const {
  AlgebraEdgeField f = AlgebraEdgeField::zero(solver_.op().lat, spec);
  for (int i = 0; i < spec.algebra_dim; ++i) {
    Eigen::VectorXd mu = mean_component(eta.component(spec, i));
    for (std::size_t k = 0; k < interior_.size(); ++k)
      f.X[static_cast<std::size_t>(interior_[k])] +=
          mu[static_cast<Eigen::Index>(k)] * spec.basis[static_cast<std::size_t>(i)];
  }
  for (std::size_t k = 0; k < boundary_.size(); ++k)
    f.X[static_cast<std::size_t>(boundary_[k])] = eta.eta[k];
  return f;
}

AlgebraEdgeField BoundaryConditioner::sample(const GroupSpec& spec,
                                             const ProcaBoundary& eta,
                                             Rng& rng) const {
  AlgebraEdgeField f = AlgebraEdgeField::zero(solver_.op().lat, spec);
  for (int i = 0; i < spec.algebra_dim; ++i) {
    Eigen::VectorXd xi = sample_component(eta.component(spec, i), rng);
    for (std::size_t k = 0; k < interior_.size(); ++k)
      f.X[static_cast<std::size_t>(interior_[k])] +=
          xi[static_cast<Eigen::Index>(k)] * spec.basis[static_cast<std::size_t>(i)];
  }
  for (std::size_t k = 0; k < boundary_.size(); ++k)
    f.X[static_cast<std::size_t>(boundary_[k])] = eta.eta[k];
  return f;
}

double BoundaryConditioner::covariance_difference_norm(int M) const {
  // Sigma_cond - Sigma_free on the sub-box equals -(Q S^{-1} Q^T) there.
  std::vector<Eigen::Index> sel;
  for (std::size_t k = 0; k < interior_.size(); ++k)
    if (edge_in_subbox(solver_.lat(), interior_[k], M))
      sel.push_back(static_cast<Eigen::Index>(k));
  if (sel.empty()) return 0.0;
  Eigen::MatrixXd Qs(static_cast<Eigen::Index>(sel.size()), S_.rows());
  for (std::size_t r = 0; r < sel.size(); ++r)
    Qs.row(static_cast<Eigen::Index>(r)) = Q_.row(sel[r]);
  Eigen::MatrixXd D = Qs * S_llt_.solve(Qs.transpose());
  return D.norm();
}

BoundaryInfluence boundary_influence_profile(const BoundaryConditioner& cond,
                                             const GroupSpec& spec,
                                             const ProcaBoundary& eta,
                                             int fit_min_dist, int fit_max_dist) {
  const LatticeComplex& lat = cond.solver().lat();
  AlgebraEdgeField mu = cond.mean_field(spec, eta);
  BoundaryInfluence out;
  std::map<int, std::pair<double, int>> bins;
  for (int e : lat.interior_edges()) {
    const int dist = lat.distance_to_boundary(e);
    const double nrm = mu.X[static_cast<std::size_t>(e)].norm();
    out.edges.push_back(e);
    out.distance.push_back(dist);
    out.mean_norm.push_back(nrm);
    auto& [sum, cnt] = bins[dist];
    sum += nrm;
    ++cnt;
  }
  if (fit_max_dist < 0) fit_max_dist = lat.spec().side;
  std::vector<double> xs, ys;
  for (const auto& [dist, acc] : bins) {
    if (dist < fit_min_dist || dist > fit_max_dist) continue;
    const double m = acc.first / acc.second;
    if (m > 1e-300) {
      xs.push_back(dist);
      ys.push_back(std::log(m));
    }
  }
  if (xs.size() >= 2) out.decay_fit = fit_line(xs, ys);
  return out;
}

DecayProfile covariance_decay_profile(const PrecisionSolver& solver, int center_edge,
                                      int fit_min, int fit_max, double floor) {
  const LatticeComplex& lat = solver.lat();
  if (fit_max < 0)
    fit_max = lat.is_torus() ? lat.spec().side / 2 : lat.spec().side;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(solver.size());
  unit[center_edge] = 1.0;
  Eigen::VectorXd col = solver.solve(unit);
  std::map<int, std::pair<double, int>> bins;
  for (int e = 0; e < lat.n_edges(); ++e) {
    if (e == center_edge) continue;
    const double c = std::abs(col[e]);
    if (c < floor) continue;
    auto& [sum, cnt] = bins[lat.graph_distance(center_edge, e)];
    sum += c;
    ++cnt;
  }
  DecayProfile prof;
  std::vector<double> xs, ys;
  for (const auto& [dist, acc] : bins) {
    const double m = acc.first / acc.second;
    prof.distance.push_back(dist);
    prof.mean_cov.push_back(m);
    if (dist >= fit_min && dist <= fit_max) {
      xs.push_back(dist);
      ys.push_back(std::log(m));
    }
  }
  if (xs.size() >= 2) prof.fit = fit_line(xs, ys);
  return prof;
}

void export_precision_triplets(const PrecisionOperator& op, std::ostream& os) {
  char buf[64];
  for (int k = 0; k < op.matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.matrix, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      os << buf;
    }
  }
}

}  // namespace procalab
