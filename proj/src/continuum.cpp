#include "procalab/continuum.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <stdexcept>

namespace procalab {

namespace {

int default_nk(int dim) { return dim >= 3 ? 128 : 1024; }

// Midpoint nodes over [-kmax, kmax].
std::vector<double> k_nodes(int nk, double kmax) {
  std::vector<double> ks(static_cast<std::size_t>(nk));
  const double dk = 2.0 * kmax / nk;
  for (int i = 0; i < nk; ++i) ks[static_cast<std::size_t>(i)] = -kmax + (i + 0.5) * dk;
  return ks;
}

// Per-(slice, term, dim) transform tables over the k-grid.
struct TransformTables {
  // tab[l][j][t][c][ik]
  std::vector<std::vector<std::vector<std::vector<Eigen::VectorXcd>>>> tab;
  std::vector<double> ks;
  double dk;
};

TransformTables build_tables(const TestForm& F, int nk, double kmax) {
  TransformTables T;
  T.ks = k_nodes(nk, kmax);
  T.dk = 2.0 * kmax / nk;
  T.tab.resize(static_cast<std::size_t>(F.n_slices));
  for (int l = 0; l < F.n_slices; ++l) {
    T.tab[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(F.dim));
    for (int j = 0; j < F.dim; ++j) {
      const auto& terms = F.terms[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
      auto& slot = T.tab[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
      slot.resize(terms.size());
      for (std::size_t t = 0; t < terms.size(); ++t) {
        slot[t].resize(static_cast<std::size_t>(F.dim));
        for (int c = 0; c < F.dim; ++c) {
          Eigen::VectorXcd v(nk);
          for (int ik = 0; ik < nk; ++ik)
            v[ik] = terms[t].factors[static_cast<std::size_t>(c)].fourier(
                T.ks[static_cast<std::size_t>(ik)]);
          slot[t][static_cast<std::size_t>(c)] = std::move(v);
        }
      }
    }
  }
  return T;
}

// F_hat for slice l at grid point (indices idx), using the tables.
std::complex<double> fhat_at(const TestForm& F, const TransformTables& T, int l,
                             int j, const std::vector<int>& idx) {
  std::complex<double> s(0.0, 0.0);
  const auto& terms = F.terms[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
  const auto& slot = T.tab[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
  for (std::size_t t = 0; t < terms.size(); ++t) {
    std::complex<double> prod(terms[t].coeff, 0.0);
    for (int c = 0; c < F.dim; ++c)
      prod *= slot[t][static_cast<std::size_t>(c)][idx[static_cast<std::size_t>(c)]];
    s += prod;
  }
  return s;
}

double variance_quadrature(const TestForm& F, double m, const QuadratureOptions& opts,
                           bool km_only) {
  if (!(m > 0)) throw std::invalid_argument("continuum_variance: mass must be > 0");
  const int d = F.dim;
  if (d != 2 && d != 3)
    throw std::invalid_argument("continuum_variance: dim must be 2 or 3");
  const int nk = opts.points_per_dim > 0 ? opts.points_per_dim : default_nk(d);
  const TransformTables T = build_tables(F, nk, opts.kmax);

  double total = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Eigen::VectorXcd fh(d);
  for (;;) {
    double k2 = 0;
    for (int c = 0; c < d; ++c) {
      const double kc = T.ks[static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
      k2 += kc * kc;
    }
    const double denom = k2 + m;
    for (int l = 0; l < F.n_slices; ++l) {
      for (int j = 0; j < d; ++j) fh[j] = fhat_at(F, T, l, j, idx);
      double val = fh.squaredNorm() / denom;
      if (!km_only) {
        std::complex<double> kdot(0.0, 0.0);
        for (int c = 0; c < d; ++c)
          kdot += T.ks[static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])] * fh[c];
        val += std::norm(kdot) / (m * denom);
      }
      total += val;
    }
    int c = d - 1;
    while (c >= 0) {
      if (++idx[static_cast<std::size_t>(c)] < nk) break;
      idx[static_cast<std::size_t>(c)] = 0;
      --c;
    }
    if (c < 0) break;
  }
  double weight = 1.0;
  for (int c = 0; c < d; ++c) weight *= T.dk / (2.0 * M_PI);
  return total * weight;
}

}  // namespace

double PairingCoefficients::apply(const AlgebraEdgeField& field) const {
  double s = 0;
  for (std::size_t l = 0; l < u.size(); ++l)
    s += field.component(static_cast<int>(l)).dot(u[l]);
  return scale * s;
}

PairingCoefficients build_pairing(std::shared_ptr<const LatticeComplex> lat,
                                  const TestForm& F, double eps, double beta) {
  if (!(eps > 0)) throw std::invalid_argument("build_pairing: eps must be > 0");
  const int d = lat->dim();
  if (F.dim != d) throw std::invalid_argument("build_pairing: dimension mismatch");

  // Coverage: every cell meeting supp(F) must have all its outgoing edges.
  const double hw = F.support_halfwidth();
  const int reach = static_cast<int>(std::ceil(hw / eps + 0.5));
  if (!lat->is_torus()) {
    Coord probe{};
    for (int c = 0; c < d; ++c) probe[c] = reach;
    for (int j = 0; j < d; ++j)
      if (lat->edge_index(probe, j) < 0)
        throw std::invalid_argument("build_pairing: lattice does not cover supp(F)/eps");
  } else {
    if (2 * reach + 1 > lat->spec().side)
      throw std::invalid_argument("build_pairing: torus too small for supp(F)/eps");
  }

  PairingCoefficients pc;
  pc.lat = lat;
  pc.scale = std::pow(eps, -(d - 2) / 2.0) * std::sqrt(beta);
  pc.u.assign(static_cast<std::size_t>(F.n_slices),
              Eigen::VectorXd::Zero(lat->n_edges()));
  for (int e = 0; e < lat->n_edges(); ++e) {
    const Edge& ed = lat->edges()[static_cast<std::size_t>(e)];
    bool near = true;
    for (int c = 0; c < d; ++c) {
      // Torus coordinates carry the form centered in [0, L); boxes use
      // signed coordinates directly.
      const int a = ed.base[c];
      if (std::abs(a) > reach && !lat->is_torus()) {
        near = false;
        break;
      }
    }
    if (!near) continue;
    for (int l = 0; l < F.n_slices; ++l)
      pc.u[static_cast<std::size_t>(l)][e] = F.cell_integral(l, ed.dir, eps, ed.base);
  }
  return pc;
}

double pair_field(const AlgebraEdgeField& field, const TestForm& F, double eps,
                  double beta) {
  return build_pairing(field.lat, F, eps, beta).apply(field);
}

double continuum_variance(const TestForm& F, double m, const QuadratureOptions& opts) {
  return variance_quadrature(F, m, opts, false);
}

double continuum_variance_km_only(const TestForm& F, double m,
                                  const QuadratureOptions& opts) {
  return variance_quadrature(F, m, opts, true);
}

std::vector<Eigen::MatrixXd> evaluate_rm_f_grid(const TestForm& F, int slice,
                                                double m, double eps, int L,
                                                const QuadratureOptions& opts) {
  if (F.dim != 2)
    throw std::invalid_argument("evaluate_rm_f_grid: implemented for d = 2");
  const int d = 2;
  const int nk = opts.points_per_dim > 0 ? opts.points_per_dim : default_nk(d);
  const TransformTables T = build_tables(F, nk, opts.kmax);
  const int nx = 2 * L + 2;  // grid coordinates -L-1 .. L

  // H_j(k) = sum_j' M(k)_{jj'} F_hat_{j'}(k) on the full k-grid.
  std::vector<Eigen::MatrixXcd> H(2, Eigen::MatrixXcd(nk, nk));
  std::vector<int> idx(2, 0);
  for (int i1 = 0; i1 < nk; ++i1) {
    for (int i2 = 0; i2 < nk; ++i2) {
      idx[0] = i1;
      idx[1] = i2;
      const double k1 = T.ks[static_cast<std::size_t>(i1)];
      const double k2 = T.ks[static_cast<std::size_t>(i2)];
      const std::complex<double> f1 = fhat_at(F, T, slice, 0, idx);
      const std::complex<double> f2 = fhat_at(F, T, slice, 1, idx);
      const double denom = k1 * k1 + k2 * k2 + m;
      const std::complex<double> kdot = k1 * f1 + k2 * f2;
      H[0](i1, i2) = (f1 + k1 * kdot / m) / denom;
      H[1](i1, i2) = (f2 + k2 * kdot / m) / denom;
    }
  }

  // Separable inverse transform onto the x-grid: G = Re(E1^T H E2) * w^2/(2pi)^2.
  Eigen::MatrixXcd E1(nk, nx), E2(nk, nx);
  for (int ik = 0; ik < nk; ++ik) {
    const double k = T.ks[static_cast<std::size_t>(ik)];
    for (int ix = 0; ix < nx; ++ix) {
      const double x = eps * (ix - L - 1);
      E1(ik, ix) = std::complex<double>(std::cos(k * x), std::sin(k * x));
      E2(ik, ix) = E1(ik, ix);
    }
  }
  const double w = T.dk / (2.0 * M_PI);
  std::vector<Eigen::MatrixXd> G;
  G.reserve(2);
  for (int j = 0; j < 2; ++j) {
    Eigen::MatrixXcd tmp = E1.transpose() * H[static_cast<std::size_t>(j)] * E2;
    G.push_back(w * w * tmp.real());
  }
  return G;
}

namespace {

// Box complex and unit-beta precision with lattice mass eps^2 m.
struct LatticeSetup {
  std::shared_ptr<const LatticeComplex> lat;
  PrecisionOperator op;
  double lattice_mass;
};

LatticeSetup make_lattice(const TestForm& F, double eps, double m, int side) {
  LatticeSpec spec;
  spec.dimension = F.dim;
  spec.side = side;
  spec.topology = Topology::Box;
  LatticeSetup s;
  s.lat = std::make_shared<LatticeComplex>(LatticeComplex::make(spec));
  s.lattice_mass = eps * eps * m;
  s.op = assemble_precision(s.lat, 1.0, s.lattice_mass);
  return s;
}

Eigen::VectorXd cell_integral_vector(const LatticeComplex& lat, const TestForm& F,
                                     int slice, double eps) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(lat.n_edges());
  const double hw = F.support_halfwidth();
  const int reach = static_cast<int>(std::ceil(hw / eps + 0.5));
  for (int e = 0; e < lat.n_edges(); ++e) {
    const Edge& ed = lat.edges()[static_cast<std::size_t>(e)];
    bool near = true;
    for (int c = 0; c < lat.dim(); ++c)
      if (std::abs(ed.base[c]) > reach) {
        near = false;
        break;
      }
    if (near) u[e] = F.cell_integral(slice, ed.dir, eps, ed.base);
  }
  return u;
}

}  // namespace

LatticeVarianceResult lattice_variance(const TestForm& F, double eps, double m,
                                       const LatticeVarianceOptions& opts) {
  if (!(eps > 0) || !(m > 0))
    throw std::invalid_argument("lattice_variance: eps and mass must be > 0");
  int side = static_cast<int>(std::floor(std::pow(eps, -1.0 - opts.delta)));
  side = std::max(side, opts.min_side);
  const int min_cover =
      static_cast<int>(std::ceil(F.support_halfwidth() / eps + 1.0));
  side = std::max(side, min_cover);

  const int d = F.dim;
  LatticeSetup s = make_lattice(F, eps, m, side);
  // The beta in the pairing and the beta in the covariance cancel exactly:
  // Var = eps^{-(d-2)} u^T (m_lat I + d*d)^{-1} u. opts.beta scales the
  // assembled operator and is divided back out, exercising the cancellation.
  PrecisionOperator op = opts.beta == 1.0
                             ? std::move(s.op)
                             : assemble_precision(s.lat, opts.beta, s.lattice_mass);
  PrecisionSolver solver(std::move(op));

  LatticeVarianceResult r;
  r.side = side;
  r.n_edges = s.lat->n_edges();
  r.lattice_mass = s.lattice_mass;
  const double scale = std::pow(eps, -(d - 2)) * opts.beta;
  for (int l = 0; l < F.n_slices; ++l) {
    const Eigen::VectorXd u = cell_integral_vector(*s.lat, F, l, eps);
    r.variance += scale * u.dot(solver.solve(u));
  }
  return r;
}

ErrorTerms error_terms_AB(const TestForm& F, double eps, double m,
                          const ErrorTermOptions& opts) {
  if (F.dim != 2) throw std::invalid_argument("error_terms_AB: d = 2 only");
  if (F.n_slices != 1)
    throw std::invalid_argument("error_terms_AB: single-slice forms only");
  const int d = 2;
  const int side = static_cast<int>(
      std::ceil((F.support_halfwidth() + opts.pad / std::sqrt(m)) / eps));
  LatticeSetup s = make_lattice(F, eps, m, side);
  const LatticeComplex& lat = *s.lat;

  ErrorTerms et;
  et.eps = eps;
  et.side = side;

  const Eigen::VectorXd u = cell_integral_vector(lat, F, 0, eps);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(lat.n_edges());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(lat.n_edges());
  const std::vector<Eigen::MatrixXd> G =
      evaluate_rm_f_grid(F, 0, m, eps, side, opts.quadrature);
  const double epsd = std::pow(eps, d);
  Eigen::VectorXd pt(2);
  for (int e = 0; e < lat.n_edges(); ++e) {
    const Edge& ed = lat.edges()[static_cast<std::size_t>(e)];
    pt[0] = eps * ed.base[0];
    pt[1] = eps * ed.base[1];
    w[e] = epsd * F.eval(0, ed.dir, pt);
    x[e] = G[static_cast<std::size_t>(ed.dir)](ed.base[0] + side + 1,
                                               ed.base[1] + side + 1);
  }

  et.norm_u = u.norm();
  et.norm_w = w.norm();
  et.norm_u_minus_w = (u - w).norm();

  // Rt^{-1} = eps^{d-2} (m_lat I + d*d): sparse apply.
  const double rinv_scale = std::pow(eps, d - 2);
  Eigen::VectorXd rinv_x = rinv_scale * (s.op.matrix * x);
  et.norm_w_minus_rinv_x = (w - rinv_x).norm();

  // u^T Rt u via a conjugate-gradient solve on the padded box.
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(20000);
  cg.compute(s.op.matrix);
  const Eigen::VectorXd ru = cg.solve(u);
  if (cg.info() != Eigen::Success)
    throw std::runtime_error("error_terms_AB: CG failed to converge");
  et.u_rt_u = std::pow(eps, -(d - 2)) * u.dot(ru);
  // w^T x = sum_e eps^d F_j(eps a) G_j(eps a), the Riemann sum of (F, R_m F).
  et.w_t_x = w.dot(x);
  et.quad_diff = std::abs(et.u_rt_u - et.w_t_x);

  // ||Rt|| = eps^{-(d-2)} / lambda_min(m_lat I + d*d) via inverse power
  // iteration with the CG solver.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(lat.n_edges()).normalized();
  double lam = 0;
  for (int it = 0; it < 15; ++it) {
    v = cg.solve(v);
    lam = v.norm();
    v /= lam;
  }
  et.norm_r_tilde = std::pow(eps, -(d - 2)) * lam;
  return et;
}

std::vector<ScalingRow> scaling_study(const TestForm& F, double m,
                                      const std::vector<double>& eps_list,
                                      const LatticeVarianceOptions& opts) {
  const double cont = continuum_variance(F, m);
  std::vector<ScalingRow> rows;
  for (double eps : eps_list) {
    const LatticeVarianceResult r = lattice_variance(F, eps, m, opts);
    ScalingRow row;
    row.eps = eps;
    row.lattice_var = r.variance;
    row.continuum_var = cont;
    row.rel_gap = cont != 0 ? std::abs(r.variance - cont) / std::abs(cont) : 0.0;
    row.side = r.side;
    rows.push_back(row);
  }
  return rows;
}

double richardson_limit(const std::vector<ScalingRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("richardson_limit: need >= 2 rows");
  const ScalingRow& a = rows[rows.size() - 2];
  const ScalingRow& b = rows[rows.size() - 1];
  const double r = (a.eps / b.eps) * (a.eps / b.eps);
  return (r * b.lattice_var - a.lattice_var) / (r - 1.0);
}

}  // namespace procalab
