#include "procalab/lie.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace procalab {

namespace {

const cxd kI(0.0, 1.0);

// Canonical anti-Hermitian generators, deterministic order: diagonal
// (Cartan) elements first, then for each pair j<k the real and imaginary
// off-diagonal combinations.
std::vector<Matrix> canonical_generators(GroupFamily f, int N) {
  std::vector<Matrix> gen;
  if (f == GroupFamily::Circle) {
    Matrix g(1, 1);
    g(0, 0) = kI;
    gen.push_back(g);
    return gen;
  }
  if (f == GroupFamily::Unitary) {
    for (int k = 0; k < N; ++k) {
      Matrix g = Matrix::Zero(N, N);
      g(k, k) = kI;
      gen.push_back(g);
    }
  } else {  // SpecialUnitary: traceless diagonal combinations
    for (int k = 1; k < N; ++k) {
      Matrix g = Matrix::Zero(N, N);
      for (int j = 0; j < k; ++j) g(j, j) = kI;
      g(k, k) = -kI * static_cast<double>(k);
      gen.push_back(g);
    }
  }
  for (int j = 0; j < N; ++j) {
    for (int k = j + 1; k < N; ++k) {
      Matrix a = Matrix::Zero(N, N);
      a(j, k) = 1.0;
      a(k, j) = -1.0;
      gen.push_back(a);
      Matrix b = Matrix::Zero(N, N);
      b(j, k) = kI;
      b(k, j) = kI;
      gen.push_back(b);
    }
  }
  return gen;
}

}  // namespace

std::string family_name(GroupFamily f) {
  switch (f) {
    case GroupFamily::Circle: return "U1";
    case GroupFamily::Unitary: return "U";
    case GroupFamily::SpecialUnitary: return "SU";
  }
  return "?";
}

GroupFamily family_from_name(const std::string& name) {
  if (name == "U1" || name == "u1") return GroupFamily::Circle;
  if (name == "U" || name == "u") return GroupFamily::Unitary;
  if (name == "SU" || name == "su") return GroupFamily::SpecialUnitary;
  throw std::invalid_argument("unknown group family: " + name);
}

GroupSpec GroupSpec::make(GroupFamily f, int N, double r0) {
  if (N < 1) throw std::invalid_argument("GroupSpec: matrix_size must be >= 1");
  if (f == GroupFamily::Circle && N != 1)
    throw std::invalid_argument("GroupSpec: U(1) requires matrix_size 1");
  if (f == GroupFamily::SpecialUnitary && N < 2)
    throw std::invalid_argument("GroupSpec: SU(N) requires N >= 2");
  if (!(r0 > 0.0) || r0 > 0.5)
    throw std::invalid_argument("GroupSpec: chart_radius must be in (0, 1/2]");

  GroupSpec spec;
  spec.family = f;
  spec.matrix_size = N;
  spec.chart_radius = r0;

  // Gram-Schmidt under the Hilbert-Schmidt inner product. The canonical
  // generators are constructed orthogonal already; this pass normalizes and
  // guards against drift.
  auto raw = canonical_generators(f, N);
  for (const Matrix& g : raw) {
    Matrix v = g;
    for (const Matrix& b : spec.basis) v -= hs_inner(v, b) * b;
    const double nrm = hs_norm(v);
    if (nrm < 1e-10) continue;
    spec.basis.push_back(v / nrm);
  }
  spec.algebra_dim = static_cast<int>(spec.basis.size());

  const int expected = (f == GroupFamily::Circle) ? 1
                       : (f == GroupFamily::Unitary) ? N * N
                                                     : N * N - 1;
  if (spec.algebra_dim != expected)
    throw std::runtime_error("GroupSpec: basis construction failed");
  return spec;
}

Eigen::VectorXd GroupSpec::to_coeffs(const AlgebraElement& X) const {
  Eigen::VectorXd c(algebra_dim);
  for (int i = 0; i < algebra_dim; ++i) c[i] = hs_inner(X, basis[i]).real();
  return c;
}

AlgebraElement GroupSpec::from_coeffs(const Eigen::VectorXd& c) const {
  Matrix X = Matrix::Zero(matrix_size, matrix_size);
  for (int i = 0; i < algebra_dim; ++i) X += c[i] * basis[i];
  return X;
}

AlgebraElement GroupSpec::gaussian(Rng& rng, double scale) const {
  Matrix X = Matrix::Zero(matrix_size, matrix_size);
  for (int i = 0; i < algebra_dim; ++i) X += (scale * rng.normal()) * basis[i];
  return X;
}

cxd hs_inner(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("hs_inner: shape mismatch");
  return (A * B.adjoint()).trace();
}

double hs_norm(const Matrix& A) { return A.norm(); }

double dist_to_identity(const GroupElement& U) {
  return (Matrix::Identity(U.rows(), U.cols()) - U).norm();
}

bool is_anti_hermitian(const Matrix& X, double tol) {
  return (X + X.adjoint()).norm() <= tol;
}

bool is_unitary(const Matrix& U, double tol) {
  return (U * U.adjoint() - Matrix::Identity(U.rows(), U.cols())).norm() <= tol;
}

GroupElement mat_exp(const AlgebraElement& X) {
  const auto N = X.rows();
  if (N == 1) {
    Matrix U(1, 1);
    U(0, 0) = std::exp(X(0, 0));
    return U;
  }
  // X anti-Hermitian: H = -iX is Hermitian and exp(X) = V e^{i diag} V*.
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  const Matrix H = -kI * X;
  if (N == 2 || N == 3)
    es.computeDirect(H);
  else
    es.compute(H);
  Eigen::VectorXcd phases(N);
  for (Eigen::Index k = 0; k < N; ++k)
    phases[k] = std::exp(kI * es.eigenvalues()[k]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

AlgebraElement principal_log(const GroupElement& U, double chart_radius) {
  const double dist = dist_to_identity(U);
  if (!(dist < chart_radius))
    throw std::domain_error("principal_log: ||I - U|| = " + std::to_string(dist) +
                            " outside chart radius " + std::to_string(chart_radius));
  const auto N = U.rows();
  if (N == 1) {
    Matrix X(1, 1);
    X(0, 0) = std::log(U(0, 0));
    X(0, 0) = cxd(0.0, X(0, 0).imag());  // project onto u(1)
    return X;
  }
  // U is normal; its Schur form is diagonal and Q is unitary, so the
  // principal branch applied to the diagonal gives the principal log.
  Eigen::ComplexSchur<Matrix> schur(U);
  Eigen::VectorXcd logs(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const cxd lambda = schur.matrixT()(k, k);
    logs[k] = cxd(std::log(std::abs(lambda)), std::arg(lambda));
  }
  Matrix X = schur.matrixU() * logs.asDiagonal() * schur.matrixU().adjoint();
  return 0.5 * (X - X.adjoint());  // exact anti-Hermitian projection
}

AlgebraElement truncated_log(const GroupElement& U, double chart_radius) {
  if (dist_to_identity(U) < chart_radius) return principal_log(U, chart_radius);
  return Matrix::Zero(U.rows(), U.cols());
}

GroupElement haar_sample(const GroupSpec& spec, Rng& rng) {
  const int N = spec.matrix_size;
  if (spec.family == GroupFamily::Circle) {
    Matrix U(1, 1);
    U(0, 0) = std::exp(kI * rng.uniform(-M_PI, M_PI));
    return U;
  }
  Matrix G(N, N);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) G(r, c) = cxd(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < N; ++c) {
    const cxd r = R(c, c);
    const cxd phase = (std::abs(r) > 0) ? r / std::abs(r) : cxd(1.0, 0.0);
    Q.col(c) *= phase;
  }
  if (spec.family == GroupFamily::SpecialUnitary) {
    const cxd det = Q.determinant();
    // Divide by a fixed N-th root of det; left SU(N)-invariance of the
    // resulting law is unaffected by the branch choice.
    const cxd root = std::exp(std::log(det) / static_cast<double>(N));
    Q /= root;
  }
  return Q;
}

AlgebraElement ad_apply(const AlgebraElement& X, const AlgebraElement& Y) {
  return X * Y - Y * X;
}

Eigen::MatrixXd ad_matrix(const GroupSpec& spec, const AlgebraElement& X) {
  const int n = spec.algebra_dim;
  Eigen::MatrixXd A(n, n);
  for (int j = 0; j < n; ++j) {
    const Matrix col = ad_apply(X, spec.basis[j]);
    for (int i = 0; i < n; ++i) A(i, j) = hs_inner(col, spec.basis[i]).real();
  }
  return A;
}

double exp_jacobian_det(const GroupSpec& spec, const AlgebraElement& X) {
  const int n = spec.algebra_dim;
  const Eigen::MatrixXd A = ad_matrix(spec, X);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 500; ++k) {
    term = term * (-A) / static_cast<double>(k + 1);
    M += term;
    if (term.norm() < Tol::series_tail) break;
  }
  return std::abs(M.determinant());
}

double bch_defect(const GroupSpec& spec, const AlgebraElement& X,
                  const AlgebraElement& Y) {
  const GroupElement U = mat_exp(X) * mat_exp(Y);
  if (!(dist_to_identity(U) < spec.chart_radius))
    throw std::domain_error("bch_defect: exp(X)exp(Y) outside chart");
  return (principal_log(U, spec.chart_radius) - X - Y).norm();
}

double quartic_holonomy_defect(const AlgebraElement& X1, const AlgebraElement& X2,
                               const AlgebraElement& X3, const AlgebraElement& X4) {
  const double M =
      std::max(std::max(X1.norm(), X2.norm()), std::max(X3.norm(), X4.norm()));
  if (!(M < 1.0))
    throw std::invalid_argument("quartic_holonomy_defect: max ||X_i|| must be < 1");
  const Matrix P = mat_exp(X1) * mat_exp(X2) * mat_exp(X3) * mat_exp(X4);
  const double lhs = dist_to_identity(P);
  const double rhs = (X1 + X2 + X3 + X4).norm();
  return std::abs(lhs * lhs - rhs * rhs);
}

}  // namespace procalab
