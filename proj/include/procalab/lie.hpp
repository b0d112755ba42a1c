#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "procalab/rng.hpp"
#include "procalab/tolerances.hpp"

namespace procalab {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Elements are plain complex matrices; GroupElement entries are unitary
// (det 1 for SU(N)), AlgebraElement entries are anti-Hermitian. Validators
// below check those contracts where elements enter from outside.
using GroupElement = Matrix;
using AlgebraElement = Matrix;

enum class GroupFamily { Circle, Unitary, SpecialUnitary };

std::string family_name(GroupFamily f);
GroupFamily family_from_name(const std::string& name);

// A compact matrix group together with an orthonormal basis of its Lie
// algebra and the chart radius of the logarithmic coordinates.
struct GroupSpec {
  GroupFamily family = GroupFamily::Circle;
  int matrix_size = 1;    // N
  int algebra_dim = 1;    // n
  double chart_radius = kDefaultChartRadius;  // r0, Hilbert-Schmidt ball
  std::vector<AlgebraElement> basis;          // V_1..V_n, orthonormal

  static GroupSpec make(GroupFamily f, int N,
                        double r0 = kDefaultChartRadius);

  GroupElement identity() const { return Matrix::Identity(matrix_size, matrix_size); }
  AlgebraElement zero() const { return Matrix::Zero(matrix_size, matrix_size); }

  // Coefficients of X in the basis (real; X must be in the algebra).
  Eigen::VectorXd to_coeffs(const AlgebraElement& X) const;
  AlgebraElement from_coeffs(const Eigen::VectorXd& c) const;

  // Standard Gaussian vector in the algebra: sum of xi_i V_i.
  AlgebraElement gaussian(Rng& rng, double scale = 1.0) const;
};

// Hilbert-Schmidt inner product Tr(A B*); real for anti-Hermitian pairs.
cxd hs_inner(const Matrix& A, const Matrix& B);
double hs_norm(const Matrix& A);
double dist_to_identity(const GroupElement& U);  // ||I - U||

bool is_anti_hermitian(const Matrix& X, double tol = Tol::anti_hermitian);
bool is_unitary(const Matrix& U, double tol = Tol::unitarity);

// exp via spectral decomposition of the Hermitian matrix -iX; the result is
// unitary to machine precision.
GroupElement mat_exp(const AlgebraElement& X);

// Principal matrix logarithm of a unitary U inside the chart
// ||I - U|| < r0. Throws std::domain_error outside the chart.
AlgebraElement principal_log(const GroupElement& U,
                             double chart_radius = kDefaultChartRadius);

// Globally defined logarithm: principal_log inside the chart, zero outside.
AlgebraElement truncated_log(const GroupElement& U,
                             double chart_radius = kDefaultChartRadius);

// Haar-distributed group element. QR of a complex Ginibre matrix with the
// R-diagonal phases fixed; SU(N) divides out an N-th root of the
// determinant; U(1) draws a uniform angle.
GroupElement haar_sample(const GroupSpec& spec, Rng& rng);

// ad_X(Y) = XY - YX.
AlgebraElement ad_apply(const AlgebraElement& X, const AlgebraElement& Y);

// Matrix of ad_X in the spec basis: A_ij = <[X, V_j], V_i>.
Eigen::MatrixXd ad_matrix(const GroupSpec& spec, const AlgebraElement& X);

// |det M(X)| with M(X) = (I - exp(-ad_X))/ad_X = sum_k (-ad_X)^k/(k+1)!,
// the change-of-variables Jacobian of exp in the spec basis.
double exp_jacobian_det(const GroupSpec& spec, const AlgebraElement& X);

// ||Log(exp X exp Y) - X - Y||. Throws if exp(X)exp(Y) leaves the chart.
double bch_defect(const GroupSpec& spec, const AlgebraElement& X,
                  const AlgebraElement& Y);

// | ||I - exp(X1)..exp(X4)||^2 - ||X1+X2+X3+X4||^2 |, the quartic holonomy
// expansion defect. Requires max ||X_i|| < 1.
double quartic_holonomy_defect(const AlgebraElement& X1, const AlgebraElement& X2,
                               const AlgebraElement& X3, const AlgebraElement& X4);

}  // namespace procalab
