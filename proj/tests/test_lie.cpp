#include <doctest.h>

#include <cmath>

#include "procalab/lie.hpp"
#include "procalab/stats.hpp"

using namespace procalab;

namespace {

// Independent oracles.

cxd entrywise_inner(const Matrix& A, const Matrix& B) {
  cxd s(0, 0);
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c) s += A(r, c) * std::conj(B(r, c));
  return s;
}

Matrix exp_series(const Matrix& X, int terms) {
  Matrix acc = Matrix::Identity(X.rows(), X.cols());
  Matrix term = Matrix::Identity(X.rows(), X.cols());
  for (int k = 1; k <= terms; ++k) {
    term = term * X / static_cast<double>(k);
    acc += term;
  }
  return acc;
}

Matrix log_series(const Matrix& U, int terms) {
  const Matrix A = Matrix::Identity(U.rows(), U.cols()) - U;
  Matrix acc = Matrix::Zero(U.rows(), U.cols());
  Matrix pow = Matrix::Identity(U.rows(), U.cols());
  for (int k = 1; k <= terms; ++k) {
    pow = pow * A;
    acc -= pow / static_cast<double>(k);
  }
  return acc;
}

Matrix direct_commutator(const Matrix& X, const Matrix& Y) {
  const auto N = X.rows();
  Matrix out = Matrix::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
      for (Eigen::Index k = 0; k < N; ++k)
        out(i, j) += X(i, k) * Y(k, j) - Y(i, k) * X(k, j);
  return out;
}

// Finite-difference Jacobian of t -> Log(exp(X)^{-1} exp(X + t V_j)).
Eigen::MatrixXd fd_jacobian(const GroupSpec& spec, const AlgebraElement& X, double h) {
  const int n = spec.algebra_dim;
  Eigen::MatrixXd J(n, n);
  const Matrix einv = mat_exp(X).adjoint();
  for (int j = 0; j < n; ++j) {
    const Matrix plus = principal_log(einv * mat_exp(X + h * spec.basis[static_cast<std::size_t>(j)]));
    const Matrix minus = principal_log(einv * mat_exp(X - h * spec.basis[static_cast<std::size_t>(j)]));
    const Eigen::VectorXd col = spec.to_coeffs((plus - minus) / (2.0 * h));
    J.col(j) = col;
  }
  return J;
}

AlgebraElement random_algebra(const GroupSpec& spec, Rng& rng, double norm) {
  AlgebraElement X = spec.gaussian(rng);
  return X * (norm / X.norm());
}

}  // namespace

TEST_CASE("basis orthonormality and structure") {
  for (auto [fam, N] : {std::pair{GroupFamily::Circle, 1},
                        std::pair{GroupFamily::Unitary, 2},
                        std::pair{GroupFamily::Unitary, 3},
                        std::pair{GroupFamily::SpecialUnitary, 2},
                        std::pair{GroupFamily::SpecialUnitary, 3}}) {
    const GroupSpec spec = GroupSpec::make(fam, N);
    const int expected = fam == GroupFamily::Circle ? 1
                         : fam == GroupFamily::Unitary ? N * N
                                                       : N * N - 1;
    CHECK(spec.algebra_dim == expected);
    for (int i = 0; i < spec.algebra_dim; ++i) {
      CHECK(is_anti_hermitian(spec.basis[static_cast<std::size_t>(i)]));
      if (fam == GroupFamily::SpecialUnitary)
        CHECK(std::abs(spec.basis[static_cast<std::size_t>(i)].trace()) < Tol::orthonormality);
      for (int j = 0; j < spec.algebra_dim; ++j) {
        const double expect = i == j ? 1.0 : 0.0;
        CHECK(std::abs(hs_inner(spec.basis[static_cast<std::size_t>(i)],
                                spec.basis[static_cast<std::size_t>(j)]) -
                       expect) < Tol::orthonormality);
      }
    }
  }
}

TEST_CASE("coefficients reconstruct elements") {
  Rng rng(11);
  const GroupSpec spec = GroupSpec::make(GroupFamily::SpecialUnitary, 3);
  for (int t = 0; t < 20; ++t) {
    const AlgebraElement X = spec.gaussian(rng);
    CHECK((spec.from_coeffs(spec.to_coeffs(X)) - X).norm() < Tol::coeff_reconstruct);
  }
}

TEST_CASE("hs_inner basics and entrywise oracle") {
  const Matrix I2 = Matrix::Identity(2, 2);
  CHECK(hs_inner(I2, I2).real() == doctest::Approx(2.0));

  const GroupSpec u2 = GroupSpec::make(GroupFamily::Unitary, 2);
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const Matrix A = u2.gaussian(rng), B = u2.gaussian(rng);
    CHECK(std::abs(hs_inner(A, B) - entrywise_inner(A, B)) < 1e-12);
    CHECK(std::abs(hs_inner(A, B).imag()) < 1e-12);  // real for anti-Hermitian
  }
  CHECK_THROWS_AS(hs_inner(Matrix::Zero(2, 2), Matrix::Zero(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("mat_exp: identity, scalar, series oracle, unitarity") {
  const GroupSpec su2 = GroupSpec::make(GroupFamily::SpecialUnitary, 2);
  CHECK(dist_to_identity(mat_exp(su2.zero())) < 1e-15);

  Matrix x1(1, 1);
  x1(0, 0) = cxd(0, 0.3);
  CHECK(std::abs(mat_exp(x1)(0, 0) - std::exp(cxd(0, 0.3))) < 1e-15);

  Rng rng(3);
  for (int t = 0; t < 25; ++t) {
    const AlgebraElement X = random_algebra(su2, rng, 0.2);
    CHECK((mat_exp(X) - exp_series(X, 60)).norm() < 1e-13);
  }
  for (int t = 0; t < 25; ++t) {
    const AlgebraElement X = random_algebra(su2, rng, 1.0);
    CHECK(is_unitary(mat_exp(X)));
    CHECK((mat_exp(X) - exp_series(X, 60)).norm() < 1e-12);
  }
}

TEST_CASE("principal_log: inverse property and series oracle") {
  const GroupSpec su2 = GroupSpec::make(GroupFamily::SpecialUnitary, 2);
  CHECK(principal_log(su2.identity()).norm() < 1e-14);

  Rng rng(5);
  for (int t = 0; t < 25; ++t) {
    const AlgebraElement X = random_algebra(su2, rng, 0.1);
    CHECK((principal_log(mat_exp(X)) - X).norm() < 1e-11);
  }
  // ||I - U|| = 0.4 sits inside the chart; compare with the power series.
  for (int t = 0; t < 10; ++t) {
    AlgebraElement X = random_algebra(su2, rng, 0.15);
    GroupElement U = mat_exp(X);
    // scale until ||I - U|| is close to 0.4
    double lo = 1.0, hi = 4.0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      (dist_to_identity(mat_exp(mid * X)) < 0.4 ? lo : hi) = mid;
    }
    U = mat_exp(lo * X);
    const AlgebraElement L = principal_log(U);
    CHECK((L - log_series(U, 200)).norm() < 1e-10);
    CHECK(is_anti_hermitian(L));
    CHECK((mat_exp(L) - U).norm() < Tol::chart_round_trip);
  }
  // outside the chart: reported error
  const GroupSpec su2b = su2;
  Matrix minusI = -su2b.identity();
  CHECK_THROWS_AS(principal_log(minusI), std::domain_error);
}

TEST_CASE("truncated_log: zero outside the chart") {
  const GroupSpec su2 = GroupSpec::make(GroupFamily::SpecialUnitary, 2);
  CHECK(truncated_log(su2.identity()).norm() == 0.0);
  CHECK(truncated_log(-su2.identity()).norm() == 0.0);  // ||I-(-I)|| = 2sqrt2
  Rng rng(9);
  const AlgebraElement X = random_algebra(su2, rng, 0.05);
  CHECK((truncated_log(mat_exp(X)) - X).norm() < Tol::chart_round_trip);
}

TEST_CASE("chart round trip for all families") {
  Rng rng(13);
  for (auto [fam, N] : {std::pair{GroupFamily::Circle, 1},
                        std::pair{GroupFamily::SpecialUnitary, 2},
                        std::pair{GroupFamily::SpecialUnitary, 3},
                        std::pair{GroupFamily::Unitary, 3}}) {
    const GroupSpec spec = GroupSpec::make(fam, N);
    for (int t = 0; t < 200; ++t) {
      const AlgebraElement X =
          random_algebra(spec, rng, rng.uniform(0.0, spec.chart_radius / 2));
      CHECK((truncated_log(mat_exp(X)) - X).norm() <= Tol::chart_round_trip);
    }
  }
}

TEST_CASE("norm comparison inequality on Haar-conditioned samples") {
  // (1/2)||I-U|| <= ||log U|| <= 2||I-U|| whenever ||I-U|| <= 1/2.
  Rng rng(17);
  const GroupSpec su2 = GroupSpec::make(GroupFamily::SpecialUnitary, 2);
  int checked = 0;
  while (checked < 2000) {
    const GroupElement U = haar_sample(su2, rng);
    const double dist = dist_to_identity(U);
    if (dist > 0.5 || dist < 1e-12) continue;
    const double ln = principal_log(U).norm();
    CHECK(ln >= 0.5 * dist);
    CHECK(ln <= 2.0 * dist);
    ++checked;
  }
}

TEST_CASE("haar_sample: circle mean, U(2) character moment, invariance") {
  Rng rng(23);
  const GroupSpec u1 = GroupSpec::make(GroupFamily::Circle, 1);
  double sum = 0;
  const int n = 200000;
  for (int t = 0; t < n; ++t) sum += haar_sample(u1, rng)(0, 0).real();
  // E[Tr U] = 0 with per-sample sd 1/sqrt(2).
  CHECK(std::abs(sum / n) < 3.0 / std::sqrt(2.0 * n));

  // E|Tr U|^2 = 1 for Haar U(2); quadrature oracle over the eigenangle
  // density: U = e^{i phi} V, Tr V = 2 cos(a), density (2/pi) sin^2(a).
  const int quad = 20000;
  double oracle = 0;
  for (int i = 0; i < quad; ++i) {
    const double a = (i + 0.5) * M_PI / quad;
    oracle += 4.0 * std::cos(a) * std::cos(a) * (2.0 / M_PI) * std::sin(a) *
              std::sin(a) * (M_PI / quad);
  }
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-6));

  const GroupSpec u2 = GroupSpec::make(GroupFamily::Unitary, 2);
  const int m = 100000;
  double s2 = 0, var_acc = 0;
  std::vector<double> retr, retr_conj;
  Rng rng2(29);
  const GroupElement g = haar_sample(u2, rng2);
  for (int t = 0; t < m; ++t) {
    const GroupElement U = haar_sample(u2, rng);
    const double v = std::norm(U.trace());
    s2 += v;
    var_acc += (v - 1.0) * (v - 1.0);
    retr.push_back(U.trace().real());
    retr_conj.push_back((g * U * g.adjoint()).trace().real());
  }
  const double se = std::sqrt(var_acc / m / m);
  CHECK(std::abs(s2 / m - oracle) < 3.0 * se + 3e-3);

  // conjugation invariance: same law of Tr under U -> g U g^{-1}
  const double ks = ks_two_sample(retr, retr_conj);
  CHECK(ks_two_sample_pvalue(ks, retr.size(), retr_conj.size()) > 0.01);
}

TEST_CASE("haar_sample: SU(N) constraints and left invariance") {
  Rng rng(31);
  const GroupSpec su3 = GroupSpec::make(GroupFamily::SpecialUnitary, 3);
  std::vector<double> a, b;
  const GroupElement g = haar_sample(su3, rng);
  for (int t = 0; t < 20000; ++t) {
    const GroupElement U = haar_sample(su3, rng);
    CHECK(is_unitary(U));
    CHECK(std::abs(U.determinant() - cxd(1, 0)) < Tol::special_det);
    a.push_back(U.trace().real());
    b.push_back((g * U).trace().real());
  }
  const double ks = ks_two_sample(a, b);
  CHECK(ks_two_sample_pvalue(ks, a.size(), b.size()) > 0.01);
}

TEST_CASE("ad_apply: abelian, self, structure constants") {
  const GroupSpec u1 = GroupSpec::make(GroupFamily::Circle, 1);
  Rng rng(37);
  CHECK(ad_apply(u1.gaussian(rng), u1.gaussian(rng)).norm() < 1e-15);

  const GroupSpec su2 = GroupSpec::make(GroupFamily::SpecialUnitary, 2);
  const AlgebraElement X = su2.gaussian(rng);
  CHECK(ad_apply(X, X).norm() < 1e-14);

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Matrix lhs = ad_apply(su2.basis[static_cast<std::size_t>(i)],
                                  su2.basis[static_cast<std::size_t>(j)]);
      const Matrix oracle = direct_commutator(su2.basis[static_cast<std::size_t>(i)],
                                              su2.basis[static_cast<std::size_t>(j)]);
      CHECK((lhs - oracle).norm() < 1e-14);
      CHECK(is_anti_hermitian(lhs, 1e-14));
    }
}

TEST_CASE("exp_jacobian_det: identity values and finite-difference oracle") {
  const GroupSpec u1 = GroupSpec::make(GroupFamily::Circle, 1);
  Rng rng(41);
  CHECK(exp_jacobian_det(u1, u1.zero()) == doctest::Approx(1.0));
  CHECK(exp_jacobian_det(u1, u1.gaussian(rng)) == doctest::Approx(1.0));

  for (auto [fam, N] : {std::pair{GroupFamily::SpecialUnitary, 2},
                        std::pair{GroupFamily::SpecialUnitary, 3}}) {
    const GroupSpec spec = GroupSpec::make(fam, N);
    CHECK(exp_jacobian_det(spec, spec.zero()) == doctest::Approx(1.0));
    for (int t = 0; t < 30; ++t) {
      const AlgebraElement X = random_algebra(spec, rng, rng.uniform(0.05, 0.3));
      const double det = exp_jacobian_det(spec, X);
      const double oracle = std::abs(fd_jacobian(spec, X, 1e-4).determinant());
      CHECK(std::abs(det - oracle) < 1e-5);
    }
  }
}

TEST_CASE("jacobian departs from 1 at most linearly") {
  const GroupSpec su2 = GroupSpec::make(GroupFamily::SpecialUnitary, 2);
  Rng rng(43);
  const AlgebraElement dir = random_algebra(su2, rng, 1.0);
  double prev_ratio = -1;
  for (double s = 0.8; s > 1e-3; s *= 0.5) {
    const double ratio = std::abs(exp_jacobian_det(su2, s * dir) - 1.0) / s;
    if (prev_ratio >= 0) CHECK(ratio < prev_ratio * 1.1);
    prev_ratio = ratio;
  }
}

TEST_CASE("exp remainder is quadratic") {
  const GroupSpec su3 = GroupSpec::make(GroupFamily::SpecialUnitary, 3);
  Rng rng(47);
  const AlgebraElement dir = random_algebra(su3, rng, 1.0);
  double prev = -1;
  for (double s = 1.0; s > 1e-3; s *= 0.5) {
    const Matrix X = s * dir;
    const double r = (mat_exp(X) - su3.identity() - X).norm() / (s * s);
    if (prev >= 0) CHECK(r < prev * 1.1);
    prev = r;
  }
}

TEST_CASE("bch_defect: commuting cases vanish, quadratic scaling") {
  const GroupSpec u1 = GroupSpec::make(GroupFamily::Circle, 1);
  Rng rng(53);
  CHECK(bch_defect(u1, u1.gaussian(rng, 0.1), u1.gaussian(rng, 0.1)) < 1e-12);

  const GroupSpec su2 = GroupSpec::make(GroupFamily::SpecialUnitary, 2);
  const AlgebraElement Z = random_algebra(su2, rng, 0.1);
  CHECK(bch_defect(su2, Z, Z) < 1e-12);

  const AlgebraElement A = random_algebra(su2, rng, 1.0);
  const AlgebraElement B = random_algebra(su2, rng, 1.0);
  std::vector<double> scales, defects;
  for (double s = 0.1; s > 0.1 / 64; s *= 0.5) {
    scales.push_back(s);
    defects.push_back(bch_defect(su2, s * A, s * B));
  }
  const LinearFit fit = fit_loglog(scales, defects);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.05));
  // leading term (1/2)||[X, Y]||
  const double lead = 0.5 * ad_apply(scales[4] * A, scales[4] * B).norm();
  CHECK(defects[4] == doctest::Approx(lead).epsilon(0.1));
}

TEST_CASE("quartic_holonomy_defect: zeros, scalar closed form, cubic scaling") {
  const GroupSpec su2 = GroupSpec::make(GroupFamily::SpecialUnitary, 2);
  const Matrix Z = su2.zero();
  CHECK(quartic_holonomy_defect(Z, Z, Z, Z) == doctest::Approx(0.0));

  // U(1): exact difference against the scalar closed form.
  auto angle = [](double th) {
    Matrix x(1, 1);
    x(0, 0) = cxd(0, th);
    return x;
  };
  const double t1 = 0.3, t2 = -0.2, t3 = 0.15, t4 = 0.05;
  const double sum = t1 + t2 + t3 + t4;
  const double oracle = std::abs(std::norm(1.0 - std::exp(cxd(0, sum))) - sum * sum);
  CHECK(quartic_holonomy_defect(angle(t1), angle(t2), angle(t3), angle(t4)) ==
        doctest::Approx(oracle).epsilon(1e-12));

  Rng rng(59);
  std::vector<Matrix> dirs;
  for (int i = 0; i < 4; ++i) dirs.push_back(random_algebra(su2, rng, 1.0));
  double prev = -1;
  for (double s = 0.4; s > 0.4 / 32; s *= 0.5) {
    const double d = quartic_holonomy_defect(s * dirs[0], s * dirs[1], s * dirs[2],
                                             s * dirs[3]);
    if (prev >= 0) CHECK(prev / d >= 7.0);
    prev = d;
  }
  CHECK_THROWS_AS(quartic_holonomy_defect(1.5 * dirs[0], dirs[1], dirs[2], dirs[3]),
                  std::invalid_argument);
}
