#include "procalab/testform.hpp"

#include <cmath>
#include <stdexcept>

namespace procalab {

namespace {

// Gauss-Legendre nodes/weights, order 8, on [-1, 1].
const double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267,
                           -0.5255324099163290, -0.1834346424956498,
                           0.1834346424956498,  0.5255324099163290,
                           0.7966664774136267,  0.9602898564975363};
const double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745,
                             0.3137066458778873, 0.3626837833783620,
                             0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

double bump_unit(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double u = 1.0 - t * t;
  const double u2 = u * u;
  return u2 * u2;
}

double dbump_unit(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double u = 1.0 - t * t;
  return -8.0 * t * u * u * u;
}

}  // namespace

double Factor::value(double x) const {
  const double t = (x - center) / radius;
  return kind == Kind::Bump ? bump_unit(t) : dbump_unit(t) / radius;
}

double Factor::integral(double a, double b) const {
  // Clip to the support, then Gauss-Legendre order 8 on the clipped
  // interval; the integrand is a polynomial of degree <= 8 there, so the
  // rule is exact.
  double lo = std::max(a, center - radius);
  double hi = std::min(b, center + radius);
  if (hi <= lo) return 0.0;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double s = 0;
  for (int i = 0; i < 8; ++i) s += kGlWeight[i] * value(mid + half * kGlNode[i]);
  return s * half;
}

std::complex<double> Factor::fourier(double k) const {
  // Composite Gauss-Legendre over the support, panel count tied to the
  // oscillation rate.
  const int panels = std::max(8, static_cast<int>(std::ceil(std::abs(k) * radius)));
  const double lo = center - radius;
  const double width = 2.0 * radius / panels;
  std::complex<double> acc(0.0, 0.0);
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (int i = 0; i < 8; ++i) {
      const double x = mid + half * kGlNode[i];
      acc += kGlWeight[i] * half * value(x) *
             std::complex<double>(std::cos(k * x), -std::sin(k * x));
    }
  }
  return acc;
}

double TestForm::eval(int slice, int j, const Eigen::VectorXd& x) const {
  double s = 0;
  for (const TensorTerm& t : terms[static_cast<std::size_t>(slice)][static_cast<std::size_t>(j)]) {
    double prod = t.coeff;
    for (int c = 0; c < dim; ++c) prod *= t.factors[static_cast<std::size_t>(c)].value(x[c]);
    s += prod;
  }
  return s;
}

double TestForm::cell_integral(int slice, int j, double eps, const Coord& a) const {
  double s = 0;
  for (const TensorTerm& t : terms[static_cast<std::size_t>(slice)][static_cast<std::size_t>(j)]) {
    double prod = t.coeff;
    for (int c = 0; c < dim && prod != 0.0; ++c) {
      const double lo = eps * (a[c] - 0.5);
      const double hi = eps * (a[c] + 0.5);
      prod *= t.factors[static_cast<std::size_t>(c)].integral(lo, hi);
    }
    s += prod;
  }
  return s;
}

double TestForm::total_integral(int slice, int j) const {
  double s = 0;
  for (const TensorTerm& t : terms[static_cast<std::size_t>(slice)][static_cast<std::size_t>(j)]) {
    double prod = t.coeff;
    for (int c = 0; c < dim; ++c) {
      const Factor& f = t.factors[static_cast<std::size_t>(c)];
      prod *= f.integral(f.center - f.radius, f.center + f.radius);
    }
    s += prod;
  }
  return s;
}

std::complex<double> TestForm::fourier(int slice, int j,
                                       const Eigen::VectorXd& k) const {
  std::complex<double> s(0.0, 0.0);
  for (const TensorTerm& t : terms[static_cast<std::size_t>(slice)][static_cast<std::size_t>(j)]) {
    std::complex<double> prod(t.coeff, 0.0);
    for (int c = 0; c < dim; ++c) prod *= t.factors[static_cast<std::size_t>(c)].fourier(k[c]);
    s += prod;
  }
  return s;
}

double TestForm::support_halfwidth() const {
  double m = 0;
  for (const auto& slice : terms)
    for (const auto& dirs : slice)
      for (const TensorTerm& t : dirs)
        for (const Factor& f : t.factors)
          m = std::max(m, std::abs(f.center) + f.radius);
  return m;
}

TestForm TestForm::rotated(const Eigen::MatrixXd& O) const {
  if (O.rows() != n_slices || O.cols() != n_slices)
    throw std::invalid_argument("TestForm::rotated: matrix size mismatch");
  TestForm out;
  out.dim = dim;
  out.n_slices = n_slices;
  out.terms.assign(static_cast<std::size_t>(n_slices),
                   std::vector<std::vector<TensorTerm>>(static_cast<std::size_t>(dim)));
  for (int l = 0; l < n_slices; ++l)
    for (int lp = 0; lp < n_slices; ++lp)
      for (int j = 0; j < dim; ++j)
        for (const TensorTerm& t : terms[static_cast<std::size_t>(lp)][static_cast<std::size_t>(j)]) {
          TensorTerm scaled = t;
          scaled.coeff *= O(l, lp);
          if (scaled.coeff != 0.0)
            out.terms[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)].push_back(scaled);
        }
  return out;
}

namespace {

std::vector<Factor> bump_factors(int dim, double radius,
                                 const std::vector<double>& center) {
  std::vector<Factor> fs(static_cast<std::size_t>(dim));
  for (int c = 0; c < dim; ++c) {
    fs[static_cast<std::size_t>(c)].kind = Factor::Kind::Bump;
    fs[static_cast<std::size_t>(c)].center =
        center.empty() ? 0.0 : center[static_cast<std::size_t>(c)];
    fs[static_cast<std::size_t>(c)].radius = radius;
  }
  return fs;
}

}  // namespace

TestForm TestForm::bump(int dim, int n_slices, int slice, int j, double radius,
                        const std::vector<double>& center) {
  TestForm f;
  f.dim = dim;
  f.n_slices = n_slices;
  f.terms.assign(static_cast<std::size_t>(n_slices),
                 std::vector<std::vector<TensorTerm>>(static_cast<std::size_t>(dim)));
  TensorTerm t;
  t.coeff = 1.0;
  t.factors = bump_factors(dim, radius, center);
  f.terms[static_cast<std::size_t>(slice)][static_cast<std::size_t>(j)].push_back(t);
  return f;
}

TestForm TestForm::gradient(int dim, double radius,
                            const std::vector<double>& center) {
  // F = grad(phi) with phi the tensor bump: F_j = b'(x_j) prod_{c != j} b(x_c).
  TestForm f;
  f.dim = dim;
  f.n_slices = 1;
  f.terms.assign(1, std::vector<std::vector<TensorTerm>>(static_cast<std::size_t>(dim)));
  for (int j = 0; j < dim; ++j) {
    TensorTerm t;
    t.coeff = 1.0;
    t.factors = bump_factors(dim, radius, center);
    t.factors[static_cast<std::size_t>(j)].kind = Factor::Kind::BumpDerivative;
    f.terms[0][static_cast<std::size_t>(j)].push_back(t);
  }
  return f;
}

TestForm TestForm::curl2d(double radius, const std::vector<double>& center) {
  // F = (d2 phi, -d1 phi), divergence-free by construction.
  TestForm f;
  f.dim = 2;
  f.n_slices = 1;
  f.terms.assign(1, std::vector<std::vector<TensorTerm>>(2));
  {
    TensorTerm t;
    t.coeff = 1.0;
    t.factors = bump_factors(2, radius, center);
    t.factors[1].kind = Factor::Kind::BumpDerivative;
    f.terms[0][0].push_back(t);
  }
  {
    TensorTerm t;
    t.coeff = -1.0;
    t.factors = bump_factors(2, radius, center);
    t.factors[0].kind = Factor::Kind::BumpDerivative;
    f.terms[0][1].push_back(t);
  }
  return f;
}

}  // namespace procalab
