#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "procalab/topology.hpp"

namespace procalab {

// One-dimensional factor of a tensor-product test function: the polynomial
// bump b(t) = (1 - t^2)^4 on [-1, 1] (rescaled), or its derivative. The bump
// is C^3 on the line and closed-form integrable, which keeps cell integrals
// exact and Fourier tails ~ k^-5.
struct Factor {
  enum class Kind { Bump, BumpDerivative };
  Kind kind = Kind::Bump;
  double center = 0.0;
  double radius = 1.0;

  double value(double x) const;
  double integral(double a, double b) const;            // exact on [a, b]
  std::complex<double> fourier(double k) const;         // int f e^{-ikx} dx
};

struct TensorTerm {
  double coeff = 1.0;
  std::vector<Factor> factors;  // one per dimension
};

// Compactly supported smooth test form with values in R^{n_slices} x R^dim:
// slice l, direction j holds a sum of tensor terms. Built-in families cover
// generic bumps, gradient forms and divergence-free (curl) forms.
class TestForm {
 public:
  int dim = 2;
  int n_slices = 1;
  // terms[l][j] -> sum of tensor products
  std::vector<std::vector<std::vector<TensorTerm>>> terms;

  double eval(int slice, int j, const Eigen::VectorXd& x) const;

  // Integral of slice/direction over the cell eps*(a + [-1/2, 1/2]^d).
  double cell_integral(int slice, int j, double eps, const Coord& a) const;

  // Analytic integral over all of R^d.
  double total_integral(int slice, int j) const;

  // F_j^l transformed: product of per-dimension factor transforms.
  std::complex<double> fourier(int slice, int j, const Eigen::VectorXd& k) const;

  // Covering half-width: |x_c| <= support_halfwidth() outside the support.
  double support_halfwidth() const;

  // Mix slices by an orthogonal matrix O: F'^l = sum_l' O(l, l') F^{l'}.
  TestForm rotated(const Eigen::MatrixXd& O) const;

  static TestForm bump(int dim, int n_slices, int slice, int j, double radius,
                       const std::vector<double>& center = {});
  static TestForm gradient(int dim, double radius,
                           const std::vector<double>& center = {});
  static TestForm curl2d(double radius, const std::vector<double>& center = {});
};

}  // namespace procalab
