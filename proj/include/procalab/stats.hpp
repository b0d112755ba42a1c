#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace procalab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y = slope*x + intercept.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Fitted exponent p of y ~ C x^p via least squares on (log x, log y).
// Nonpositive y entries are skipped.
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// One-sample Kolmogorov-Smirnov statistic against a CDF given as a sorted
// table (x_i, F(x_i)); the empirical sample is passed unsorted.
double ks_statistic(std::vector<double> sample,
                    const std::vector<double>& cdf_x,
                    const std::vector<double>& cdf_y);

// Two-sample KS statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic p-value for the two-sample KS statistic.
double ks_two_sample_pvalue(double stat, std::size_t n1, std::size_t n2);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased

// Integrated autocorrelation time of a trace (Sokal windowing, c = 6).
double autocorrelation_time(const std::vector<double>& trace);

// Histogram counts over [lo, hi) with uniform bins; out-of-range values are
// clamped into the edge bins.
std::vector<double> histogram_density(const std::vector<double>& sample,
                                      double lo, double hi, std::size_t bins);

}  // namespace procalab
