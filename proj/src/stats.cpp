#include "procalab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace procalab {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate x values");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = f.slope * x[i] + f.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.n = x.size();
  return f;
}

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  return fit_line(lx, ly);
}

double ks_statistic(std::vector<double> sample, const std::vector<double>& cdf_x,
                    const std::vector<double>& cdf_y) {
  if (sample.empty() || cdf_x.size() != cdf_y.size() || cdf_x.empty())
    throw std::invalid_argument("ks_statistic: empty inputs");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    // CDF value at sample[i] by linear interpolation of the table.
    auto it = std::lower_bound(cdf_x.begin(), cdf_x.end(), sample[i]);
    double F;
    if (it == cdf_x.begin()) {
      F = cdf_y.front();
    } else if (it == cdf_x.end()) {
      F = cdf_y.back();
    } else {
      const std::size_t j = static_cast<std::size_t>(it - cdf_x.begin());
      const double t = (sample[i] - cdf_x[j - 1]) / (cdf_x[j] - cdf_x[j - 1]);
      F = cdf_y[j - 1] + t * (cdf_y[j] - cdf_y[j - 1]);
    }
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    stat = std::max(stat, std::max(std::abs(F - lo), std::abs(hi - F)));
  }
  return stat;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double stat = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    stat = std::max(stat, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(j) / nb));
  }
  return stat;
}

double ks_two_sample_pvalue(double stat, std::size_t n1, std::size_t n2) {
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                    static_cast<double>(n1 + n2);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * stat;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term =
        2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double autocorrelation_time(const std::vector<double>& trace) {
  const std::size_t n = trace.size();
  if (n < 16) return 1.0;
  const double m = mean(trace);
  std::vector<double> c(n / 2, 0.0);
  for (std::size_t lag = 0; lag < c.size(); ++lag) {
    double s = 0;
    for (std::size_t i = 0; i + lag < n; ++i)
      s += (trace[i] - m) * (trace[i + lag] - m);
    c[lag] = s / static_cast<double>(n - lag);
  }
  if (c[0] <= 0) return 1.0;
  double tau = 0.5;
  for (std::size_t lag = 1; lag < c.size(); ++lag) {
    tau += c[lag] / c[0];
    if (static_cast<double>(lag) >= 6.0 * (2.0 * tau)) break;  // Sokal window
  }
  return std::max(2.0 * tau, 1.0);
}

std::vector<double> histogram_density(const std::vector<double>& sample,
                                      double lo, double hi, std::size_t bins) {
  std::vector<double> h(bins, 0.0);
  if (sample.empty() || !(hi > lo) || bins == 0) return h;
  const double w = (hi - lo) / static_cast<double>(bins);
  for (double x : sample) {
    auto b = static_cast<long>((x - lo) / w);
    b = std::clamp<long>(b, 0, static_cast<long>(bins) - 1);
    h[static_cast<std::size_t>(b)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(sample.size()) * w);
  for (double& v : h) v *= norm;
  return h;
}

}  // namespace procalab
