#include "levymix/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levymix {

MeanSE mean_se(std::span<const double> xs) {
  MeanSE out;
  out.n = static_cast<long>(xs.size());
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - out.mean;
    ss += d * d;
  }
  out.se = std::sqrt(ss / (static_cast<double>(out.n) * static_cast<double>(out.n - 1)));
  return out;
}

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  return v;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  const long n = static_cast<long>(sorted.size());
  if (n == 0) throw std::invalid_argument("quantile_sorted: empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double idx = p * static_cast<double>(n - 1);
  const long lo = static_cast<long>(idx);
  const double w = idx - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted.back();
  return sorted[lo] * (1.0 - w) + sorted[lo + 1] * w;
}

double quantile_se(std::span<const double> sorted, double p, double h) {
  const long n = static_cast<long>(sorted.size());
  if (n < 16) throw std::invalid_argument("quantile_se: sample too small");
  const double plo = std::max(1.0 / static_cast<double>(n), p - h);
  const double phi = std::min(1.0 - 1.0 / static_cast<double>(n), p + h);
  const double dq = quantile_sorted(sorted, phi) - quantile_sorted(sorted, plo);
  const double slope = dq / (phi - plo);  // ~ 1/f(q_p)
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n)) * slope;
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KSResult ks_one_sample(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  KSResult out;
  const long n = static_cast<long>(sorted.size());
  out.n1 = n;
  if (n == 0) return out;
  double d = 0.0;
  for (long i = 0; i < n; ++i) {
    const double F = cdf(sorted[i]);
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
  }
  out.statistic = d;
  const double sn = std::sqrt(static_cast<double>(n));
  out.p_value = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
  return out;
}

KSResult ks_two_sample(std::span<const double> s1, std::span<const double> s2) {
  KSResult out;
  out.n1 = static_cast<long>(s1.size());
  out.n2 = static_cast<long>(s2.size());
  if (out.n1 == 0 || out.n2 == 0) return out;
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < s1.size() && j < s2.size()) {
    const double v = std::min(s1[i], s2[j]);
    while (i < s1.size() && s1[i] <= v) ++i;
    while (j < s2.size() && s2[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / out.n1 - static_cast<double>(j) / out.n2));
  }
  out.statistic = d;
  const double ne = static_cast<double>(out.n1) * out.n2 / static_cast<double>(out.n1 + out.n2);
  out.p_value = kolmogorov_sf(std::sqrt(ne) * d);
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit out;
  const long n = static_cast<long>(x.size());
  if (n != static_cast<long>(y.size())) throw std::invalid_argument("fit_line: size mismatch");
  out.n = n;
  if (n < 2) return out;
  double mx = 0.0, my = 0.0;
  for (long i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (long i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ssr = 0.0;
  for (long i = 0; i < n; ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    ssr += r * r;
  }
  out.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  if (n > 2) out.slope_se = std::sqrt(ssr / (n - 2) / sxx);
  return out;
}

double gamma_upper_regularized(int l, double x) {
  if (l < 1) throw std::invalid_argument("gamma_upper_regularized: l >= 1 required");
  if (x <= 0.0) return 1.0;
  // Q(l, x) = e^{-x} sum_{j<l} x^j / j!
  double term = 1.0, sum = 1.0;
  for (int j = 1; j < l; ++j) {
    term *= x / j;
    sum += term;
  }
  return std::exp(-x + std::log(sum));
}

}  // namespace levymix
