#pragma once

#include <functional>
#include <span>
#include <vector>

namespace levymix {

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
  long n = 0;
};

MeanSE mean_se(std::span<const double> xs);

std::vector<double> sorted_copy(std::span<const double> xs);

// Type-7 quantile (linear interpolation) on pre-sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

// Asymptotic standard error of the empirical p-quantile; the sampling density
// is estimated from the central quantile difference over a probability
// window of half-width h.
double quantile_se(std::span<const double> sorted, double p, double h = 0.01);

struct KSResult {
  double statistic = 0.0;  // sup-distance
  double p_value = 0.0;
  long n1 = 0, n2 = 0;
};

KSResult ks_one_sample(std::span<const double> sorted, const std::function<double(double)>& cdf);
KSResult ks_two_sample(std::span<const double> sorted1, std::span<const double> sorted2);

// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r_squared = 0.0;
  long n = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Regularized upper incomplete gamma Q(l, x) for integer l >= 1
// (tail of a Gamma(l, 1) variable).
double gamma_upper_regularized(int l, double x);

}  // namespace levymix
