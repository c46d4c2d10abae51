#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scatlab {

// Pairwise (tree) summation; fixed order independent of threading.
double pairwise_sum(std::span<const double> v);
double mean(std::span<const double> v);
// Unbiased (n-1) sample variance.
double variance(std::span<const double> v);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
LinearFit ols(std::span<const double> x, std::span<const double> y);

// Upper regularized incomplete gamma Q(k/2, x/2).
double chi2_survival(double x, int k);

}  // namespace scatlab
