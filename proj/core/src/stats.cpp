#include "scatlab/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "scatlab/error.hpp"

namespace scatlab {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

double mean(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("mean of empty range");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.size() < 2) throw InvalidArgument("variance needs at least 2 values");
  const double m = mean(v);
  std::vector<double> d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d[i] = (v[i] - m) * (v[i] - m);
  return pairwise_sum(d) / static_cast<double>(v.size() - 1);
}

LinearFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("ols: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("ols: need at least 2 points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("ols: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

double chi2_survival(double x, int k) {
  if (k <= 0) throw InvalidArgument("chi2_survival: dof must be positive");
  if (std::isnan(x)) throw InvalidArgument("chi2_survival: x is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * k, 0.5 * x);
}

}  // namespace scatlab
