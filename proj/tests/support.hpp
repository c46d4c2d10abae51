#pragma once

// Test-side oracles. Nothing here calls the library's FFT or statistics code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using cplx = std::complex<double>;

// y[t] = sum_s k[(t - s) mod n] x[s], O(n^2).
inline std::vector<cplx> circular_convolve(const std::vector<cplx>& x, const std::vector<cplx>& k) {
  const std::size_t n = x.size();
  std::vector<cplx> y(n);
  for (std::size_t t = 0; t < n; ++t) {
    cplx acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) acc += k[(t + n - s) % n] * x[s];
    y[t] = acc;
  }
  return y;
}

// Direct DFT with the e^{-i w t} convention.
inline std::vector<cplx> dft(const std::vector<cplx>& x) {
  const std::size_t n = x.size();
  std::vector<cplx> X(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      acc += x[t] * cplx(std::cos(a), std::sin(a));
    }
    X[k] = acc;
  }
  return X;
}

inline std::vector<cplx> idft(const std::vector<cplx>& X) {
  const std::size_t n = X.size();
  std::vector<cplx> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      acc += X[k] * cplx(std::cos(a), std::sin(a));
    }
    x[t] = acc / static_cast<double>(n);
  }
  return x;
}

// Line through the endpoints removed, then zero padding to n.
inline std::vector<cplx> detrend_pad(const std::vector<double>& x, std::size_t n) {
  std::vector<cplx> out(n);
  const double a = x.front(), b = x.back();
  const double len = static_cast<double>(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - (a + (b - a) * static_cast<double>(i) / len);
  return out;
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double plain_mean(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

// Least-squares slope of y on x, computed from centered sums.
inline double plain_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = plain_mean(x), my = plain_mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// One-sample Kolmogorov-Smirnov statistic against a continuous cdf.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double t = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
  }
  return std::clamp(p, 0.0, 1.0);
}

// Chi-squared cdf by Simpson quadrature of the density (k >= 2).
inline double chi2_cdf_quadrature(double x, int k) {
  if (x <= 0.0) return 0.0;
  const double half = 0.5 * k;
  const double logc = -half * std::log(2.0) - std::lgamma(half);
  auto pdf = [&](double u) { return u <= 0.0 ? (k == 2 ? 0.5 : 0.0) : std::exp(logc + (half - 1.0) * std::log(u) - 0.5 * u); };
  return simpson(pdf, 0.0, x, 20000);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("scatlab_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing_support
