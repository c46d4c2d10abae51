#include "scatlab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scatlab/error.hpp"

namespace scatlab {

ScalarMinimum minimize_scalar(const std::function<double(double)>& f, const ScalarSearch& s) {
  if (!(s.lo < s.hi) || !std::isfinite(s.lo) || !std::isfinite(s.hi)) {
    throw InvalidArgument("search bounds must satisfy lo < hi");
  }
  if (s.grid_points < 3) throw InvalidArgument("grid needs at least 3 points");
  ScalarMinimum out;
  auto eval = [&](double x) {
    double v = f(x);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    out.trace.emplace_back(x, v);
    return v;
  };

  const std::size_t G = s.grid_points;
  std::vector<double> xs(G), fs(G);
  for (std::size_t i = 0; i < G; ++i) {
    xs[i] = s.lo + (s.hi - s.lo) * static_cast<double>(i) / static_cast<double>(G - 1);
    fs[i] = eval(xs[i]);
  }
  if (std::all_of(fs.begin(), fs.end(), [](double v) { return std::isinf(v); })) {
    throw RuntimeError("objective is not finite at any grid point");
  }

  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < G; ++i) {
    const bool left = i == 0 || fs[i] <= fs[i - 1];
    const bool right = i + 1 == G || fs[i] <= fs[i + 1];
    if (left && right && std::isfinite(fs[i])) minima.push_back(i);
  }
  std::stable_sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
  if (minima.size() > static_cast<std::size_t>(std::max(1, s.starts))) minima.resize(static_cast<std::size_t>(s.starts));

  const double tol = s.rel_tol * (s.hi - s.lo);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<std::pair<double, double>> results;
  for (std::size_t i : minima) {
    double a = xs[i == 0 ? 0 : i - 1];
    double b = xs[i + 1 == G ? G - 1 : i + 1];
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = eval(c), fd = eval(d);
    while (b - a > tol) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = eval(d);
      }
    }
    double best_x = xs[i], best_f = fs[i];
    if (fc < best_f) best_x = c, best_f = fc;
    if (fd < best_f) best_x = d, best_f = fd;
    results.emplace_back(best_x, best_f);
  }
  auto best = std::min_element(results.begin(), results.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
  out.x = best->first;
  out.f = best->second;
  for (const auto& r : results) {
    if (std::abs(r.first - out.x) > tol) {
      out.warnings.push_back("multi-start disagreement: local minimum near " + std::to_string(r.first) +
                             " vs " + std::to_string(out.x));
    }
  }
  return out;
}

}  // namespace scatlab
