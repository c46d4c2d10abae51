#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace scatlab {

struct ScalarSearch {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t grid_points = 9;
  // Golden-section stops once the bracket is narrower than rel_tol * (hi - lo).
  double rel_tol = 1e-4;
  int starts = 3;
};

struct ScalarMinimum {
  double x = 0.0;
  double f = 0.0;
  std::vector<std::pair<double, double>> trace;
  std::vector<std::string> warnings;
};

// Coarse grid, then golden-section refinement around up to `starts` local
// minima of the grid. Non-finite objective values count as +infinity.
ScalarMinimum minimize_scalar(const std::function<double(double)>& f, const ScalarSearch& search);

}  // namespace scatlab
