#pragma once

#include <map>
#include <string>

#include "scatlab/scattering.hpp"

namespace scatlab {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  int lo = 0;
  int hi = 0;
};

// OLS of log2 curve[j] on j for j in [lo, hi].
SlopeFit fit_log2_slope(const std::map<int, double>& curve, int lo, int hi);

struct StationarityReport {
  std::map<int, double> spread;  // per l: max - min over j1 of log2 S(j1, j1 + l)
  double threshold = 0.3;
  bool pass = false;
};

StationarityReport stationarity_across_scales(const NormalizedScattering& ns, int l_lo, int l_hi,
                                              double threshold = 0.3);

struct IntermittencyReport {
  std::map<int, double> tail_curve;  // l -> mean over j1 of log2 S(j1, j1 + l)
  double tail_level = 0.0;
  double tail_slope = 0.0;
  std::map<int, double> energy;  // j1 -> sum over j2 of S(j1, j2)^2
  std::string label;
};

// Tail fitted over l >= l_min.
IntermittencyReport intermittency_summary(const NormalizedScattering& ns, int l_min = 3);

std::string to_json(const SlopeFit& f);
std::string to_json(const StationarityReport& r);
std::string to_json(const IntermittencyReport& r);

}  // namespace scatlab
