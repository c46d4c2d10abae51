#include "scatlab/analysis.hpp"

#include <cmath>
#include <json.hpp>
#include <set>

#include "scatlab/error.hpp"
#include "scatlab/stats.hpp"

namespace scatlab {

SlopeFit fit_log2_slope(const std::map<int, double>& curve, int lo, int hi) {
  std::vector<double> xs, ys;
  for (auto it = curve.lower_bound(lo); it != curve.end() && it->first <= hi; ++it) {
    if (!(it->second > 0.0)) {
      throw InvalidArgument("nonpositive value at index " + std::to_string(it->first));
    }
    xs.push_back(it->first);
    ys.push_back(std::log2(it->second));
  }
  if (xs.size() < 3) throw InvalidArgument("slope fit needs at least 3 points");
  const LinearFit f = ols(xs, ys);
  return {f.slope, f.intercept, f.slope_stderr, lo, hi};
}

StationarityReport stationarity_across_scales(const NormalizedScattering& ns, int l_lo, int l_hi,
                                              double threshold) {
  StationarityReport rep;
  rep.threshold = threshold;
  std::map<int, std::vector<double>> by_l;
  for (const auto& [k, v] : ns.order2_norm) {
    const int l = k.second - k.first;
    if (l < l_lo || l > l_hi || !(v > 0.0)) continue;
    by_l[l].push_back(std::log2(v));
  }
  for (const auto& [l, vals] : by_l) {
    if (vals.size() < 2) continue;
    auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
    rep.spread[l] = *mx - *mn;
  }
  if (rep.spread.empty()) throw InvalidArgument("no lag with at least two distinct j1 in range");
  rep.pass = true;
  for (const auto& [l, s] : rep.spread) rep.pass = rep.pass && s < threshold;
  return rep;
}

IntermittencyReport intermittency_summary(const NormalizedScattering& ns, int l_min) {
  IntermittencyReport rep;
  std::map<int, std::vector<double>> by_l;
  for (const auto& [k, v] : ns.order2_norm) {
    rep.energy[k.first] += v * v;
    if (v > 0.0) by_l[k.second - k.first].push_back(std::log2(v));
  }
  for (const auto& [l, vals] : by_l) rep.tail_curve[l] = mean(vals);
  std::vector<double> xs, ys;
  for (const auto& [l, v] : rep.tail_curve) {
    if (l >= l_min) {
      xs.push_back(l);
      ys.push_back(v);
    }
  }
  if (xs.size() >= 2) {
    const LinearFit f = ols(xs, ys);
    rep.tail_slope = f.slope;
    rep.tail_level = mean(ys);
  } else if (!rep.tail_curve.empty()) {
    // Too few lags in the tail: fall back to the whole curve.
    xs.clear();
    ys.clear();
    for (const auto& [l, v] : rep.tail_curve) {
      xs.push_back(l);
      ys.push_back(v);
    }
    rep.tail_level = mean(ys);
    rep.tail_slope = xs.size() >= 2 ? ols(xs, ys).slope : 0.0;
  }
  if (rep.tail_slope < -0.4) rep.label = "gaussian-like";
  else if (rep.tail_slope > -0.1) rep.label = "highly intermittent";
  else rep.label = "intermediate";
  return rep;
}

std::string to_json(const SlopeFit& f) {
  nlohmann::json j = {{"slope", f.slope}, {"intercept", f.intercept}, {"stderr", f.std_error},
                      {"range", {f.lo, f.hi}}};
  return j.dump(2);
}

std::string to_json(const StationarityReport& r) {
  nlohmann::json sp = nlohmann::json::object();
  for (const auto& [l, s] : r.spread) sp[std::to_string(l)] = s;
  nlohmann::json j = {{"spread", sp}, {"threshold", r.threshold}, {"pass", r.pass}};
  return j.dump(2);
}

std::string to_json(const IntermittencyReport& r) {
  nlohmann::json curve = nlohmann::json::object(), energy = nlohmann::json::object();
  for (const auto& [l, v] : r.tail_curve) curve[std::to_string(l)] = v;
  for (const auto& [j1, v] : r.energy) energy[std::to_string(j1)] = v;
  nlohmann::json j = {{"tail_curve", curve}, {"tail_level", r.tail_level}, {"tail_slope", r.tail_slope},
                      {"energy", energy}, {"label", r.label}};
  return j.dump(2);
}

}  // namespace scatlab
