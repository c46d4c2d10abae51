#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scatlab/optimize.hpp"
#include "scatlab/processes.hpp"
#include "scatlab/scattering.hpp"
#include "scatlab/stats.hpp"
#include "scatlab/wavelet.hpp"

namespace scatlab {

// Raw moments, or ratios to their parent moment (the first-order reference
// entry is dropped since it is identically 1).
enum class MomentKind { kRaw, kNormalized };

std::vector<double> moment_vector(const ScatteringVector& sv, MomentKind kind);

struct MomentCondition {
  ScatteringVector data_moments;
  std::vector<ScatteringVector> per_block;
  // theta is ignored; length is the length of each simulated realization.
  ProcessSpec model;
  // n' simulated realizations per theta; 0 means 16 x data blocks.
  std::size_t n_sim = 0;
  std::uint64_t sim_seed = 0;
  std::shared_ptr<const FilterBank> bank;
  MomentKind kind = MomentKind::kRaw;
  // False when per-block vectors are correlated windows of one series.
  bool independent_blocks = true;

  std::size_t simulations() const;
  void validate() const;
};

// Builds a condition from data and a filter bank; per-block vectors are the
// block means (n_blocks >= 2) or windows every delta * 2^M samples.
MomentCondition make_moment_condition(const TimeSeries& data, std::shared_ptr<const FilterBank> bank, int J0,
                                      int J, const ProcessSpec& model, std::optional<std::size_t> delta,
                                      MomentKind kind = MomentKind::kRaw);

struct SimulatedMoments {
  std::vector<double> mean;
  // Monte-Carlo standard error of each entry of `mean`.
  std::vector<double> std_error;
};

// Simulated moments with common random numbers (fixed sim_seed), memoized
// per theta. Thread-safe.
class MomentSimulator {
 public:
  explicit MomentSimulator(const MomentCondition& mc);
  const SimulatedMoments& at(double theta);
  std::size_t evaluations() const { return cache_.size(); }

 private:
  const MomentCondition& mc_;
  std::mutex mutex_;
  std::map<double, SimulatedMoments> cache_;
};

struct WeightMatrix {
  Eigen::MatrixXd W;
  double condition = 0.0;
  bool regularized = false;
};

WeightMatrix empirical_weight(const MomentCondition& mc, double theta);
WeightMatrix empirical_weight(const MomentCondition& mc, const std::vector<double>& model_mean);

struct GmmFit {
  double theta_hat = 0.0;
  double theta_one_step = 0.0;
  Eigen::MatrixXd weight_matrix;
  double chi2_red = 0.0;
  int dof = 0;
  std::optional<double> p_value;
  std::vector<std::pair<double, double>> objective_trace;
  bool regularized = false;
  // Largest |MC standard error / simulated moment| at theta_hat.
  double mc_relative_error = 0.0;
  std::size_t n_blocks = 0;
  std::size_t n_moments = 0;
  std::vector<std::string> warnings;
};

// argmin_theta m(theta) W m(theta)^T over the search interval.
ScalarMinimum gmm_minimize(const MomentCondition& mc, MomentSimulator& sim, const Eigen::MatrixXd& W,
                           const ScalarSearch& search);

double gmm_one_step(const MomentCondition& mc, const ScalarSearch& search);

GmmFit gmm_two_step(const MomentCondition& mc, const ScalarSearch& search);

// Identity weighting throughout; chi2_red uses the empirical weight at
// theta_hat but the p-value is always omitted.
GmmFit gmm_identity(const MomentCondition& mc, const ScalarSearch& search);

struct RegressionEstimate {
  double value = 0.0;  // lambda^2
  double slope = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
  std::size_t dropped = 0;
};

// Slope of log2 E|X*psi_j|^2 - 2 log2 E|X*psi_j| against j is -lambda^2.
RegressionEstimate wavelet_moment_regression(const TimeSeries& ts, const FilterBank& bank, int j_lo, int j_hi);

// Regression of Cov(log|X*psi_j(t)|, log|X*psi_j(t+l)|) on -ln(l) over
// geometrically spaced lags in [lag_lo, lag_hi]; the slope is lambda^2.
RegressionEstimate log_covariance_regression(const TimeSeries& ts, const FilterBank& bank, int j,
                                             std::size_t lag_lo, std::size_t lag_hi);

struct AlphaEstimate {
  double alpha = 0.0;
  double inverse_alpha = 0.0;
  double order1_slope = 0.0;
  double order2_slope = 0.0;
};

// Joint least squares of log2 S(j1) ~ j1 / alpha and
// log2 S(j1, j1 + l) ~ (1 / alpha - 1) l for l >= delta.
AlphaEstimate scattering_slope_regression(const NormalizedScattering& ns, int delta = 3);

}  // namespace scatlab
