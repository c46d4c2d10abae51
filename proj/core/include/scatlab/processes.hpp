#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "scatlab/signal.hpp"

namespace scatlab {

enum class Family { kPoisson, kFbm, kLevyStable, kMrmCascade, kMrmStationary, kMrw };

Family parse_family(const std::string& tag);
std::string to_string(Family f);

// theta is the intensity for poisson, H for fbm, alpha for levy_stable and
// lambda^2 for the multifractal families. The multifractal families also
// use the integral scale 2^L.
//
// Series produced: counting path (poisson), levels (fbm, levy_stable, mrw),
// and the density dM/dt of the measure (mrm_cascade, mrm_stationary).
struct ProcessSpec {
  Family family = Family::kFbm;
  double theta = 0.5;
  int integral_scale_log2 = 10;
  std::size_t length = 1024;
  std::uint64_t seed = 0;
  std::size_t n_realizations = 1;

  void validate() const;
};

struct SimulatedEnsemble {
  TimeSeries series;
  ProcessSpec spec;
  std::vector<std::uint64_t> rng_trace;
};

// Key of the random substream used by realization `index`.
std::uint64_t substream_key(std::uint64_t seed, std::uint64_t index);

SimulatedEnsemble simulate(const ProcessSpec& spec);

// Scaling exponent zeta(q) of the family.
double zeta(Family family, double theta, double q);
inline double zeta(const ProcessSpec& spec, double q) { return zeta(spec.family, spec.theta, q); }

// Stationary Gaussian sequences by circulant embedding. The embedding
// length starts at the next power of two >= max(2 * length, min_embedding)
// and is doubled up to twice if some eigenvalue is negative.
class CirculantGaussian {
 public:
  CirculantGaussian(const std::function<double(std::size_t)>& covariance, std::size_t length,
                    std::size_t min_embedding = 0);

  void sample(std::mt19937_64& rng, double* out) const;
  std::size_t length() const { return length_; }
  std::size_t embedding() const { return sqrt_eig_.size(); }

 private:
  std::size_t length_;
  std::vector<double> sqrt_eig_;
};

}  // namespace scatlab
