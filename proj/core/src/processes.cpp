#include "scatlab/processes.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "scatlab/error.hpp"
#include "scatlab/fft.hpp"
#include "scatlab/parallel.hpp"

namespace scatlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double fgn_covariance(double H, std::size_t k) {
  const double kk = static_cast<double>(k);
  const double h2 = 2.0 * H;
  return 0.5 * (std::pow(kk + 1.0, h2) + std::pow(std::abs(kk - 1.0), h2) - 2.0 * std::pow(kk, h2));
}

void cumulative_sum(std::vector<double>& x) {
  double s = 0.0;
  for (auto& v : x) {
    s += v;
    v = s;
  }
}

// Unit-scale symmetric alpha-stable variate (Chambers-Mallows-Stuck).
double stable_variate(double alpha, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  std::exponential_distribution<double> expo(1.0);
  const double v = uni(rng);
  const double w = expo(rng);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
}

// Log-normal dyadic cascade of 2^L cells with E[W] = 1.
void cascade(double lambda2, int L, std::mt19937_64& rng, double* out) {
  const double s = std::sqrt(lambda2 * std::numbers::ln2);
  const double m = -0.5 * lambda2 * std::numbers::ln2;
  const std::size_t n = std::size_t{1} << L;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> level{1.0}, next;
  for (int l = 1; l <= L; ++l) {
    next.resize(level.size() * 2);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = level[i / 2] * std::exp(m + s * normal(rng));
    level.swap(next);
  }
  std::copy(level.begin(), level.begin() + static_cast<long>(n), out);
}

// Second antiderivative of ln|x|.
double log_antiderivative2(double x) { return x == 0.0 ? 0.0 : 0.5 * x * x * std::log(std::abs(x)) - 0.75 * x * x; }

// Covariance of unit-cell averages of a field with covariance ln+(2^L/|t-s|),
// unit lambda. Equals L ln2 + 3/2 at lag 0 and L ln2 - ln(tau) + O(tau^-2).
double log_covariance(int L, std::size_t tau) {
  const double t = static_cast<double>(tau);
  const double cell_log =
      log_antiderivative2(t + 1.0) - 2.0 * log_antiderivative2(t) + log_antiderivative2(t - 1.0);
  const double v = static_cast<double>(L) * std::numbers::ln2 - cell_log;
  return v > 0.0 ? v : 0.0;
}

}  // namespace

Family parse_family(const std::string& tag) {
  if (tag == "poisson") return Family::kPoisson;
  if (tag == "fbm") return Family::kFbm;
  if (tag == "levy" || tag == "levy_stable") return Family::kLevyStable;
  if (tag == "mrm_cascade") return Family::kMrmCascade;
  if (tag == "mrm" || tag == "mrm_stationary") return Family::kMrmStationary;
  if (tag == "mrw") return Family::kMrw;
  throw InvalidArgument("unknown process family '" + tag + "'");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::kPoisson: return "poisson";
    case Family::kFbm: return "fbm";
    case Family::kLevyStable: return "levy_stable";
    case Family::kMrmCascade: return "mrm_cascade";
    case Family::kMrmStationary: return "mrm_stationary";
    case Family::kMrw: return "mrw";
  }
  return "unknown";
}

void ProcessSpec::validate() const {
  if (length < 2) throw InvalidArgument("length must be at least 2");
  if (n_realizations < 1) throw InvalidArgument("n_realizations must be positive");
  if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  switch (family) {
    case Family::kPoisson:
      if (!(theta > 0.0)) throw InvalidArgument("poisson intensity must be positive");
      break;
    case Family::kFbm:
      if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("fbm H must lie in (0,1)");
      break;
    case Family::kLevyStable:
      if (!(theta > 1.0 && theta <= 2.0)) throw InvalidArgument("levy alpha must lie in (1,2]");
      break;
    case Family::kMrmCascade:
    case Family::kMrmStationary:
    case Family::kMrw:
      if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("lambda^2 must lie in (0,1)");
      if (integral_scale_log2 < 1 || integral_scale_log2 > 40) {
        throw InvalidArgument("integral scale exponent L must lie in [1,40]");
      }
      break;
  }
}

std::uint64_t substream_key(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

CirculantGaussian::CirculantGaussian(const std::function<double(std::size_t)>& covariance, std::size_t length,
                                     std::size_t min_embedding)
    : length_(length) {
  std::size_t m = next_power_of_two(std::max(2 * length, min_embedding));
  for (int attempt = 0; attempt < 3; ++attempt, m *= 2) {
    CVec c(m);
    for (std::size_t k = 0; k < m; ++k) c[k] = covariance(std::min(k, m - k));
    fft_forward(c);
    double top = 0.0;
    for (const auto& e : c) top = std::max(top, e.real());
    bool ok = true;
    sqrt_eig_.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      double e = c[k].real();
      if (e < 0.0) {
        if (e < -1e-10 * top) {
          ok = false;
          break;
        }
        e = 0.0;
      }
      sqrt_eig_[k] = std::sqrt(e / static_cast<double>(m));
    }
    if (ok) return;
  }
  throw RuntimeError("circulant embedding is not nonnegative definite");
}

void CirculantGaussian::sample(std::mt19937_64& rng, double* out) const {
  const std::size_t m = sqrt_eig_.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  CVec z(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = normal(rng);
    const double b = normal(rng);
    z[k] = sqrt_eig_[k] * cplx{a, b};
  }
  fft_forward(z);
  for (std::size_t t = 0; t < length_; ++t) out[t] = z[t].real();
}

SimulatedEnsemble simulate(const ProcessSpec& spec) {
  spec.validate();
  const std::size_t n = spec.length;
  const std::size_t R = spec.n_realizations;
  SimulatedEnsemble ens;
  ens.spec = spec;
  ens.rng_trace.resize(R);
  for (std::size_t r = 0; r < R; ++r) ens.rng_trace[r] = substream_key(spec.seed, r);
  std::vector<double> data(n * R);

  std::unique_ptr<CirculantGaussian> field;
  if (spec.family == Family::kFbm) {
    const double H = spec.theta;
    field = std::make_unique<CirculantGaussian>([H](std::size_t k) { return fgn_covariance(H, k); }, n);
  } else if (spec.family == Family::kMrmStationary || spec.family == Family::kMrw) {
    const int L = spec.integral_scale_log2;
    // The covariance vanishes beyond 2^L; embedding at least twice that keeps
    // the circulant nonnegative definite.
    field = std::make_unique<CirculantGaussian>([L](std::size_t k) { return log_covariance(L, k); }, n,
                                                std::size_t{2} << L);
  }

  parallel_for(R, [&](std::size_t r) {
    std::mt19937_64 rng(ens.rng_trace[r]);
    double* out = data.data() + r * n;
    switch (spec.family) {
      case Family::kPoisson: {
        std::exponential_distribution<double> expo(spec.theta);
        double t = expo(rng);
        for (std::size_t i = 0; i < n; ++i) {
          double count = i ? out[i - 1] : 0.0;
          while (t <= static_cast<double>(i)) {
            count += 1.0;
            t += expo(rng);
          }
          out[i] = count;
        }
        break;
      }
      case Family::kFbm: {
        std::vector<double> x(n);
        field->sample(rng, x.data());
        cumulative_sum(x);
        std::copy(x.begin(), x.end(), out);
        break;
      }
      case Family::kLevyStable: {
        std::vector<double> x(n);
        for (auto& v : x) v = stable_variate(spec.theta, rng);
        cumulative_sum(x);
        std::copy(x.begin(), x.end(), out);
        break;
      }
      case Family::kMrmCascade: {
        const int L = spec.integral_scale_log2;
        const std::size_t cell = std::size_t{1} << L;
        std::vector<double> buf(cell);
        for (std::size_t start = 0; start < n; start += cell) {
          cascade(spec.theta, L, rng, buf.data());
          std::copy(buf.begin(), buf.begin() + static_cast<long>(std::min(cell, n - start)), out + start);
        }
        break;
      }
      case Family::kMrmStationary:
      case Family::kMrw: {
        std::vector<double> g(n);
        field->sample(rng, g.data());
        const double lambda = std::sqrt(spec.theta);
        const double shift = -0.5 * spec.theta * log_covariance(spec.integral_scale_log2, 0);
        for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(shift + lambda * g[i]);
        if (spec.family == Family::kMrw) {
          std::normal_distribution<double> normal(0.0, 1.0);
          double level = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            level += std::sqrt(out[i]) * normal(rng);
            out[i] = level;
          }
        }
        break;
      }
    }
  });
  ens.series = TimeSeries::blocks(std::move(data), R);
  return ens;
}

double zeta(Family family, double theta, double q) {
  if (!std::isfinite(q)) throw InvalidArgument("q must be finite");
  switch (family) {
    case Family::kFbm:
      return q * theta;
    case Family::kLevyStable:
      if (q >= theta) throw InvalidArgument("moment of order q >= alpha diverges");
      return q / theta;
    case Family::kMrmCascade:
    case Family::kMrmStationary:
      return (1.0 + theta / 2.0) * q - theta / 2.0 * q * q;
    case Family::kMrw: {
      // X = B(M(t)): zeta_X(q) = zeta_M(q / 2).
      const double h = q / 2.0;
      return (1.0 + theta / 2.0) * h - theta / 2.0 * h * h;
    }
    case Family::kPoisson:
      break;
  }
  throw InvalidArgument("family has no scaling exponent");
}

}  // namespace scatlab
