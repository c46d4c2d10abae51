#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scatlab/fft.hpp"
#include "scatlab/signal.hpp"

namespace scatlab {

enum class WaveletFamily {
  // Analytic log-Gabor mother, band-limited in frequency; the finest scale
  // absorbs the residual Littlewood-Paley energy up to Nyquist.
  kLogGabor,
};

WaveletFamily parse_wavelet_family(const std::string& tag);
std::string to_string(WaveletFamily f);

// Frequency response stored on a contiguous run of DFT bins
// [offset, offset + values.size()); zero elsewhere.
struct FilterResponse {
  std::size_t offset = 0;
  CVec values;

  cplx at(std::size_t bin) const {
    return bin >= offset && bin - offset < values.size() ? values[bin - offset] : cplx{};
  }
  CVec dense(std::size_t n) const;
};

struct FilterBank {
  WaveletFamily family = WaveletFamily::kLogGabor;
  std::size_t n_fft = 0;
  int j_min = 1;
  int M = 1;
  std::map<int, FilterResponse> psi_hat;
  CVec phi_hat;
  // Half-widths (samples) outside which the kernel carries less than
  // margin_tail of its l1 mass; used as edge exclusion zones.
  std::map<int, std::size_t> margin;
  std::size_t phi_margin = 0;
  double margin_tail = 1e-3;
  double lp_defect = 0.0;
  double analyticity_ratio = 0.0;

  const FilterResponse& psi(int j) const;
  bool has_scale(int j) const { return psi_hat.count(j) != 0; }
  std::size_t margin_at(int j) const;
  // Periodic time-domain kernel psi_j[t], t taken modulo n_fft.
  CVec kernel(int j) const;
  // l1 norm of the running sum of the kernel, centered at t = 0.
  double primitive_l1(int j) const;
};

FilterBank build_filter_bank(std::size_t n_fft, int j_min, int M,
                             WaveletFamily family = WaveletFamily::kLogGabor);

struct OctaveDeviation {
  int octave = 0;  // |w| in (pi 2^-(octave+1), pi 2^-octave]
  double max_deviation = 0.0;
  bool covered = false;
};

struct LittlewoodPaleyReport {
  double max_deviation = 0.0;
  std::vector<OctaveDeviation> per_octave;
};

LittlewoodPaleyReport verify_littlewood_paley(const FilterBank& bank);

struct PhiReport {
  bool ok = false;
  double margin = 0.0;
  std::size_t worst_bin = 0;
};

PhiReport verify_phi(const FilterBank& bank);

// Discrete moments sum_t (t / 2^j)^k psi_j[t] / ||psi_j||_1 for k = 0..3,
// evaluated on the mother wavelet at a mid scale.
std::array<double, 4> vanishing_moments(WaveletFamily family);

struct BankCertificate {
  double lp_defect = 0.0;
  bool lp_ok = false;
  PhiReport phi;
  std::array<double, 4> moments{};
  bool moments_ok = false;
  double analyticity_ratio = 0.0;
  bool analyticity_ok = false;
  bool ok() const { return lp_ok && phi.ok && moments_ok && analyticity_ok; }
};

BankCertificate certify(const FilterBank& bank);

// Copy of `bank` whose averaging window passes every frequency.
FilterBank with_allpass_phi(FilterBank bank);

// Responses multiplied by (i 2^j w)^alpha, the wavelets psi^alpha_j.
FilterBank derivative_bank(const FilterBank& bank, double alpha);

// JSON with responses as interleaved [re, im, re, im, ...] arrays.
std::string bank_to_json(const FilterBank& bank);
FilterBank bank_from_json(const std::string& text);

struct WaveletCoeffs {
  std::map<int, CVec> by_scale;  // concatenated blocks, same length as input
  std::size_t source_len = 0;
  std::size_t block_len = 0;
  int j_lo = 0;
  int j_hi = 0;
  std::map<int, std::size_t> margin;

  // False for samples within the edge margin of their block.
  bool valid(int j, std::size_t t) const;
};

WaveletCoeffs transform(const TimeSeries& ts, const FilterBank& bank);
WaveletCoeffs transform(const TimeSeries& ts, const FilterBank& bank, int j_lo, int j_hi);

// Removes the line through the first and last sample and zero-pads to n.
// Shared by every transform path so blocks become continuous when wrapped.
CVec prepare_block(std::span<const double> x, std::size_t n);

// Circular convolution of an n_fft-long sequence with psi_j, via the FFT.
CVec convolve_periodic(const CVec& x, const FilterBank& bank, int j);

TimeSeries fractional_derivative(const TimeSeries& ts, double alpha);

}  // namespace scatlab
