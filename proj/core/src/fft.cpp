#include "scatlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>

namespace scatlab {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// Plans live for the whole process; FFTW planning is not thread-safe.
const PlanPair& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  fftw_complex* buf = fftw_alloc_complex(n);
  PlanPair p;
  const int ni = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_1d(ni, buf, buf, FFTW_FORWARD, flags);
  p.inverse = fftw_plan_dft_1d(ni, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  return cache.emplace(n, p).first->second;
}

}  // namespace

void fft_forward(cplx* data, std::size_t n) {
  if (n < 2) return;
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_for(n).forward, p, p);
}

void fft_inverse(cplx* data, std::size_t n) {
  if (n < 2) return;
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_for(n).inverse, p, p);
  const double s = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) data[i] *= s;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double bin_frequency(std::size_t k, std::size_t n) {
  const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  return 2 * k > n ? w - 2.0 * std::numbers::pi : w;
}

}  // namespace scatlab
