#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace scatlab {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

// In-place complex transforms backed by FFTW. Plans are cached per length;
// execution is thread-safe. The inverse is scaled by 1/n.
void fft_forward(cplx* data, std::size_t n);
void fft_inverse(cplx* data, std::size_t n);

inline void fft_forward(CVec& v) { fft_forward(v.data(), v.size()); }
inline void fft_inverse(CVec& v) { fft_inverse(v.data(), v.size()); }

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

// Angular frequency of bin k for a length-n DFT, in (-pi, pi].
double bin_frequency(std::size_t k, std::size_t n);

}  // namespace scatlab
