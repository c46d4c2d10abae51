#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "scatlab/error.hpp"
#include "scatlab/wavelet.hpp"
#include "support.hpp"

using namespace scatlab;
namespace ts = testing_support;

namespace {

std::vector<double> gaussian_walk(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) x[i] = x[i - 1] + g(rng);
  return x;
}

// Kernel from the stored response by a direct inverse DFT over its support.
std::vector<ts::cplx> oracle_kernel(const FilterBank& bank, int j) {
  const FilterResponse& f = bank.psi(j);
  const std::size_t n = bank.n_fft;
  std::vector<ts::cplx> twiddle(n), k(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    twiddle[m] = {std::cos(a), std::sin(a)};
  }
  for (std::size_t t = 0; t < n; ++t) {
    ts::cplx acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * twiddle[(f.offset + i) * t % n];
    k[t] = acc / static_cast<double>(n);
  }
  return k;
}

}  // namespace

TEST(FilterBank, CertificatePasses) {
  for (std::size_t n : {std::size_t{1} << 12, std::size_t{1} << 16}) {
    const FilterBank bank = build_filter_bank(n, 1, 8);
    const BankCertificate c = certify(bank);
    EXPECT_LT(c.lp_defect, 0.05);
    EXPECT_TRUE(c.phi.ok);
    EXPECT_GT(c.phi.margin, 0.0);
    for (double m : c.moments) EXPECT_LT(m, 1e-6);
    EXPECT_LT(c.analyticity_ratio, 0.05);
    EXPECT_TRUE(c.ok());
  }
}

TEST(FilterBank, AllpassPhiFailsDomination) {
  const FilterBank bank = with_allpass_phi(build_filter_bank(4096, 1, 8));
  const PhiReport r = verify_phi(bank);
  EXPECT_FALSE(r.ok);
  EXPECT_LT(r.margin, 0.0);
  EXPECT_FALSE(certify(bank).ok());
}

TEST(FilterBank, LittlewoodPaleyByDirectSum) {
  const FilterBank bank = build_filter_bank(4096, 1, 8);
  const LittlewoodPaleyReport rep = verify_littlewood_paley(bank);
  // Recompute the worst deviation over covered octaves from the raw responses.
  double worst = 0.0;
  for (const auto& oct : rep.per_octave) {
    if (!oct.covered) continue;
    for (std::size_t k = 1; k <= bank.n_fft / 2; ++k) {
      const double w = bin_frequency(k, bank.n_fft);
      if (!(w > std::numbers::pi * std::exp2(-(oct.octave + 1)) && w <= std::numbers::pi * std::exp2(-oct.octave)))
        continue;
      double s = 0.0;
      for (const auto& [j, f] : bank.psi_hat) {
        s += std::norm(f.at(k)) + std::norm(f.at(bank.n_fft - k));
      }
      worst = std::max(worst, std::abs(s - 2.0));
    }
  }
  EXPECT_NEAR(rep.max_deviation, worst, 1e-9);
  EXPECT_LT(worst, 0.05);
}

TEST(FilterBank, RejectsBadShapes) {
  EXPECT_THROW(build_filter_bank(1000, 1, 5), InvalidArgument);
  EXPECT_THROW(build_filter_bank(256, 1, 7), InvalidArgument);
  EXPECT_THROW(build_filter_bank(4096, 0, 5), InvalidArgument);
  EXPECT_THROW(build_filter_bank(4096, 6, 5), InvalidArgument);
  EXPECT_THROW(parse_wavelet_family("morlet9"), InvalidArgument);
  EXPECT_EQ(parse_wavelet_family(to_string(WaveletFamily::kLogGabor)), WaveletFamily::kLogGabor);
}

TEST(FilterBank, KernelMatchesDirectInverse) {
  const FilterBank bank = build_filter_bank(512, 1, 6);
  for (int j = 1; j <= 6; ++j) {
    const CVec k = bank.kernel(j);
    const auto ref = oracle_kernel(bank, j);
    for (std::size_t t = 0; t < k.size(); ++t) EXPECT_LT(std::abs(k[t] - ref[t]), 1e-12);
  }
}

TEST(FilterBank, MarginsHoldTheStatedTailMass) {
  const FilterBank bank = build_filter_bank(1 << 13, 1, 10);
  for (int j = 1; j <= 9; ++j) {
    const auto k = oracle_kernel(bank, j);
    const std::size_t n = k.size(), m = bank.margin_at(j);
    ASSERT_LT(2 * m, n);
    double total = 0.0, outside = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t d = std::min(t, n - t);
      total += std::abs(k[t]);
      if (d > m) outside += std::abs(k[t]);
    }
    EXPECT_LE(outside / total, bank.margin_tail * 1.05) << "j=" << j;
  }
  // Margins widen with scale beyond the finest octave.
  for (int j = 3; j <= 9; ++j) EXPECT_GT(bank.margin_at(j), bank.margin_at(j - 1));
}

TEST(FilterBank, PrimitiveL1MatchesRunningSum) {
  const FilterBank bank = build_filter_bank(2048, 1, 7);
  for (int j : {2, 4, 6}) {
    const auto k = oracle_kernel(bank, j);
    const std::size_t n = k.size();
    ts::cplx run = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      run += k[(i + n / 2) % n];
      l1 += std::abs(run);
    }
    EXPECT_NEAR(bank.primitive_l1(j), l1, 1e-9 * l1);
    // The primitive of a dilated wavelet scales like 2^j in l1.
    EXPECT_GT(l1, 0.0);
  }
  EXPECT_NEAR(bank.primitive_l1(5) / bank.primitive_l1(4), 2.0, 0.05);
}

TEST(FilterBank, JsonRoundTrip) {
  const FilterBank bank = build_filter_bank(1024, 1, 7);
  const FilterBank back = bank_from_json(bank_to_json(bank));
  EXPECT_EQ(back.n_fft, bank.n_fft);
  EXPECT_EQ(back.M, bank.M);
  EXPECT_EQ(back.margin, bank.margin);
  EXPECT_EQ(back.phi_margin, bank.phi_margin);
  for (const auto& [j, f] : bank.psi_hat) {
    EXPECT_EQ(back.psi(j).offset, f.offset);
    EXPECT_EQ(back.psi(j).values, f.values);
  }
  EXPECT_EQ(back.phi_hat, bank.phi_hat);
  EXPECT_THROW(bank_from_json("{\"n_fft\": 4}"), InvalidArgument);
}

TEST(Transform, MatchesTimeDomainConvolution) {
  const std::size_t n = 256;
  const FilterBank bank = build_filter_bank(n, 1, 6);
  const auto x = gaussian_walk(n, 7);
  const auto padded = ts::detrend_pad(x, n);
  for (int j = 1; j <= 6; ++j) {
    const auto ref = ts::circular_convolve(padded, oracle_kernel(bank, j));
    CVec in(padded.begin(), padded.end());
    const CVec got = convolve_periodic(in, bank, j);
    double worst = 0.0;
    for (std::size_t t = 0; t < n; ++t) worst = std::max(worst, std::abs(got[t] - ref[t]));
    EXPECT_LT(worst, 1e-10) << "j=" << j;
  }
  // Whole-series path: only scales whose margin fits the block.
  const WaveletCoeffs wc = transform(TimeSeries::single(x), bank, 1, 1);
  const auto ref = ts::circular_convolve(padded, oracle_kernel(bank, 1));
  for (std::size_t t = 0; t < n; ++t) EXPECT_LT(std::abs(wc.by_scale.at(1)[t] - ref[t]), 1e-10);
}

TEST(Transform, BlocksAreIndependent) {
  const FilterBank bank = build_filter_bank(1024, 1, 5);
  const auto a = gaussian_walk(600, 1), b = gaussian_walk(600, 2);
  std::vector<double> both(a);
  both.insert(both.end(), b.begin(), b.end());
  const WaveletCoeffs wc = transform(TimeSeries::blocks(both, 2), bank, 2, 4);
  const WaveletCoeffs wb = transform(TimeSeries::single(b), bank, 2, 4);
  for (int j = 2; j <= 4; ++j) {
    for (std::size_t t = 0; t < 600; ++t) EXPECT_EQ(wc.by_scale.at(j)[600 + t], wb.by_scale.at(j)[t]);
    EXPECT_FALSE(wc.valid(j, 600));
    EXPECT_TRUE(wc.valid(j, 900));
  }
}

TEST(Transform, Contracts) {
  const FilterBank bank = build_filter_bank(256, 1, 5);
  EXPECT_THROW(transform(TimeSeries::single(gaussian_walk(300, 1)), bank), InvalidArgument);
  EXPECT_THROW(transform(TimeSeries::single(gaussian_walk(64, 1)), bank, 1, 5), InvalidArgument);
  EXPECT_THROW(transform(TimeSeries::single(gaussian_walk(200, 1)), bank, 3, 2), InvalidArgument);
  EXPECT_THROW(bank.psi(9), InvalidArgument);
  EXPECT_THROW(convolve_periodic(CVec(100), bank, 2), InvalidArgument);
}

TEST(PrepareBlock, DetrendsThroughEndpoints) {
  const std::vector<double> x{3.0, 5.0, 4.0, 9.0};
  const CVec p = prepare_block(x, 8);
  const auto ref = ts::detrend_pad(x, 8);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(std::abs(p[i] - ref[i]), 0.0, 1e-15);
  EXPECT_THROW(prepare_block(x, 2), InvalidArgument);
}

TEST(FractionalDerivative, IdentityAndFirstDerivative) {
  const std::size_t L = 512;
  std::vector<double> x(L);
  const double w = 2.0 * std::numbers::pi * 5.0 / static_cast<double>(L);
  for (std::size_t t = 0; t < L; ++t) x[t] = std::sin(w * static_cast<double>(t));
  const TimeSeries s = TimeSeries::single(x);
  EXPECT_EQ(fractional_derivative(s, 0.0).samples, x);
  const TimeSeries d = fractional_derivative(s, 1.0);
  for (std::size_t t = 0; t < L; ++t) EXPECT_NEAR(d.samples[t], w * std::cos(w * static_cast<double>(t)), 1e-12);
  // Order 2 is the ordinary second derivative.
  const TimeSeries d2 = fractional_derivative(s, 2.0);
  for (std::size_t t = 0; t < L; ++t) EXPECT_NEAR(d2.samples[t], -w * w * x[t], 1e-12);
  EXPECT_THROW(fractional_derivative(s, 2.5), InvalidArgument);
}

TEST(DerivativeBank, MultipliesByScaledFrequencyPower) {
  const FilterBank bank = build_filter_bank(1024, 1, 6);
  const FilterBank d = derivative_bank(bank, 0.5);
  for (int j : {2, 5}) {
    const auto& f = bank.psi(j);
    const auto& g = d.psi(j);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const double w = bin_frequency(f.offset + i, 1024);
      if (w <= 0.0) continue;
      const ts::cplx factor = std::pow(std::exp2(j) * w, 0.5) * std::polar(1.0, std::numbers::pi / 4.0);
      EXPECT_LT(std::abs(g.values[i] - f.values[i] * factor), 1e-12);
    }
  }
  EXPECT_EQ(d.phi_hat, bank.phi_hat);
}
