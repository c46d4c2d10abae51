#include "scatlab/wavelet.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numbers>

#include "scatlab/error.hpp"

namespace scatlab {

namespace {

constexpr double kPi = std::numbers::pi;
// Bandwidth of the mother in octaves (standard deviation of log2 w).
constexpr double kSigma = 0.75;
// Width of the band below Nyquist where the finest filter leaks onto w < 0.
constexpr double kSplitWidth = kPi / 12.0;
// Roll-off of the dilated filters just below that band.
constexpr double kTaperWidth = kPi / 8.0;
// Gaussian frequency scale of phi, in mother units.
constexpr double kPhiWidth = kPi / 2.0;
// Responses below this fraction of their peak are stored as zero.
constexpr double kResponseFloor = 1e-16;

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double log_gabor(double w) {
  if (w <= 0.0) return 0.0;
  const double o = std::log2(w / kPi);
  return std::exp(-o * o / (2.0 * kSigma * kSigma));
}

// Gain making the smallest value of the continuous Littlewood-Paley sum 2,
// so that the ripple only ever adds energy.
double mother_gain() {
  static const double gain = [] {
    const int steps = 4000;
    double lowest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < steps; ++i) {
      const double u = static_cast<double>(i) / steps;
      double s = 0.0;
      for (int k = -40; k <= 40; ++k) {
        const double g = log_gabor(kPi * std::exp2(u + k));
        s += g * g;
      }
      lowest = std::min(lowest, s);
    }
    return std::sqrt(2.0 / lowest);
  }();
  return gain;
}

double mother(double w) { return mother_gain() * log_gabor(w); }

double taper(double aw) {
  return 1.0 - smooth_step((aw - (kPi - kSplitWidth - kTaperWidth)) / kTaperWidth);
}

double dilation_value(int j, double w) {
  if (w <= 0.0) return 0.0;
  return mother(std::exp2(j) * w) * taper(w);
}

// Finest filter: gathers the energy of all dilations j <= 1 at low
// frequency and completes the sum to 2 above its peak.
double finest_value(double w, double rest) {
  const double aw = std::abs(w);
  if (aw == 0.0) return 0.0;
  double fold = 0.0;
  for (int k = -6; k <= 1; ++k) {
    const double g = mother(std::exp2(k) * aw);
    fold += g * g;
  }
  const double xi = kPi / 2.0;
  const double c = smooth_step((aw - xi / std::sqrt(2.0)) / (xi - xi / std::sqrt(2.0)));
  const double level = (1.0 - c) * fold + c * std::max(0.0, 2.0 - rest);
  const double eps = kPi - aw;
  double energy;
  if (w > 0.0) {
    energy = eps < kSplitWidth ? level * (1.0 + smooth_step(eps / kSplitWidth)) / 2.0 : level;
  } else {
    energy = eps < kSplitWidth ? level * (1.0 - smooth_step(eps / kSplitWidth)) / 2.0 : 0.0;
  }
  return std::sqrt(energy);
}

std::vector<double> dense_response(int j, int M, std::size_t n) {
  std::vector<double> r(n, 0.0);
  if (j >= 2) {
    for (std::size_t k = 0; k < n; ++k) r[k] = dilation_value(j, bin_frequency(k, n));
    return r;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double w = bin_frequency(k, n);
    double rest = 0.0;
    for (int s = 2; s <= M; ++s) {
      const double g = dilation_value(s, std::abs(w));
      rest += g * g;
    }
    r[k] = finest_value(w, rest);
  }
  return r;
}

FilterResponse trim(const std::vector<double>& dense) {
  double peak = 0.0;
  for (double v : dense) peak = std::max(peak, std::abs(v));
  FilterResponse f;
  if (peak == 0.0) return f;
  const double floor = kResponseFloor * peak;
  std::size_t lo = 0, hi = dense.size();
  while (lo < hi && std::abs(dense[lo]) < floor) ++lo;
  while (hi > lo && std::abs(dense[hi - 1]) < floor) --hi;
  f.offset = lo;
  f.values.assign(dense.begin() + static_cast<long>(lo), dense.begin() + static_cast<long>(hi));
  return f;
}

std::size_t tail_half_width(const CVec& kernel, double tail) {
  const std::size_t n = kernel.size();
  std::vector<double> mass(n / 2 + 1, 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double a = std::abs(kernel[t]);
    mass[std::min(t, n - t)] += a;
    total += a;
  }
  double outside = 0.0;
  for (std::size_t m = n / 2; m > 0; --m) {
    outside += mass[m];
    if (outside > tail * total) return m;
  }
  return 0;
}

double mother_rhs(double wm) {
  // (1/2) sum_{s>=1} |Psi(2^s w)|^2 ; the mother vanishes for w < 0.
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double w = std::exp2(k) * wm;
    if (w > kPi * 1e6) break;
    const double g = mother(w);
    s += g * g;
  }
  return 0.5 * s;
}

CVec to_complex(const std::vector<double>& r) {
  CVec c(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) c[i] = r[i];
  return c;
}

}  // namespace

WaveletFamily parse_wavelet_family(const std::string& tag) {
  if (tag == "default" || tag == "log_gabor") return WaveletFamily::kLogGabor;
  throw InvalidArgument("unknown wavelet family '" + tag + "'");
}

std::string to_string(WaveletFamily f) {
  switch (f) {
    case WaveletFamily::kLogGabor:
      return "log_gabor";
  }
  return "unknown";
}

CVec FilterResponse::dense(std::size_t n) const {
  CVec d(n);
  for (std::size_t i = 0; i < values.size() && offset + i < n; ++i) d[offset + i] = values[i];
  return d;
}

const FilterResponse& FilterBank::psi(int j) const {
  auto it = psi_hat.find(j);
  if (it == psi_hat.end()) throw InvalidArgument("scale " + std::to_string(j) + " not in bank");
  return it->second;
}

std::size_t FilterBank::margin_at(int j) const {
  auto it = margin.find(j);
  if (it == margin.end()) throw InvalidArgument("scale " + std::to_string(j) + " not in bank");
  return it->second;
}

CVec FilterBank::kernel(int j) const {
  CVec k = psi(j).dense(n_fft);
  fft_inverse(k);
  return k;
}

double FilterBank::primitive_l1(int j) const {
  const CVec k = kernel(j);
  const std::size_t n = k.size();
  cplx run{};
  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = (i + n / 2) % n;  // t runs over -n/2 .. n/2-1
    run += k[t];
    l1 += std::abs(run);
  }
  return l1;
}

FilterBank build_filter_bank(std::size_t n_fft, int j_min, int M, WaveletFamily family) {
  if (j_min > M) throw InvalidArgument("j_min exceeds M");
  if (j_min < 1) throw InvalidArgument("j_min must be at least 1");
  if (!is_power_of_two(n_fft)) throw InvalidArgument("n_fft must be a power of two");
  if (M >= 62 || n_fft < (std::size_t{1} << (M + 2))) {
    throw InvalidArgument("scale range exceeds n_fft support (need n_fft >= 2^(M+2))");
  }
  FilterBank bank;
  bank.family = family;
  bank.n_fft = n_fft;
  bank.j_min = j_min;
  bank.M = M;
  for (int j = j_min; j <= M; ++j) {
    bank.psi_hat[j] = trim(dense_response(j, M, n_fft));
    // Margins from a shorter grid when possible; the kernel is long gone
    // before 2^(j+8) samples.
    const std::size_t nm = std::min(n_fft, std::max<std::size_t>(1024, std::size_t{1} << (j + 8)));
    CVec k = to_complex(dense_response(j, M, nm));
    fft_inverse(k);
    bank.margin[j] = tail_half_width(k, bank.margin_tail);
  }
  bank.phi_hat.assign(n_fft, cplx{});
  const double scale = std::exp2(M);
  for (std::size_t k = 0; k < n_fft; ++k) {
    const double wm = std::abs(bin_frequency(k, n_fft)) * scale / kPhiWidth;
    bank.phi_hat[k] = std::exp(-0.5 * wm * wm);
  }
  const double sigma_t = scale / kPhiWidth;
  bank.phi_margin = static_cast<std::size_t>(
      std::ceil(sigma_t * std::sqrt(2.0) * boost::math::erfc_inv(bank.margin_tail)));

  bank.lp_defect = verify_littlewood_paley(bank).max_deviation;
  double worst = 0.0;
  for (const auto& [j, f] : bank.psi_hat) {
    double neg = 0.0, total = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const double e = std::norm(f.values[i]);
      total += e;
      if (bin_frequency(f.offset + i, n_fft) < 0.0) neg += e;
    }
    if (total > 0.0) worst = std::max(worst, neg / total);
  }
  bank.analyticity_ratio = worst;
  return bank;
}

LittlewoodPaleyReport verify_littlewood_paley(const FilterBank& bank) {
  const std::size_t n = bank.n_fft;
  std::vector<double> lp(n, 0.0);
  for (const auto& [j, f] : bank.psi_hat) {
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const std::size_t b = f.offset + i;
      const double e = std::norm(f.values[i]);
      lp[b] += e;
      lp[(n - b) % n] += e;
    }
  }
  const std::size_t half = n / 2;
  const int n_oct = std::bit_width(half);
  LittlewoodPaleyReport rep;
  rep.per_octave.resize(static_cast<std::size_t>(n_oct));
  const int lo_oct = bank.j_min == 1 ? 0 : bank.j_min + 1;
  const int hi_oct = bank.M - 3;
  for (int o = 0; o < n_oct; ++o) {
    auto& od = rep.per_octave[static_cast<std::size_t>(o)];
    od.octave = o;
    od.covered = o >= lo_oct && o <= hi_oct;
  }
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t kk = std::min(k, n - k);
    const int o = std::bit_width(half / kk) - 1;
    auto& od = rep.per_octave[static_cast<std::size_t>(o)];
    od.max_deviation = std::max(od.max_deviation, std::abs(lp[k] - 2.0));
  }
  bool any = false;
  for (const auto& od : rep.per_octave) {
    if (od.covered) {
      any = true;
      rep.max_deviation = std::max(rep.max_deviation, od.max_deviation);
    }
  }
  if (!any) {
    for (const auto& od : rep.per_octave) rep.max_deviation = std::max(rep.max_deviation, od.max_deviation);
  }
  return rep;
}

PhiReport verify_phi(const FilterBank& bank) {
  PhiReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  const double scale = std::exp2(bank.M);
  for (std::size_t k = 1; k < bank.n_fft; ++k) {
    const double lhs = std::norm(bank.phi_hat[k]);
    if (lhs == 0.0) continue;
    const double rhs = mother_rhs(std::abs(bin_frequency(k, bank.n_fft)) * scale);
    if (rhs - lhs < rep.margin) {
      rep.margin = rhs - lhs;
      rep.worst_bin = k;
    }
  }
  rep.ok = rep.margin > 0.0;
  return rep;
}

std::array<double, 4> vanishing_moments(WaveletFamily family) {
  (void)family;
  const std::size_t n = 1 << 14;
  const int j = 5;
  CVec k = to_complex(dense_response(j, 8, n));
  fft_inverse(k);
  double l1 = 0.0;
  for (const auto& v : k) l1 += std::abs(v);
  std::array<double, 4> out{};
  for (int p = 0; p < 4; ++p) {
    cplx s{};
    for (std::size_t i = 0; i < n; ++i) {
      const double t = (i < n / 2 ? static_cast<double>(i) : static_cast<double>(i) - n) / std::exp2(j);
      s += std::pow(t, p) * k[i];
    }
    out[static_cast<std::size_t>(p)] = std::abs(s) / l1;
  }
  return out;
}

BankCertificate certify(const FilterBank& bank) {
  BankCertificate c;
  c.lp_defect = verify_littlewood_paley(bank).max_deviation;
  c.lp_ok = c.lp_defect < 0.05;
  c.phi = verify_phi(bank);
  c.moments = vanishing_moments(bank.family);
  c.moments_ok = std::all_of(c.moments.begin(), c.moments.end(), [](double m) { return m < 1e-6; });
  c.analyticity_ratio = bank.analyticity_ratio;
  c.analyticity_ok = c.analyticity_ratio < 0.05;
  return c;
}

FilterBank with_allpass_phi(FilterBank bank) {
  std::fill(bank.phi_hat.begin(), bank.phi_hat.end(), cplx{1.0, 0.0});
  return bank;
}

FilterBank derivative_bank(const FilterBank& bank, double alpha) {
  FilterBank out = bank;
  for (auto& [j, f] : out.psi_hat) {
    const double s = std::exp2(j);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const double w = bin_frequency(f.offset + i, bank.n_fft);
      if (w == 0.0) {
        f.values[i] = 0.0;
        continue;
      }
      const double phase = (w > 0 ? 1.0 : -1.0) * kPi * alpha / 2.0;
      f.values[i] *= std::pow(s * std::abs(w), alpha) * std::polar(1.0, phase);
    }
  }
  return out;
}

namespace {

nlohmann::json interleave(const CVec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : v) {
    a.push_back(c.real());
    a.push_back(c.imag());
  }
  return a;
}

CVec deinterleave(const nlohmann::json& a) {
  if (!a.is_array() || a.size() % 2 != 0) throw InvalidArgument("malformed response array");
  CVec v(a.size() / 2);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {a[2 * i].get<double>(), a[2 * i + 1].get<double>()};
  return v;
}

}  // namespace

std::string bank_to_json(const FilterBank& bank) {
  nlohmann::json j;
  j["family"] = to_string(bank.family);
  j["n_fft"] = bank.n_fft;
  j["j_min"] = bank.j_min;
  j["M"] = bank.M;
  j["lp_defect"] = bank.lp_defect;
  j["analyticity_ratio"] = bank.analyticity_ratio;
  j["margin_tail"] = bank.margin_tail;
  j["phi_margin"] = bank.phi_margin;
  nlohmann::json psi = nlohmann::json::array();
  for (const auto& [s, f] : bank.psi_hat) {
    psi.push_back({{"j", s}, {"offset", f.offset}, {"margin", bank.margin.at(s)},
                   {"values", interleave(f.values)}});
  }
  j["psi_hat"] = std::move(psi);
  j["phi_hat"] = interleave(bank.phi_hat);
  return j.dump();
}

FilterBank bank_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    FilterBank bank;
    bank.family = parse_wavelet_family(j.at("family").get<std::string>());
    bank.n_fft = j.at("n_fft").get<std::size_t>();
    bank.j_min = j.at("j_min").get<int>();
    bank.M = j.at("M").get<int>();
    bank.lp_defect = j.at("lp_defect").get<double>();
    bank.analyticity_ratio = j.at("analyticity_ratio").get<double>();
    bank.margin_tail = j.at("margin_tail").get<double>();
    bank.phi_margin = j.at("phi_margin").get<std::size_t>();
    for (const auto& e : j.at("psi_hat")) {
      const int s = e.at("j").get<int>();
      FilterResponse f;
      f.offset = e.at("offset").get<std::size_t>();
      f.values = deinterleave(e.at("values"));
      bank.psi_hat[s] = std::move(f);
      bank.margin[s] = e.at("margin").get<std::size_t>();
    }
    bank.phi_hat = deinterleave(j.at("phi_hat"));
    if (bank.phi_hat.size() != bank.n_fft) throw InvalidArgument("phi_hat length differs from n_fft");
    return bank;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed filter bank JSON: ") + e.what());
  }
}

bool WaveletCoeffs::valid(int j, std::size_t t) const {
  const std::size_t m = margin.at(j);
  const std::size_t pos = t % block_len;
  return pos >= m && pos + m < block_len;
}

CVec prepare_block(std::span<const double> x, std::size_t n) {
  if (x.size() > n) throw InvalidArgument("block longer than n_fft");
  CVec out(n);
  const std::size_t L = x.size();
  const double a = x.front();
  const double slope = L > 1 ? (x.back() - x.front()) / static_cast<double>(L - 1) : 0.0;
  for (std::size_t t = 0; t < L; ++t) out[t] = x[t] - (a + slope * static_cast<double>(t));
  return out;
}

CVec convolve_periodic(const CVec& x, const FilterBank& bank, int j) {
  if (x.size() != bank.n_fft) throw InvalidArgument("input length differs from n_fft");
  CVec spec = x;
  fft_forward(spec);
  const FilterResponse& f = bank.psi(j);
  CVec out(bank.n_fft);
  for (std::size_t i = 0; i < f.values.size(); ++i) out[f.offset + i] = spec[f.offset + i] * f.values[i];
  fft_inverse(out);
  return out;
}

WaveletCoeffs transform(const TimeSeries& ts, const FilterBank& bank) {
  return transform(ts, bank, bank.j_min, bank.M);
}

WaveletCoeffs transform(const TimeSeries& ts, const FilterBank& bank, int j_lo, int j_hi) {
  if (ts.block_len > bank.n_fft) throw InvalidArgument("block length exceeds n_fft");
  if (j_lo > j_hi) throw InvalidArgument("empty scale range");
  WaveletCoeffs wc;
  wc.source_len = ts.size();
  wc.block_len = ts.block_len;
  wc.j_lo = j_lo;
  wc.j_hi = j_hi;
  for (int j = j_lo; j <= j_hi; ++j) {
    wc.margin[j] = bank.margin_at(j);
    wc.by_scale[j].assign(ts.size(), cplx{});
  }
  if (2 * wc.margin[j_hi] >= ts.block_len) {
    throw InvalidArgument("block shorter than the support of scale " + std::to_string(j_hi));
  }
  const std::size_t n = bank.n_fft;
  for (std::size_t b = 0; b < ts.n_blocks; ++b) {
    CVec spec = prepare_block(ts.block(b), n);
    fft_forward(spec);
    for (int j = j_lo; j <= j_hi; ++j) {
      const FilterResponse& f = bank.psi(j);
      CVec y(n);
      for (std::size_t i = 0; i < f.values.size(); ++i) y[f.offset + i] = spec[f.offset + i] * f.values[i];
      fft_inverse(y);
      std::copy(y.begin(), y.begin() + static_cast<long>(ts.block_len),
                wc.by_scale[j].begin() + static_cast<long>(b * ts.block_len));
    }
  }
  return wc;
}

TimeSeries fractional_derivative(const TimeSeries& ts, double alpha) {
  if (!(std::abs(alpha) <= 2.0)) throw InvalidArgument("|alpha| must not exceed 2");
  if (alpha == 0.0) return ts;
  TimeSeries out = ts;
  const std::size_t L = ts.block_len;
  for (std::size_t b = 0; b < ts.n_blocks; ++b) {
    auto x = ts.block(b);
    CVec s(x.begin(), x.end());
    fft_forward(s);
    for (std::size_t k = 0; k < L; ++k) {
      if (k == 0 || 2 * k == L) {
        s[k] = 0.0;
        continue;
      }
      const double w = bin_frequency(k, L);
      const double phase = (w > 0 ? 1.0 : -1.0) * kPi * alpha / 2.0;
      s[k] *= std::pow(std::abs(w), alpha) * std::polar(1.0, phase);
    }
    fft_inverse(s);
    for (std::size_t t = 0; t < L; ++t) out.samples[b * L + t] = s[t].real();
  }
  return out;
}

}  // namespace scatlab
