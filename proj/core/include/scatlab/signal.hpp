#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace scatlab {

// Uniformly sampled real signal, optionally made of n_blocks independent
// realizations of block_len samples each, stored back to back.
struct TimeSeries {
  std::vector<double> samples;
  double dt = 1.0;
  std::size_t n_blocks = 1;
  std::size_t block_len = 0;
  // Samples discarded by segment() because they did not fill a block.
  std::size_t dropped = 0;

  static TimeSeries single(std::vector<double> samples, double dt = 1.0);
  static TimeSeries blocks(std::vector<double> samples, std::size_t n_blocks,
                           double dt = 1.0);

  std::size_t size() const { return samples.size(); }
  std::span<const double> block(std::size_t k) const;
  void validate() const;
};

struct SeasonalProfile {
  std::size_t period = 0;
  std::vector<double> variance_by_phase;
};

struct Deseasonalized {
  TimeSeries levels;   // re-integrated, starts at 0
  TimeSeries returns;  // normalized increments
  SeasonalProfile profile;
};

// `column` is a header name or a zero-based index written in decimal.
TimeSeries load_csv(const std::filesystem::path& path, const std::string& column);

// Writes one column per entry, 17 significant digits, atomically.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

// One column per block.
void write_csv(const std::filesystem::path& path, const TimeSeries& ts,
               const std::string& column_prefix = "x");

TimeSeries segment(const TimeSeries& ts, std::size_t block_len);

// Operates on increments of the (single-block) level series.
Deseasonalized deseasonalize(const TimeSeries& ts, std::size_t period);

std::vector<double> increments(std::span<const double> levels);

}  // namespace scatlab
