#include "scatlab/signal.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scatlab/error.hpp"
#include "scatlab/io.hpp"

namespace scatlab {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = cell.find_first_not_of(' ');
    cells.push_back(start == std::string::npos ? std::string() : cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_index(const std::string& s, std::size_t& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  out = std::stoul(s);
  return true;
}

}  // namespace

TimeSeries TimeSeries::single(std::vector<double> samples, double dt) {
  TimeSeries ts;
  ts.block_len = samples.size();
  ts.samples = std::move(samples);
  ts.dt = dt;
  ts.n_blocks = 1;
  ts.validate();
  return ts;
}

TimeSeries TimeSeries::blocks(std::vector<double> samples, std::size_t n_blocks, double dt) {
  if (n_blocks == 0 || samples.size() % n_blocks != 0) {
    throw InvalidArgument("sample count is not a multiple of the block count");
  }
  TimeSeries ts;
  ts.block_len = samples.size() / n_blocks;
  ts.samples = std::move(samples);
  ts.n_blocks = n_blocks;
  ts.dt = dt;
  ts.validate();
  return ts;
}

std::span<const double> TimeSeries::block(std::size_t k) const {
  if (k >= n_blocks) throw InvalidArgument("block index out of range");
  return std::span<const double>(samples).subspan(k * block_len, block_len);
}

void TimeSeries::validate() const {
  if (samples.size() < 2) throw InvalidArgument("time series needs at least 2 samples");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (n_blocks == 0 || block_len == 0 || n_blocks * block_len != samples.size()) {
    throw InvalidArgument("inconsistent block structure");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw InvalidArgument("non-finite sample at index " + std::to_string(i));
    }
  }
}

TimeSeries load_csv(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw RuntimeError(path.string() + ": empty file");
  auto header = split_csv_line(line);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) col = i;
  }
  if (col == header.size()) {
    std::size_t idx = 0;
    if (!parse_index(column, idx) || idx >= header.size()) {
      throw InvalidArgument(path.string() + ": no column '" + column + "'");
    }
    col = idx;
  }
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (col >= cells.size()) {
      throw RuntimeError(path.string() + ": row " + std::to_string(row) + " has no column " +
                         std::to_string(col));
    }
    const std::string& cell = cells[col];
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
      throw RuntimeError(path.string() + ": non-numeric value '" + cell + "' at row " +
                         std::to_string(row));
    }
    if (!std::isfinite(v)) {
      throw RuntimeError(path.string() + ": non-finite value at row " + std::to_string(row));
    }
    values.push_back(v);
  }
  if (values.size() < 2) throw RuntimeError(path.string() + ": fewer than 2 usable rows");
  return TimeSeries::single(std::move(values));
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw InvalidArgument("header/column count mismatch");
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw InvalidArgument("columns differ in length");
  }
  std::string out;
  out.reserve(rows * columns.size() * 24 + 64);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns[c][r]);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_csv(const std::filesystem::path& path, const TimeSeries& ts,
               const std::string& column_prefix) {
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols;
  for (std::size_t k = 0; k < ts.n_blocks; ++k) {
    header.push_back(ts.n_blocks == 1 ? column_prefix : column_prefix + std::to_string(k));
    auto b = ts.block(k);
    cols.emplace_back(b.begin(), b.end());
  }
  write_csv(path, header, cols);
}

TimeSeries segment(const TimeSeries& ts, std::size_t block_len) {
  if (block_len == 0) throw InvalidArgument("block_len must be positive");
  if (block_len > ts.size()) throw InvalidArgument("block_len exceeds series length");
  std::size_t n = ts.size() / block_len;
  TimeSeries out;
  out.samples.assign(ts.samples.begin(), ts.samples.begin() + static_cast<long>(n * block_len));
  out.dt = ts.dt;
  out.n_blocks = n;
  out.block_len = block_len;
  out.dropped = ts.size() - n * block_len;
  out.validate();
  return out;
}

std::vector<double> increments(std::span<const double> levels) {
  std::vector<double> d;
  if (levels.size() < 2) return d;
  d.resize(levels.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) d[i] = levels[i + 1] - levels[i];
  return d;
}

Deseasonalized deseasonalize(const TimeSeries& ts, std::size_t period) {
  if (period == 0) throw InvalidArgument("period must be positive");
  if (ts.size() < 2 * period) throw InvalidArgument("series shorter than two periods");
  std::vector<double> r = increments(ts.samples);
  std::vector<double> sum(period, 0.0);
  std::vector<std::size_t> count(period, 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    sum[i % period] += r[i] * r[i];
    ++count[i % period];
  }
  SeasonalProfile profile{period, std::vector<double>(period)};
  for (std::size_t p = 0; p < period; ++p) {
    double v = count[p] ? sum[p] / static_cast<double>(count[p]) : 0.0;
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw RuntimeError("phase " + std::to_string(p) + " has zero empirical variance");
    }
    profile.variance_by_phase[p] = v;
  }
  std::vector<double> levels(r.size() + 1, 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] /= std::sqrt(profile.variance_by_phase[i % period]);
    levels[i + 1] = levels[i] + r[i];
  }
  return {TimeSeries::single(std::move(levels), ts.dt), TimeSeries::single(std::move(r), ts.dt),
          std::move(profile)};
}

}  // namespace scatlab
