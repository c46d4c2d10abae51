#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scatlab/signal.hpp"
#include "scatlab/wavelet.hpp"

namespace scatlab {

using ScalePath = std::vector<int>;

// Estimated moments S X(j1), S X(j1,j2) and optionally order-3 paths, with
// J0 < j1 <= J and j1 < j2 <= J.
struct ScatteringVector {
  std::map<int, double> order1;
  std::map<std::pair<int, int>, double> order2;
  std::map<ScalePath, double> higher;
  int J0 = 0;
  int J = 0;
  int M = 0;
  std::size_t n_blocks = 0;
  std::vector<ScatteringVector> per_block;

  // Order 1 then order 2 (then order 3), each in ascending index order.
  std::vector<double> flatten() const;
  std::vector<std::string> labels() const;
  std::size_t moment_count() const { return order1.size() + order2.size() + higher.size(); }
};

// Number of first- plus second-order moments for J0 < j1 < j2 <= J.
std::size_t moment_count(int J0, int J);

// Rows are blocks, columns follow ScatteringVector::flatten() of `layout`.
struct MomentTable {
  ScatteringVector layout;
  std::vector<std::vector<double>> rows;
};

MomentTable block_moments(const TimeSeries& ts, const FilterBank& bank, int max_order, int J0, int J);

ScatteringVector scatter(const TimeSeries& ts, const FilterBank& bank, int max_order, int J0, int J);

// Without delta: one vector per block (block means of the modulus). With
// delta: (|...|*phi_M)(t) sampled every delta * 2^M samples inside the
// region free of edge effects, pooled over blocks.
std::vector<ScatteringVector> per_block_scatter(const TimeSeries& ts, const FilterBank& bank, int J0,
                                                int J, std::optional<std::size_t> delta = std::nullopt);

struct NormalizedScattering {
  std::map<int, double> order1_norm;                  // S(j1) / S(ref)
  std::map<std::pair<int, int>, double> order2_norm;  // S(j1,j2) / S(j1)
  std::map<ScalePath, double> higher_norm;            // S(path) / S(parent)
  int reference_scale = 0;
  std::vector<std::string> omitted;
};

// Reference defaults to the smallest first-order scale present.
NormalizedScattering normalize(const ScatteringVector& sv, std::optional<int> reference_scale = std::nullopt);

// sigma^2(|X*psi_j1|) minus the squared moments of every path of order >= 2
// starting at j1 found in sv, clamped at zero.
double error_bound(const TimeSeries& ts, const FilterBank& bank, int j1, const ScatteringVector& sv);

std::string scattering_to_json(const ScatteringVector& sv);
ScatteringVector scattering_from_json(const std::string& text);

// Columns order,j1,j2,value,log2_value; order-3 paths are JSON only.
void write_scattering_csv(const std::filesystem::path& path, const ScatteringVector& sv);

}  // namespace scatlab
