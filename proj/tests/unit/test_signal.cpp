#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <random>

#include "scatlab/error.hpp"
#include "scatlab/io.hpp"
#include "scatlab/signal.hpp"
#include "support.hpp"

using namespace scatlab;
namespace ts = testing_support;

namespace {

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(LoadCsv, ReadsNamedColumn) {
  auto dir = ts::scratch_dir("csv_named");
  auto p = write_text(dir, "a.csv", "time,price\n0,1.0\n1,1.5\n2,1.25\n");
  TimeSeries t = load_csv(p, "price");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.n_blocks, 1u);
  EXPECT_EQ(t.samples[0], 1.0);
  EXPECT_EQ(t.samples[1], 1.5);
  EXPECT_EQ(t.samples[2], 1.25);
}

TEST(LoadCsv, ReadsColumnByIndex) {
  auto dir = ts::scratch_dir("csv_index");
  auto p = write_text(dir, "a.csv", "time,price\n0,1.0\n1,1.5\n");
  TimeSeries t = load_csv(p, "0");
  EXPECT_EQ(t.samples, (std::vector<double>{0.0, 1.0}));
}

TEST(LoadCsv, NanCellNamesTheRow) {
  auto dir = ts::scratch_dir("csv_nan");
  auto p = write_text(dir, "a.csv", "x\n1\n2\nNaN\n4\n");
  try {
    load_csv(p, "x");
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("row 4"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, NonNumericCellNamesTheRow) {
  auto dir = ts::scratch_dir("csv_text");
  auto p = write_text(dir, "a.csv", "x\n1\nabc\n");
  try {
    load_csv(p, "x");
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, Contracts) {
  auto dir = ts::scratch_dir("csv_contract");
  EXPECT_THROW(load_csv(dir / "missing.csv", "x"), RuntimeError);
  auto one = write_text(dir, "one.csv", "x\n1\n");
  EXPECT_THROW(load_csv(one, "x"), RuntimeError);
  auto two = write_text(dir, "two.csv", "x\n1\n2\n");
  EXPECT_THROW(load_csv(two, "y"), InvalidArgument);
}

TEST(WriteCsv, RoundTripIsBitExact) {
  auto dir = ts::scratch_dir("csv_roundtrip");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1e3);
  std::vector<double> v(500);
  for (auto& x : v) x = g(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
  v[0] = 0.1;
  v[1] = -1.0 / 3.0;
  const TimeSeries t = TimeSeries::single(v);
  write_csv(dir / "a.csv", t, "x");
  const TimeSeries back = load_csv(dir / "a.csv", "x");
  ASSERT_EQ(back.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(back.samples[i], v[i]) << i;
  write_csv(dir / "b.csv", back, "x");
  EXPECT_EQ(read_file(dir / "a.csv"), read_file(dir / "b.csv"));
}

TEST(WriteCsv, LeavesNoTemporaryFiles) {
  auto dir = ts::scratch_dir("csv_atomic");
  write_csv(dir / "a.csv", TimeSeries::single({1.0, 2.0}), "x");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 1u);
}

TEST(Segment, Arithmetic) {
  std::vector<double> v(10);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  TimeSeries a = segment(TimeSeries::single(v), 5);
  EXPECT_EQ(a.n_blocks, 2u);
  EXPECT_EQ(a.dropped, 0u);
  v.push_back(10.0);
  TimeSeries b = segment(TimeSeries::single(v), 5);
  EXPECT_EQ(b.n_blocks, 2u);
  EXPECT_EQ(b.dropped, 1u);
  EXPECT_THROW(segment(TimeSeries::single({1, 2, 3, 4}), 5), InvalidArgument);
}

TEST(Segment, FlattenReproducesPrefix) {
  std::vector<double> v(103);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.3 * static_cast<double>(i));
  TimeSeries s = segment(TimeSeries::single(v), 10);
  ASSERT_EQ(s.samples.size(), 100u);
  for (std::size_t k = 0; k < s.n_blocks; ++k) {
    auto b = s.block(k);
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b[i], v[k * 10 + i]);
  }
}

TEST(TimeSeriesType, RejectsNonFinite) {
  EXPECT_THROW(TimeSeries::single({1.0, std::nan("")}), InvalidArgument);
  EXPECT_THROW(TimeSeries::single({1.0}), InvalidArgument);
  EXPECT_THROW(TimeSeries::blocks({1.0, 2.0, 3.0}, 2), InvalidArgument);
}

TEST(Deseasonalize, FlattensAKnownProfile) {
  const std::size_t period = 2, days = 10000;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> levels(period * days + 1, 0.0);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double sd = ((i - 1) % period == 0) ? 1.0 : 2.0;  // variances [1, 4]
    levels[i] = levels[i - 1] + sd * g(rng);
  }
  const Deseasonalized d = deseasonalize(TimeSeries::single(levels), period);
  ASSERT_EQ(d.profile.variance_by_phase.size(), period);
  EXPECT_NEAR(d.profile.variance_by_phase[0], 1.0, 0.05);
  EXPECT_NEAR(d.profile.variance_by_phase[1], 4.0, 0.2);
  for (std::size_t p = 0; p < period; ++p) {
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t i = p; i < d.returns.size(); i += period, ++c) s += d.returns.samples[i] * d.returns.samples[i];
    EXPECT_NEAR(s / static_cast<double>(c), 1.0, 0.05);
  }
  EXPECT_EQ(d.levels.samples.front(), 0.0);
  EXPECT_NEAR(d.levels.samples.back(), std::accumulate(d.returns.samples.begin(), d.returns.samples.end(), 0.0),
              1e-8);
}

TEST(Deseasonalize, FlatProfileOnlyRescales) {
  // Every increment has magnitude 2, so every phase variance is 4.
  std::vector<double> levels{0.0};
  const int signs[] = {1, -1, -1, 1, 1, 1, -1, 1, -1};
  for (int s : signs) levels.push_back(levels.back() + 2.0 * s);
  const Deseasonalized d = deseasonalize(TimeSeries::single(levels), 3);
  const auto inc = increments(levels);
  for (double v : d.profile.variance_by_phase) EXPECT_DOUBLE_EQ(v, 4.0);
  for (std::size_t i = 0; i < inc.size(); ++i) EXPECT_DOUBLE_EQ(d.returns.samples[i], inc[i] / 2.0);
}

TEST(Deseasonalize, IdempotentOnExactProfile) {
  const std::size_t period = 4;
  std::vector<double> levels{0.0};
  const double sds[] = {1.0, 2.0, 0.5, 3.0};
  // Increments with exactly the phase profile: +/- sd, alternating per day.
  for (std::size_t day = 0; day < 50; ++day) {
    for (std::size_t p = 0; p < period; ++p) levels.push_back(levels.back() + ((day + p) % 2 ? 1 : -1) * sds[p]);
  }
  const Deseasonalized once = deseasonalize(TimeSeries::single(levels), period);
  const Deseasonalized twice = deseasonalize(once.levels, period);
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < once.returns.size(); ++i) {
    diff += std::pow(once.returns.samples[i] - twice.returns.samples[i], 2);
    norm += std::pow(once.returns.samples[i], 2);
  }
  EXPECT_LT(std::sqrt(diff / norm), 1e-6);
}

TEST(Deseasonalize, ConstantSeriesIsAnError) {
  EXPECT_THROW(deseasonalize(TimeSeries::single(std::vector<double>(20, 1.0)), 2), RuntimeError);
  EXPECT_THROW(deseasonalize(TimeSeries::single({1.0, 2.0, 3.0}), 2), InvalidArgument);
}
