#include "scatlab/scattering.hpp"

#include <cmath>
#include <json.hpp>

#include "scatlab/error.hpp"
#include "scatlab/io.hpp"
#include "scatlab/parallel.hpp"
#include "scatlab/stats.hpp"

namespace scatlab {

namespace {

struct PathTable {
  std::vector<ScalePath> paths;
  std::map<ScalePath, std::size_t> index;
  std::vector<std::size_t> margin;
  std::size_t max_margin = 0;
};

PathTable make_paths(const FilterBank& bank, int J0, int J, int max_order) {
  PathTable t;
  std::vector<ScalePath> ordered;
  for (int a = J0 + 1; a <= J; ++a) ordered.push_back({a});
  if (max_order >= 2) {
    for (int a = J0 + 1; a <= J; ++a)
      for (int b = a + 1; b <= J; ++b) ordered.push_back({a, b});
  }
  if (max_order >= 3) {
    for (int a = J0 + 1; a <= J; ++a)
      for (int b = a + 1; b <= J; ++b)
        for (int c = b + 1; c <= J; ++c) ordered.push_back({a, b, c});
  }
  for (const auto& p : ordered) {
    std::size_t m = 0;
    for (int j : p) m += bank.margin_at(j);
    t.index[p] = t.paths.size();
    t.paths.push_back(p);
    t.margin.push_back(m);
    t.max_margin = std::max(t.max_margin, m);
  }
  return t;
}

void check_request(const TimeSeries& ts, const FilterBank& bank, int max_order, int J0, int J) {
  if (max_order < 1 || max_order > 3) throw InvalidArgument("max_order must be 1, 2 or 3");
  if (J0 >= J) throw InvalidArgument("empty index set: need J0 < J");
  if (J >= bank.M) throw InvalidArgument("J must be smaller than the averaging scale M");
  if (bank.j_min > J0 + 1) throw InvalidArgument("filter bank does not cover scale J0+1");
  if (ts.block_len > bank.n_fft) throw InvalidArgument("block length exceeds n_fft");
}

ScatteringVector empty_layout(const PathTable& t, int J0, int J, int M) {
  ScatteringVector sv;
  sv.J0 = J0;
  sv.J = J;
  sv.M = M;
  for (const auto& p : t.paths) {
    if (p.size() == 1) sv.order1[p[0]] = 0.0;
    else if (p.size() == 2) sv.order2[{p[0], p[1]}] = 0.0;
    else sv.higher[p] = 0.0;
  }
  return sv;
}

void fill(ScatteringVector& sv, const std::vector<double>& flat) {
  std::size_t i = 0;
  for (auto& [k, v] : sv.order1) v = flat[i++];
  for (auto& [k, v] : sv.order2) v = flat[i++];
  for (auto& [k, v] : sv.higher) v = flat[i++];
}

// Visits the modulus sequence of every path of the table, depth first.
template <class Visit>
void descend(const CVec& parent, ScalePath& prefix, int first, int J, int max_order, const FilterBank& bank,
             const PathTable& table, Visit& visit) {
  const std::size_t n = bank.n_fft;
  std::vector<double> u(n);
  for (int j = first; j <= J; ++j) {
    const FilterResponse& f = bank.psi(j);
    CVec y(n);
    for (std::size_t i = 0; i < f.values.size(); ++i) y[f.offset + i] = parent[f.offset + i] * f.values[i];
    fft_inverse(y);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::abs(y[i]);
    prefix.push_back(j);
    visit(table.index.at(prefix), u);
    if (static_cast<int>(prefix.size()) < max_order && j < J) {
      CVec s(u.begin(), u.end());
      fft_forward(s);
      descend(s, prefix, j + 1, J, max_order, bank, table, visit);
    }
    prefix.pop_back();
  }
}

template <class Visit>
void walk_block(std::span<const double> x, const FilterBank& bank, int J0, int J, int max_order,
                const PathTable& table, Visit& visit) {
  CVec spec = prepare_block(x, bank.n_fft);
  fft_forward(spec);
  ScalePath prefix;
  descend(spec, prefix, J0 + 1, J, max_order, bank, table, visit);
}

std::vector<double> column_means(const std::vector<std::vector<double>>& rows) {
  const std::size_t p = rows.front().size();
  std::vector<double> out(p), col(rows.size());
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][c];
    out[c] = mean(col);
  }
  return out;
}

}  // namespace

std::vector<double> ScatteringVector::flatten() const {
  std::vector<double> v;
  v.reserve(moment_count());
  for (const auto& [k, x] : order1) v.push_back(x);
  for (const auto& [k, x] : order2) v.push_back(x);
  for (const auto& [k, x] : higher) v.push_back(x);
  return v;
}

std::vector<std::string> ScatteringVector::labels() const {
  std::vector<std::string> out;
  for (const auto& [k, x] : order1) out.push_back("S(" + std::to_string(k) + ")");
  for (const auto& [k, x] : order2)
    out.push_back("S(" + std::to_string(k.first) + "," + std::to_string(k.second) + ")");
  for (const auto& [k, x] : higher) {
    std::string s = "S(";
    for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
    out.push_back(s + ")");
  }
  return out;
}

std::size_t moment_count(int J0, int J) {
  if (J <= J0) return 0;
  const auto d = static_cast<std::size_t>(J - J0);
  return d + d * (d - 1) / 2;
}

MomentTable block_moments(const TimeSeries& ts, const FilterBank& bank, int max_order, int J0, int J) {
  check_request(ts, bank, max_order, J0, J);
  const PathTable table = make_paths(bank, J0, J, max_order);
  const std::size_t L = ts.block_len;
  if (2 * table.max_margin >= L) {
    throw InvalidArgument("insufficient block length: " + std::to_string(L) + " samples, edge margins need " +
                          std::to_string(2 * table.max_margin + 1));
  }
  MomentTable out;
  out.layout = empty_layout(table, J0, J, bank.M);
  out.layout.n_blocks = ts.n_blocks;
  out.rows.assign(ts.n_blocks, std::vector<double>(table.paths.size(), 0.0));
  parallel_for(ts.n_blocks, [&](std::size_t b) {
    auto& row = out.rows[b];
    auto visit = [&](std::size_t idx, const std::vector<double>& u) {
      const std::size_t m = table.margin[idx];
      row[idx] = mean(std::span<const double>(u).subspan(m, L - 2 * m));
    };
    walk_block(ts.block(b), bank, J0, J, max_order, table, visit);
  });
  return out;
}

ScatteringVector scatter(const TimeSeries& ts, const FilterBank& bank, int max_order, int J0, int J) {
  MomentTable t = block_moments(ts, bank, max_order, J0, J);
  ScatteringVector sv = t.layout;
  fill(sv, column_means(t.rows));
  if (ts.n_blocks > 1) {
    for (const auto& row : t.rows) {
      ScatteringVector b = t.layout;
      b.n_blocks = 1;
      fill(b, row);
      sv.per_block.push_back(std::move(b));
    }
  }
  return sv;
}

std::vector<ScatteringVector> per_block_scatter(const TimeSeries& ts, const FilterBank& bank, int J0, int J,
                                                std::optional<std::size_t> delta) {
  if (!delta) {
    MomentTable t = block_moments(ts, bank, 2, J0, J);
    if (t.rows.size() < 2) throw InvalidArgument("fewer than 2 windows");
    std::vector<ScatteringVector> out;
    for (const auto& row : t.rows) {
      ScatteringVector b = t.layout;
      b.n_blocks = 1;
      fill(b, row);
      out.push_back(std::move(b));
    }
    return out;
  }
  if (*delta == 0) throw InvalidArgument("delta must be positive");
  check_request(ts, bank, 2, J0, J);
  const PathTable table = make_paths(bank, J0, J, 2);
  const std::size_t L = ts.block_len;
  const std::size_t edge = table.max_margin + bank.phi_margin;
  const std::size_t hop = *delta << bank.M;
  std::vector<std::size_t> positions;
  for (std::size_t t = edge; t + edge < L; t += hop) positions.push_back(t);
  if (positions.size() * ts.n_blocks < 2) throw InvalidArgument("fewer than 2 windows");
  const std::size_t n = bank.n_fft;
  std::vector<std::vector<std::vector<double>>> values(
      ts.n_blocks, std::vector<std::vector<double>>(positions.size(), std::vector<double>(table.paths.size())));
  parallel_for(ts.n_blocks, [&](std::size_t b) {
    auto visit = [&](std::size_t idx, const std::vector<double>& u) {
      CVec s(u.begin(), u.end());
      fft_forward(s);
      for (std::size_t i = 0; i < n; ++i) s[i] *= bank.phi_hat[i];
      fft_inverse(s);
      for (std::size_t w = 0; w < positions.size(); ++w) values[b][w][idx] = s[positions[w]].real();
    };
    walk_block(ts.block(b), bank, J0, J, 2, table, visit);
  });
  std::vector<ScatteringVector> out;
  ScatteringVector layout = empty_layout(table, J0, J, bank.M);
  layout.n_blocks = 1;
  for (const auto& blk : values) {
    for (const auto& row : blk) {
      ScatteringVector v = layout;
      fill(v, row);
      out.push_back(std::move(v));
    }
  }
  return out;
}

NormalizedScattering normalize(const ScatteringVector& sv, std::optional<int> reference_scale) {
  if (sv.order1.empty()) throw InvalidArgument("no first-order moments to normalize by");
  const int ref = reference_scale.value_or(sv.order1.begin()->first);
  auto rit = sv.order1.find(ref);
  if (rit == sv.order1.end()) throw InvalidArgument("reference scale " + std::to_string(ref) + " absent");
  double largest = 0.0;
  for (const auto& [k, v] : sv.order1) largest = std::max(largest, v);
  const double floor = 1e-12 * largest;
  if (!(rit->second > floor)) throw RuntimeError("reference moment below the normalization floor");
  NormalizedScattering ns;
  ns.reference_scale = ref;
  for (const auto& [k, v] : sv.order1) ns.order1_norm[k] = v / rit->second;
  for (const auto& [k, v] : sv.order2) {
    auto it = sv.order1.find(k.first);
    if (it == sv.order1.end() || !(it->second > floor)) {
      ns.omitted.push_back("S(" + std::to_string(k.first) + "," + std::to_string(k.second) + ")");
      continue;
    }
    ns.order2_norm[k] = v / it->second;
  }
  for (const auto& [k, v] : sv.higher) {
    double parent = 0.0;
    if (k.size() == 3) {
      auto it = sv.order2.find({k[0], k[1]});
      if (it != sv.order2.end()) parent = it->second;
    }
    if (!(parent > floor)) {
      ns.omitted.push_back("S(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + "," + std::to_string(k[2]) +
                           ")");
      continue;
    }
    ns.higher_norm[k] = v / parent;
  }
  return ns;
}

double error_bound(const TimeSeries& ts, const FilterBank& bank, int j1, const ScatteringVector& sv) {
  if (ts.block_len > bank.n_fft) throw InvalidArgument("block length exceeds n_fft");
  const std::size_t m = bank.margin_at(j1);
  const std::size_t L = ts.block_len;
  if (2 * m >= L) throw InvalidArgument("insufficient block length");
  std::vector<double> first(ts.n_blocks), second(ts.n_blocks);
  const FilterResponse& f = bank.psi(j1);
  for (std::size_t b = 0; b < ts.n_blocks; ++b) {
    CVec spec = prepare_block(ts.block(b), bank.n_fft);
    fft_forward(spec);
    CVec y(bank.n_fft);
    for (std::size_t i = 0; i < f.values.size(); ++i) y[f.offset + i] = spec[f.offset + i] * f.values[i];
    fft_inverse(y);
    std::vector<double> u(L - 2 * m), u2(L - 2 * m);
    for (std::size_t t = m; t + m < L; ++t) {
      u[t - m] = std::abs(y[t]);
      u2[t - m] = u[t - m] * u[t - m];
    }
    first[b] = mean(u);
    second[b] = mean(u2);
  }
  const double s1 = mean(first);
  double bound = mean(second) - s1 * s1;
  for (const auto& [k, v] : sv.order2) {
    if (k.first == j1 && k.second <= bank.M) bound -= v * v;
  }
  for (const auto& [k, v] : sv.higher) {
    if (k.front() == j1 && k.back() <= bank.M) bound -= v * v;
  }
  return std::max(0.0, bound);
}

namespace {

double log2_or_nan(double v) { return v > 0.0 ? std::log2(v) : std::nan(""); }

nlohmann::json vector_json(const ScatteringVector& sv) {
  nlohmann::json j;
  j["J0"] = sv.J0;
  j["J"] = sv.J;
  j["M"] = sv.M;
  j["n_blocks"] = sv.n_blocks;
  auto o1 = nlohmann::json::array();
  for (const auto& [k, v] : sv.order1) o1.push_back({{"j1", k}, {"value", v}, {"log2", log2_or_nan(v)}});
  auto o2 = nlohmann::json::array();
  for (const auto& [k, v] : sv.order2)
    o2.push_back({{"j1", k.first}, {"j2", k.second}, {"value", v}, {"log2", log2_or_nan(v)}});
  auto hi = nlohmann::json::array();
  for (const auto& [k, v] : sv.higher) hi.push_back({{"path", k}, {"value", v}, {"log2", log2_or_nan(v)}});
  j["order1"] = std::move(o1);
  j["order2"] = std::move(o2);
  j["higher"] = std::move(hi);
  return j;
}

}  // namespace

std::string scattering_to_json(const ScatteringVector& sv) {
  nlohmann::json j = vector_json(sv);
  auto blocks = nlohmann::json::array();
  for (const auto& b : sv.per_block) blocks.push_back(b.flatten());
  j["per_block"] = std::move(blocks);
  return j.dump(2);
}

ScatteringVector scattering_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ScatteringVector sv;
    sv.J0 = j.at("J0").get<int>();
    sv.J = j.at("J").get<int>();
    sv.M = j.at("M").get<int>();
    sv.n_blocks = j.at("n_blocks").get<std::size_t>();
    for (const auto& e : j.at("order1")) sv.order1[e.at("j1").get<int>()] = e.at("value").get<double>();
    for (const auto& e : j.at("order2"))
      sv.order2[{e.at("j1").get<int>(), e.at("j2").get<int>()}] = e.at("value").get<double>();
    for (const auto& e : j.at("higher")) sv.higher[e.at("path").get<ScalePath>()] = e.at("value").get<double>();
    if (j.contains("per_block")) {
      for (const auto& row : j.at("per_block")) {
        ScatteringVector b = sv;
        b.n_blocks = 1;
        b.per_block.clear();
        auto flat = row.get<std::vector<double>>();
        if (flat.size() != sv.moment_count()) throw InvalidArgument("per-block row has wrong length");
        fill(b, flat);
        sv.per_block.push_back(std::move(b));
      }
    }
    return sv;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed scattering JSON: ") + e.what());
  }
}

void write_scattering_csv(const std::filesystem::path& path, const ScatteringVector& sv) {
  std::string out = "order,j1,j2,value,log2_value\n";
  for (const auto& [k, v] : sv.order1) {
    out += "1," + std::to_string(k) + ",," + format_double(v) + "," + format_double(log2_or_nan(v)) + "\n";
  }
  for (const auto& [k, v] : sv.order2) {
    out += "2," + std::to_string(k.first) + "," + std::to_string(k.second) + "," + format_double(v) + "," +
           format_double(log2_or_nan(v)) + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace scatlab
