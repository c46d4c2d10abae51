#include "scatlab/estimation.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "scatlab/error.hpp"

namespace scatlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ScatteringVector from_row(const ScatteringVector& layout, const std::vector<double>& row) {
  ScatteringVector sv = layout;
  sv.per_block.clear();
  std::size_t i = 0;
  for (auto& [k, v] : sv.order1) v = row[i++];
  for (auto& [k, v] : sv.order2) v = row[i++];
  for (auto& [k, v] : sv.higher) v = row[i++];
  return sv;
}

double quadratic_form(const std::vector<double>& m, const Eigen::MatrixXd& W) {
  Eigen::Map<const Eigen::VectorXd> v(m.data(), static_cast<Eigen::Index>(m.size()));
  return v.dot(W * v);
}

std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidArgument("moment vectors differ in length");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

double max_relative_error(const SimulatedMoments& s) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.mean.size(); ++i) {
    if (s.mean[i] != 0.0) worst = std::max(worst, std::abs(s.std_error[i] / s.mean[i]));
  }
  return worst;
}

}  // namespace

std::vector<double> moment_vector(const ScatteringVector& sv, MomentKind kind) {
  std::vector<double> v;
  if (kind == MomentKind::kRaw) {
    for (const auto& [k, x] : sv.order1) v.push_back(x);
    for (const auto& [k, x] : sv.order2) v.push_back(x);
    return v;
  }
  if (sv.order1.empty()) throw InvalidArgument("no first-order moments");
  const double ref = sv.order1.begin()->second;
  for (auto it = std::next(sv.order1.begin()); it != sv.order1.end(); ++it) {
    v.push_back(ref > 0.0 ? it->second / ref : kNaN);
  }
  for (const auto& [k, x] : sv.order2) {
    const double parent = sv.order1.at(k.first);
    v.push_back(parent > 0.0 ? x / parent : kNaN);
  }
  return v;
}

std::size_t MomentCondition::simulations() const {
  return n_sim ? n_sim : 16 * std::max<std::size_t>(1, data_moments.n_blocks);
}

void MomentCondition::validate() const {
  if (!bank) throw InvalidArgument("moment condition has no filter bank");
  if (per_block.empty()) throw InvalidArgument("moment condition has no per-block vectors");
  const std::size_t p = data_moments.order1.size() + data_moments.order2.size();
  if (p == 0) throw InvalidArgument("empty moment vector");
  for (const auto& b : per_block) {
    if (b.J0 != data_moments.J0 || b.J != data_moments.J || b.M != data_moments.M ||
        b.order1.size() + b.order2.size() != p) {
      throw InvalidArgument("per-block vectors do not share the data index set");
    }
  }
  if (model.length < 2) throw InvalidArgument("model realization length must be at least 2");
}

MomentCondition make_moment_condition(const TimeSeries& data, std::shared_ptr<const FilterBank> bank, int J0,
                                      int J, const ProcessSpec& model, std::optional<std::size_t> delta,
                                      MomentKind kind) {
  if (!bank) throw InvalidArgument("filter bank is null");
  MomentCondition mc;
  mc.data_moments = scatter(data, *bank, 2, J0, J);
  if (delta) {
    mc.per_block = per_block_scatter(data, *bank, J0, J, delta);
    mc.independent_blocks = false;
  } else {
    if (data.n_blocks < 2) throw InvalidArgument("fewer than 2 blocks; pass a window spacing instead");
    mc.per_block = mc.data_moments.per_block;
    mc.independent_blocks = true;
  }
  mc.model = model;
  if (mc.model.length == 0) mc.model.length = data.block_len;
  mc.bank = std::move(bank);
  mc.kind = kind;
  mc.validate();
  return mc;
}

MomentSimulator::MomentSimulator(const MomentCondition& mc) : mc_(mc) { mc_.validate(); }

const SimulatedMoments& MomentSimulator::at(double theta) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(theta);
  if (it != cache_.end()) return it->second;
  ProcessSpec spec = mc_.model;
  spec.theta = theta;
  spec.n_realizations = mc_.simulations();
  spec.seed = mc_.sim_seed;
  const std::size_t p = moment_vector(mc_.data_moments, mc_.kind).size();
  SimulatedMoments out;
  try {
    spec.validate();
  } catch (const InvalidArgument&) {
    out.mean.assign(p, kNaN);
    out.std_error.assign(p, kNaN);
    return cache_.emplace(theta, std::move(out)).first->second;
  }
  const SimulatedEnsemble ens = simulate(spec);
  const MomentTable table =
      block_moments(ens.series, *mc_.bank, 2, mc_.data_moments.J0, mc_.data_moments.J);
  const std::size_t R = table.rows.size();
  std::vector<std::vector<double>> vecs(R);
  for (std::size_t r = 0; r < R; ++r) vecs[r] = moment_vector(from_row(table.layout, table.rows[r]), mc_.kind);
  std::vector<double> col(R), raw_mean(table.rows.front().size());
  for (std::size_t c = 0; c < raw_mean.size(); ++c) {
    for (std::size_t r = 0; r < R; ++r) col[r] = table.rows[r][c];
    raw_mean[c] = mean(col);
  }
  out.mean = moment_vector(from_row(table.layout, raw_mean), mc_.kind);
  out.std_error.assign(p, 0.0);
  if (R >= 2) {
    for (std::size_t c = 0; c < p; ++c) {
      for (std::size_t r = 0; r < R; ++r) col[r] = vecs[r][c];
      out.std_error[c] = std::sqrt(variance(col) / static_cast<double>(R));
    }
  }
  return cache_.emplace(theta, std::move(out)).first->second;
}

WeightMatrix empirical_weight(const MomentCondition& mc, const std::vector<double>& model_mean) {
  const std::size_t n = mc.per_block.size();
  if (n < 2) throw InvalidArgument("empirical weight needs at least 2 blocks");
  const auto p = static_cast<Eigen::Index>(model_mean.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p, p);
  for (const auto& b : mc.per_block) {
    const std::vector<double> x = moment_vector(b, mc.kind);
    if (static_cast<Eigen::Index>(x.size()) != p) throw InvalidArgument("per-block vector has wrong length");
    Eigen::VectorXd d(p);
    for (Eigen::Index i = 0; i < p; ++i) d[i] = x[static_cast<std::size_t>(i)] - model_mean[static_cast<std::size_t>(i)];
    S.noalias() += d * d.transpose();
  }
  S /= static_cast<double>(n);
  if (!S.allFinite()) throw RuntimeError("moment covariance is not finite");
  WeightMatrix out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
  out.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (out.condition > 1e10) {
    S += Eigen::MatrixXd::Identity(p, p) * (1e-8 * S.trace() / static_cast<double>(p));
    out.regularized = true;
    eig.compute(S);
    lo = eig.eigenvalues().minCoeff();
    hi = eig.eigenvalues().maxCoeff();
    out.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(lo > 0.0)) throw RuntimeError("moment covariance is singular even after ridge regularization");
  }
  const Eigen::VectorXd inv = eig.eigenvalues().cwiseInverse();
  Eigen::MatrixXd W = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  out.W = 0.5 * (W + W.transpose());
  return out;
}

WeightMatrix empirical_weight(const MomentCondition& mc, double theta) {
  MomentSimulator sim(mc);
  return empirical_weight(mc, sim.at(theta).mean);
}

ScalarMinimum gmm_minimize(const MomentCondition& mc, MomentSimulator& sim, const Eigen::MatrixXd& W,
                           const ScalarSearch& search) {
  const std::vector<double> data = moment_vector(mc.data_moments, mc.kind);
  if (W.rows() != static_cast<Eigen::Index>(data.size()) || W.cols() != W.rows()) {
    throw InvalidArgument("weight matrix does not match the moment count");
  }
  return minimize_scalar(
      [&](double theta) { return quadratic_form(difference(data, sim.at(theta).mean), W); }, search);
}

double gmm_one_step(const MomentCondition& mc, const ScalarSearch& search) {
  MomentSimulator sim(mc);
  const auto p = static_cast<Eigen::Index>(moment_vector(mc.data_moments, mc.kind).size());
  return gmm_minimize(mc, sim, Eigen::MatrixXd::Identity(p, p), search).x;
}

namespace {

void finish_fit(const MomentCondition& mc, MomentSimulator& sim, GmmFit& fit, bool allow_p_value) {
  const std::vector<double> data = moment_vector(mc.data_moments, mc.kind);
  const auto p = static_cast<int>(data.size());
  fit.n_moments = data.size();
  fit.n_blocks = mc.per_block.size();
  fit.dof = p - 1;
  if (fit.dof <= 0) throw InvalidArgument("need more moments than parameters (p - d > 0)");
  const SimulatedMoments& at_hat = sim.at(fit.theta_hat);
  const WeightMatrix w = empirical_weight(mc, at_hat.mean);
  fit.regularized = fit.regularized || w.regularized;
  const double q = quadratic_form(difference(data, at_hat.mean), w.W);
  fit.chi2_red = std::max(0.0, static_cast<double>(fit.n_blocks) * q / fit.dof);
  if (allow_p_value && mc.independent_blocks) fit.p_value = chi2_survival(fit.dof * fit.chi2_red, fit.dof);
  fit.mc_relative_error = max_relative_error(at_hat);
  if (fit.weight_matrix.size() == 0) fit.weight_matrix = w.W;
}

}  // namespace

GmmFit gmm_two_step(const MomentCondition& mc, const ScalarSearch& search) {
  MomentSimulator sim(mc);
  const auto p = static_cast<Eigen::Index>(moment_vector(mc.data_moments, mc.kind).size());
  GmmFit fit;
  ScalarMinimum first = gmm_minimize(mc, sim, Eigen::MatrixXd::Identity(p, p), search);
  fit.theta_one_step = first.x;
  const WeightMatrix w1 = empirical_weight(mc, sim.at(first.x).mean);
  ScalarMinimum second = gmm_minimize(mc, sim, w1.W, search);
  fit.theta_hat = second.x;
  fit.regularized = w1.regularized;
  fit.objective_trace = first.trace;
  fit.objective_trace.insert(fit.objective_trace.end(), second.trace.begin(), second.trace.end());
  fit.warnings = first.warnings;
  fit.warnings.insert(fit.warnings.end(), second.warnings.begin(), second.warnings.end());
  finish_fit(mc, sim, fit, true);
  return fit;
}

GmmFit gmm_identity(const MomentCondition& mc, const ScalarSearch& search) {
  MomentSimulator sim(mc);
  const auto p = static_cast<Eigen::Index>(moment_vector(mc.data_moments, mc.kind).size());
  GmmFit fit;
  ScalarMinimum first = gmm_minimize(mc, sim, Eigen::MatrixXd::Identity(p, p), search);
  fit.theta_one_step = first.x;
  fit.theta_hat = first.x;
  fit.objective_trace = first.trace;
  fit.warnings = first.warnings;
  fit.weight_matrix = Eigen::MatrixXd::Identity(p, p);
  finish_fit(mc, sim, fit, false);
  return fit;
}

RegressionEstimate wavelet_moment_regression(const TimeSeries& ts, const FilterBank& bank, int j_lo, int j_hi) {
  if (j_hi - j_lo + 1 < 3) throw InvalidArgument("wavelet regression needs at least 3 scales");
  const WaveletCoeffs wc = transform(ts, bank, j_lo, j_hi);
  std::vector<double> xs, ys;
  for (int j = j_lo; j <= j_hi; ++j) {
    const std::size_t m = wc.margin.at(j);
    const auto& c = wc.by_scale.at(j);
    std::vector<double> m1(ts.n_blocks), m2(ts.n_blocks);
    for (std::size_t b = 0; b < ts.n_blocks; ++b) {
      std::vector<double> a, a2;
      for (std::size_t t = m; t + m < ts.block_len; ++t) {
        const double v = std::abs(c[b * ts.block_len + t]);
        a.push_back(v);
        a2.push_back(v * v);
      }
      m1[b] = mean(a);
      m2[b] = mean(a2);
    }
    const double e1 = mean(m1), e2 = mean(m2);
    if (!(e1 > 0.0)) throw RuntimeError("vanishing wavelet moments at scale " + std::to_string(j));
    xs.push_back(j);
    ys.push_back(std::log2(e2) - 2.0 * std::log2(e1));
  }
  const LinearFit f = ols(xs, ys);
  RegressionEstimate r;
  r.slope = f.slope;
  r.slope_stderr = f.slope_stderr;
  r.value = -f.slope;
  r.points = xs.size();
  return r;
}

RegressionEstimate log_covariance_regression(const TimeSeries& ts, const FilterBank& bank, int j,
                                             std::size_t lag_lo, std::size_t lag_hi) {
  if (lag_lo < 1 || lag_lo >= lag_hi) throw InvalidArgument("lag range must satisfy 1 <= lo < hi");
  const WaveletCoeffs wc = transform(ts, bank, j, j);
  const std::size_t m = wc.margin.at(j);
  const std::size_t V = ts.block_len - 2 * m;
  if (lag_hi >= V) throw InvalidArgument("largest lag exceeds the usable block length");
  const std::size_t nf = next_power_of_two(2 * V);
  std::vector<double> prod(lag_hi + 1, 0.0), pairs(lag_hi + 1, 0.0);
  std::size_t dropped = 0;
  const auto& c = wc.by_scale.at(j);
  for (std::size_t b = 0; b < ts.n_blocks; ++b) {
    std::vector<double> z(V, 0.0), mask(V, 0.0);
    double sum = 0.0, count = 0.0;
    for (std::size_t t = 0; t < V; ++t) {
      const double a = std::abs(c[b * ts.block_len + m + t]);
      if (a > 0.0) {
        z[t] = std::log(a);
        mask[t] = 1.0;
        sum += z[t];
        count += 1.0;
      } else {
        ++dropped;
      }
    }
    if (count < 2) continue;
    const double zbar = sum / count;
    CVec fz(nf), fm(nf);
    for (std::size_t t = 0; t < V; ++t) {
      fz[t] = mask[t] * (z[t] - zbar);
      fm[t] = mask[t];
    }
    fft_forward(fz);
    fft_forward(fm);
    for (std::size_t k = 0; k < nf; ++k) {
      fz[k] = std::norm(fz[k]);
      fm[k] = std::norm(fm[k]);
    }
    fft_inverse(fz);
    fft_inverse(fm);
    for (std::size_t l = 0; l <= lag_hi; ++l) {
      prod[l] += fz[l].real();
      pairs[l] += std::round(fm[l].real());
    }
  }
  std::set<std::size_t> lags;
  const int K = 16;
  for (int i = 0; i < K; ++i) {
    const double l = static_cast<double>(lag_lo) *
                     std::pow(static_cast<double>(lag_hi) / static_cast<double>(lag_lo), i / double(K - 1));
    lags.insert(static_cast<std::size_t>(std::llround(l)));
  }
  std::vector<double> xs, ys;
  for (std::size_t l : lags) {
    if (l > lag_hi || pairs[l] < 1.0) continue;
    xs.push_back(-std::log(static_cast<double>(l)));
    ys.push_back(prod[l] / pairs[l]);
  }
  if (xs.size() < 3) throw InvalidArgument("too few usable lags");
  const LinearFit f = ols(xs, ys);
  RegressionEstimate r;
  r.slope = f.slope;
  r.slope_stderr = f.slope_stderr;
  r.value = f.slope;
  r.points = xs.size();
  r.dropped = dropped;
  return r;
}

AlphaEstimate scattering_slope_regression(const NormalizedScattering& ns, int delta) {
  if (delta < 1) throw InvalidArgument("delta must be positive");
  std::vector<double> x1, y1, x2, y2;
  for (const auto& [j, v] : ns.order1_norm) {
    if (!(v > 0.0)) throw InvalidArgument("nonpositive normalized moment");
    x1.push_back(j);
    y1.push_back(std::log2(v));
  }
  std::set<int> distinct;
  for (const auto& [k, v] : ns.order2_norm) {
    const int l = k.second - k.first;
    if (l < delta) continue;
    if (!(v > 0.0)) throw InvalidArgument("nonpositive normalized moment");
    x2.push_back(l);
    y2.push_back(std::log2(v));
    distinct.insert(l);
  }
  if (x1.size() < 2 || distinct.size() < 2) {
    throw InvalidArgument("insufficient entries for the scattering regression after the delta filter");
  }
  AlphaEstimate a;
  a.order1_slope = ols(x1, y1).slope;
  a.order2_slope = ols(x2, y2).slope;
  // Shared slope beta: y1 ~ a1 + beta j, y2 + l ~ a2 + beta l.
  auto centered = [](const std::vector<double>& x, const std::vector<double>& y, double& sxx, double& sxy) {
    const double mx = mean(x), my = mean(y);
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
  };
  std::vector<double> y2s(y2.size());
  for (std::size_t i = 0; i < y2.size(); ++i) y2s[i] = y2[i] + x2[i];
  double sxx = 0.0, sxy = 0.0;
  centered(x1, y1, sxx, sxy);
  centered(x2, y2s, sxx, sxy);
  a.inverse_alpha = sxy / sxx;
  a.alpha = 1.0 / a.inverse_alpha;
  return a;
}

}  // namespace scatlab
