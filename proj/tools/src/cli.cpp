#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "scatlab/analysis.hpp"
#include "scatlab/error.hpp"
#include "scatlab/estimation.hpp"
#include "scatlab/fft.hpp"
#include "scatlab/io.hpp"
#include "scatlab/processes.hpp"
#include "scatlab/scattering.hpp"
#include "scatlab/signal.hpp"
#include "scatlab/wavelet.hpp"

#ifndef SCATLAB_VERSION
#define SCATLAB_VERSION "unknown"
#endif

namespace scatlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a manifest records besides the outputs themselves.
struct RunRecord {
  std::string command;
  std::vector<std::string> argv;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;  // path -> sha256
};

std::string file_digest(const fs::path& p) { return sha256_hex(read_file(p)); }

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("input file not found: " + path);
}

json parse_report(const std::string& text) { return json::parse(text); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_manifests(const RunRecord& rec, const std::vector<fs::path>& outputs) {
  json outs = json::object();
  for (const auto& o : outputs) outs[o.string()] = file_digest(o);
  json inputs = json::object();
  for (const auto& [k, v] : rec.inputs) inputs[k] = v;
  for (const auto& o : outputs) {
    json m = {{"command", rec.command},
              {"argv", rec.argv},
              {"parameters", rec.parameters},
              {"seed", rec.seed},
              {"input_hash", inputs},
              {"tool_version", SCATLAB_VERSION},
              {"output", o.string()},
              {"outputs", outs}};
    fs::path mp = o;
    mp += ".manifest.json";
    write_file_atomic(mp, m.dump(2) + "\n");
  }
}

void capture_parameters(const CLI::App& sub, RunRecord& rec) {
  for (const CLI::Option* opt : sub.get_options()) {
    std::string name = opt->get_name(false, true);
    if (name == "--help" || name == "-h") continue;
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    if (opt->count() > 0) {
      std::string joined;
      for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
      rec.parameters[name] = joined;
    } else if (!opt->get_default_str().empty()) {
      rec.parameters[name] = opt->get_default_str();
    }
  }
}

std::size_t csv_column_count(const fs::path& path) {
  std::ifstream in(path);
  std::string header;
  if (!std::getline(in, header)) throw InvalidArgument("empty CSV file: " + path.string());
  return static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
}

// "all" stacks every column as an independent block.
// A positive period replaces the single column by its deseasonalized,
// re-integrated levels before any segmentation.
TimeSeries load_input(const std::string& path, const std::string& column, std::size_t block_len,
                      std::size_t period = 0) {
  require_file(path);
  TimeSeries ts;
  if (column == "all") {
    const std::size_t n = csv_column_count(path);
    std::vector<double> stacked;
    std::size_t len = 0;
    for (std::size_t c = 0; c < n; ++c) {
      TimeSeries col = load_csv(path, std::to_string(c));
      if (c == 0) len = col.size();
      if (col.size() != len) throw InvalidArgument("columns differ in length");
      stacked.insert(stacked.end(), col.samples.begin(), col.samples.end());
    }
    ts = TimeSeries::blocks(std::move(stacked), n);
  } else {
    ts = load_csv(path, column);
  }
  if (period > 0) {
    if (ts.n_blocks > 1) throw UsageError("--deseason-period applies to a single column only");
    ts = deseasonalize(ts, period).levels;
  }
  if (block_len > 0) {
    if (ts.n_blocks > 1) throw UsageError("--block-len applies to a single column only");
    ts = segment(ts, block_len);
  }
  return ts;
}

std::shared_ptr<const FilterBank> make_bank(const TimeSeries& ts, int J0, int M, std::size_t n_fft,
                                            const std::string& wavelet) {
  std::size_t n = n_fft;
  if (n == 0) n = next_power_of_two(std::max<std::size_t>(ts.block_len, std::size_t{1} << (M + 2)));
  return std::make_shared<const FilterBank>(
      build_filter_bank(n, std::max(1, J0 + 1), M, parse_wavelet_family(wavelet)));
}

std::pair<double, double> default_bounds(Family f) {
  switch (f) {
    case Family::kPoisson: return {1e-6, 0.5};
    case Family::kFbm: return {0.02, 0.98};
    case Family::kLevyStable: return {1.02, 2.0};
    default: return {0.002, 0.4};
  }
}

// ---- simulate -------------------------------------------------------------

struct SimulateOpts {
  std::string family;
  std::optional<double> theta, H, alpha, lambda2, intensity;
  int integral_scale = 10;
  std::size_t length = 1024;
  std::uint64_t seed = 0;
  std::size_t realizations = 1;
  std::string out = "simulate.csv";
};

void add_simulate(CLI::App& app, SimulateOpts& o) {
  app.add_option("--family", o.family, "poisson, fbm, levy, mrm_cascade, mrm, mrw")->required();
  app.add_option("--theta", o.theta, "model parameter");
  app.add_option("--H", o.H, "Hurst exponent (fbm)");
  app.add_option("--alpha", o.alpha, "stability index (levy)");
  app.add_option("--lambda2", o.lambda2, "intermittency (mrm_cascade, mrm, mrw)");
  app.add_option("--intensity", o.intensity, "jump intensity (poisson)");
  app.add_option("--integral-scale", o.integral_scale, "log2 of the integral scale");
  app.add_option("--length", o.length, "samples per realization");
  app.add_option("--seed", o.seed);
  app.add_option("--realizations", o.realizations);
  app.add_option("--out", o.out, "ensemble CSV, one column per realization");
}

int cmd_simulate(const SimulateOpts& o, RunRecord& rec) {
  ProcessSpec spec;
  spec.family = parse_family(o.family);
  int given = 0;
  for (const auto* v : {&o.theta, &o.H, &o.alpha, &o.lambda2, &o.intensity}) {
    if (*v) {
      spec.theta = **v;
      ++given;
    }
  }
  if (given != 1) throw UsageError("give exactly one of --theta, --H, --alpha, --lambda2, --intensity");
  spec.integral_scale_log2 = o.integral_scale;
  spec.length = o.length;
  spec.seed = o.seed;
  spec.n_realizations = o.realizations;
  spec.validate();
  rec.seed = o.seed;

  const SimulatedEnsemble ens = simulate(spec);
  const fs::path csv = o.out;
  write_csv(csv, ens.series, "x");
  json j = {{"family", to_string(spec.family)},
            {"theta", spec.theta},
            {"integral_scale_log2", spec.integral_scale_log2},
            {"length", spec.length},
            {"seed", spec.seed},
            {"n_realizations", spec.n_realizations},
            {"rng_trace", ens.rng_trace}};
  fs::path spec_path = csv;
  spec_path += ".spec.json";
  write_file_atomic(spec_path, j.dump(2) + "\n");
  write_manifests(rec, {csv, spec_path});
  return kOk;
}

// ---- scatter --------------------------------------------------------------

struct ScatterOpts {
  std::string input;
  std::string column = "0";
  std::size_t block_len = 0;
  std::size_t period = 0;
  int J0 = 0;
  int J = 0;
  std::optional<int> M;
  int order = 2;
  std::size_t n_fft = 0;
  std::string wavelet = "default";
  double derivative = 0.0;
  std::optional<int> reference;
  std::optional<int> fit_lo, fit_hi;
  std::string prefix = "scatter";
};

void add_scatter(CLI::App& app, ScatterOpts& o) {
  app.add_option("--input", o.input, "CSV file")->required();
  app.add_option("--column", o.column, "header name, zero-based index, or 'all'");
  app.add_option("--block-len", o.block_len, "split a single column into blocks");
  app.add_option("--deseason-period", o.period, "divide increments by their phase-wise rms first");
  app.add_option("--J0", o.J0);
  app.add_option("--J", o.J)->required();
  app.add_option("--M", o.M, "averaging scale, default J+1");
  app.add_option("--order", o.order, "1, 2 or 3");
  app.add_option("--n-fft", o.n_fft, "0 picks the smallest admissible size");
  app.add_option("--wavelet", o.wavelet);
  app.add_option("--derivative", o.derivative, "fractional derivative order applied first");
  app.add_option("--reference", o.reference, "first-order normalization scale");
  app.add_option("--fit-lo", o.fit_lo);
  app.add_option("--fit-hi", o.fit_hi);
  app.add_option("--out-prefix", o.prefix);
}

void write_table(const fs::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << "\n";
  }
  write_file_atomic(path, out.str());
}

int cmd_scatter(const ScatterOpts& o, RunRecord& rec) {
  TimeSeries ts = load_input(o.input, o.column, o.block_len, o.period);
  rec.inputs[o.input] = file_digest(o.input);
  if (o.derivative != 0.0) ts = fractional_derivative(ts, o.derivative);
  const int M = o.M.value_or(o.J + 1);
  auto bank = make_bank(ts, o.J0, M, o.n_fft, o.wavelet);
  const ScatteringVector sv = scatter(ts, *bank, o.order, o.J0, o.J);
  const NormalizedScattering ns = normalize(sv, o.reference);

  const fs::path base = o.prefix;
  auto with = [&](const char* suffix) {
    fs::path p = base;
    p += suffix;
    return p;
  };
  std::vector<fs::path> outs = {with(".json"), with(".csv"), with(".normalized.csv"), with(".curves.csv"),
                                with(".summary.json")};
  write_file_atomic(outs[0], scattering_to_json(sv) + "\n");
  write_scattering_csv(outs[1], sv);

  std::vector<std::vector<std::string>> rows;
  for (const auto& [j, v] : ns.order1_norm) {
    rows.push_back({"1", std::to_string(j), "", format_double(v), format_double(std::log2(v))});
  }
  for (const auto& [k, v] : ns.order2_norm) {
    rows.push_back({"2", std::to_string(k.first), std::to_string(k.second), format_double(v),
                    format_double(std::log2(v))});
  }
  write_table(outs[2], {"order", "j1", "j2", "value", "log2_value"}, rows);

  rows.clear();
  for (const auto& [k, v] : ns.order2_norm) {
    rows.push_back({std::to_string(k.first), std::to_string(k.second - k.first), std::to_string(k.second),
                    format_double(std::log2(v))});
  }
  write_table(outs[3], {"j1", "l", "j2", "log2_normalized"}, rows);

  json summary = json::object();
  const int lo = o.fit_lo.value_or(std::max(o.J0 + 1, 2)), hi = o.fit_hi.value_or(o.J);
  try {
    summary["first_order_fit"] = parse_report(to_json(fit_log2_slope(ns.order1_norm, lo, hi)));
  } catch (const InvalidArgument& e) {
    summary["first_order_fit"] = {{"error", e.what()}};
  }
  if (!ns.order2_norm.empty()) {
    try {
      summary["intermittency"] = parse_report(to_json(intermittency_summary(ns)));
    } catch (const InvalidArgument& e) {
      summary["intermittency"] = {{"error", e.what()}};
    }
    try {
      summary["stationarity"] = parse_report(to_json(stationarity_across_scales(ns, 1, o.J - o.J0 - 2)));
    } catch (const InvalidArgument& e) {
      summary["stationarity"] = {{"error", e.what()}};
    }
  }
  summary["omitted"] = ns.omitted;
  summary["reference_scale"] = ns.reference_scale;
  write_file_atomic(outs[4], summary.dump(2) + "\n");
  write_manifests(rec, outs);
  return kOk;
}

// ---- fit ------------------------------------------------------------------

struct FitOpts {
  std::string input;
  std::string column = "0";
  std::size_t block_len = 0;
  std::size_t period = 0;
  std::string estimator;
  std::string family = "mrm";
  int integral_scale = 10;
  std::size_t model_length = 0;
  int J0 = 0;
  int J = 5;
  std::optional<int> M;
  std::size_t n_fft = 0;
  std::string wavelet = "default";
  std::optional<double> lo, hi;
  std::optional<std::size_t> delta;
  std::size_t n_sim = 0;
  std::uint64_t sim_seed = 0;
  std::string kind = "raw";
  std::string weighting = "two-step";
  int j_lo = 1;
  std::optional<int> j_hi;
  int scale = 1;
  std::size_t lag_lo = 2, lag_hi = 512;
  int regr_delta = 3;
  std::string out = "fit.json";
};

void add_fit(CLI::App& app, FitOpts& o) {
  app.add_option("--input", o.input, "CSV file")->required();
  app.add_option("--column", o.column, "header name, zero-based index, or 'all'");
  app.add_option("--block-len", o.block_len);
  app.add_option("--deseason-period", o.period, "divide increments by their phase-wise rms first");
  app.add_option("--estimator", o.estimator)
      ->required()
      ->check(CLI::IsMember({"gmm", "logcov", "wavelet", "scattregr"}));
  app.add_option("--family", o.family, "model family for gmm");
  app.add_option("--integral-scale", o.integral_scale);
  app.add_option("--model-length", o.model_length, "simulated realization length, default block length");
  app.add_option("--J0", o.J0);
  app.add_option("--J", o.J);
  app.add_option("--M", o.M, "default J+1");
  app.add_option("--n-fft", o.n_fft);
  app.add_option("--wavelet", o.wavelet);
  app.add_option("--lo", o.lo, "lower parameter bound");
  app.add_option("--hi", o.hi, "upper parameter bound");
  app.add_option("--delta", o.delta, "window spacing in units of 2^M; blocks are used when absent");
  app.add_option("--n-sim", o.n_sim, "simulated realizations per parameter value");
  app.add_option("--sim-seed", o.sim_seed);
  app.add_option("--kind", o.kind)->check(CLI::IsMember({"raw", "normalized"}));
  app.add_option("--weighting", o.weighting)->check(CLI::IsMember({"two-step", "identity"}));
  app.add_option("--j-lo", o.j_lo, "wavelet regression range");
  app.add_option("--j-hi", o.j_hi);
  app.add_option("--scale", o.scale, "log-covariance scale");
  app.add_option("--lag-lo", o.lag_lo);
  app.add_option("--lag-hi", o.lag_hi);
  app.add_option("--regr-delta", o.regr_delta, "minimum j2 - j1 for the scattering regression");
  app.add_option("--out", o.out);
}

json fit_to_json(const GmmFit& f) {
  json trace = json::array();
  for (const auto& [x, v] : f.objective_trace) trace.push_back({x, number_or_null(v)});
  json W = json::array();
  for (Eigen::Index r = 0; r < f.weight_matrix.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < f.weight_matrix.cols(); ++c) row.push_back(f.weight_matrix(r, c));
    W.push_back(row);
  }
  return {{"theta_hat", f.theta_hat},
          {"theta_one_step", f.theta_one_step},
          {"chi2_red", f.chi2_red},
          {"dof", f.dof},
          {"p_value", f.p_value ? json(*f.p_value) : json(nullptr)},
          {"regularized", f.regularized},
          {"mc_relative_error", f.mc_relative_error},
          {"n_blocks", f.n_blocks},
          {"n_moments", f.n_moments},
          {"warnings", f.warnings},
          {"objective_trace", trace},
          {"weight_matrix", W}};
}

int cmd_fit(const FitOpts& o, RunRecord& rec) {
  TimeSeries ts = load_input(o.input, o.column, o.block_len, o.period);
  rec.inputs[o.input] = file_digest(o.input);
  rec.seed = o.sim_seed;
  const int M = o.M.value_or(o.J + 1);
  json out = {{"estimator", o.estimator}};

  if (o.estimator == "gmm") {
    auto bank = make_bank(ts, o.J0, M, o.n_fft, o.wavelet);
    ProcessSpec model;
    model.family = parse_family(o.family);
    model.integral_scale_log2 = o.integral_scale;
    model.length = o.model_length;
    const MomentKind kind = o.kind == "raw" ? MomentKind::kRaw : MomentKind::kNormalized;
    MomentCondition mc = make_moment_condition(ts, bank, o.J0, o.J, model, o.delta, kind);
    mc.n_sim = o.n_sim;
    mc.sim_seed = o.sim_seed;
    const auto [dlo, dhi] = default_bounds(model.family);
    ScalarSearch search;
    search.lo = o.lo.value_or(dlo);
    search.hi = o.hi.value_or(dhi);
    const GmmFit fit = o.weighting == "identity" ? gmm_identity(mc, search) : gmm_two_step(mc, search);
    out.update(fit_to_json(fit));
    out["family"] = to_string(model.family);
    out["kind"] = o.kind;
    out["weighting"] = o.weighting;
    out["J0"] = o.J0;
    out["J"] = o.J;
    out["independent_blocks"] = mc.independent_blocks;
    out["simulations"] = mc.simulations();
  } else if (o.estimator == "wavelet" || o.estimator == "logcov") {
    const int j_hi = o.j_hi.value_or(o.J);
    auto bank = make_bank(ts, 0, std::max(M, j_hi + 1), o.n_fft, o.wavelet);
    const RegressionEstimate r = o.estimator == "wavelet"
                                     ? wavelet_moment_regression(ts, *bank, o.j_lo, j_hi)
                                     : log_covariance_regression(ts, *bank, o.scale, o.lag_lo, o.lag_hi);
    out["lambda2"] = r.value;
    out["slope"] = r.slope;
    out["slope_stderr"] = r.slope_stderr;
    out["points"] = r.points;
    out["dropped"] = r.dropped;
  } else {
    auto bank = make_bank(ts, o.J0, M, o.n_fft, o.wavelet);
    const NormalizedScattering ns = normalize(scatter(ts, *bank, 2, o.J0, o.J));
    const AlphaEstimate a = scattering_slope_regression(ns, o.regr_delta);
    out["alpha"] = a.alpha;
    out["inverse_alpha"] = a.inverse_alpha;
    out["order1_slope"] = a.order1_slope;
    out["order2_slope"] = a.order2_slope;
  }
  write_file_atomic(o.out, out.dump(2) + "\n");
  write_manifests(rec, {o.out});
  return kOk;
}

// ---- verify-bank ----------------------------------------------------------

struct VerifyOpts {
  std::size_t n_fft = 1 << 14;
  int j_min = 1;
  int M = 10;
  std::string wavelet = "default";
  std::string phi = "default";
  std::string out = "bank_certificate.json";
  std::string export_bank;
};

void add_verify(CLI::App& app, VerifyOpts& o) {
  app.add_option("--n-fft", o.n_fft);
  app.add_option("--j-min", o.j_min);
  app.add_option("--M", o.M);
  app.add_option("--wavelet", o.wavelet);
  app.add_option("--phi", o.phi, "default or allpass (a deliberately broken window)")
      ->check(CLI::IsMember({"default", "allpass"}));
  app.add_option("--out", o.out);
  app.add_option("--export-bank", o.export_bank, "also write the filter responses as JSON");
}

int cmd_verify_bank(const VerifyOpts& o, RunRecord& rec) {
  FilterBank bank = build_filter_bank(o.n_fft, o.j_min, o.M, parse_wavelet_family(o.wavelet));
  if (o.phi == "allpass") bank = with_allpass_phi(std::move(bank));
  const BankCertificate c = certify(bank);
  const LittlewoodPaleyReport lp = verify_littlewood_paley(bank);
  json octaves = json::array();
  for (const auto& d : lp.per_octave) {
    octaves.push_back({{"octave", d.octave}, {"max_deviation", d.max_deviation}, {"covered", d.covered}});
  }
  json j = {{"wavelet", to_string(bank.family)},
            {"n_fft", bank.n_fft},
            {"j_min", bank.j_min},
            {"M", bank.M},
            {"phi", o.phi},
            {"lp_defect", c.lp_defect},
            {"lp_ok", c.lp_ok},
            {"lp_per_octave", octaves},
            {"phi_ok", c.phi.ok},
            {"phi_margin", c.phi.margin},
            {"phi_worst_bin", c.phi.worst_bin},
            {"vanishing_moments", c.moments},
            {"moments_ok", c.moments_ok},
            {"analyticity_ratio", c.analyticity_ratio},
            {"analyticity_ok", c.analyticity_ok},
            {"ok", c.ok()}};
  std::vector<fs::path> outs = {o.out};
  write_file_atomic(o.out, j.dump(2) + "\n");
  if (!o.export_bank.empty()) {
    write_file_atomic(o.export_bank, bank_to_json(bank) + "\n");
    outs.emplace_back(o.export_bank);
  }
  write_manifests(rec, outs);
  if (!c.ok()) {
    std::cerr << "filter bank certificate failed (see " << o.out << ")\n";
    return kRuntimeError;
  }
  return kOk;
}

// ---- replay ---------------------------------------------------------------

int cmd_replay(const std::string& manifest_path) {
  require_file(manifest_path);
  const json m = json::parse(read_file(manifest_path));
  const auto argv = m.at("argv").get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "replay") throw UsageError("manifest records a replay");
  const int code = run(argv);
  if (code != kOk) return code;
  int mismatches = 0;
  for (const auto& [path, digest] : m.at("outputs").items()) {
    const std::string now = fs::exists(path) ? file_digest(path) : std::string("missing");
    if (now != digest.get<std::string>()) {
      std::cerr << "digest mismatch: " << path << "\n";
      ++mismatches;
    }
  }
  if (mismatches) return kRuntimeError;
  std::cout << "replay reproduced " << m.at("outputs").size() << " output(s)\n";
  return kOk;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    throw RuntimeError("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Wavelet scattering moments: simulation, estimation and fitting"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", SCATLAB_VERSION);

  SimulateOpts sim;
  ScatterOpts sc;
  FitOpts fit;
  VerifyOpts ver;
  std::string manifest;
  CLI::App* s_sim = app.add_subcommand("simulate", "simulate an ensemble of a process family");
  CLI::App* s_sc = app.add_subcommand("scatter", "scattering moments of a CSV series");
  CLI::App* s_fit = app.add_subcommand("fit", "estimate a model parameter");
  CLI::App* s_ver = app.add_subcommand("verify-bank", "certify the filter bank");
  CLI::App* s_rep = app.add_subcommand("replay", "re-run a manifest and compare digests");
  add_simulate(*s_sim, sim);
  add_scatter(*s_sc, sc);
  add_fit(*s_fit, fit);
  add_verify(*s_ver, ver);
  s_rep->add_option("manifest", manifest)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  RunRecord rec;
  rec.argv = args;
  try {
    if (*s_rep) return cmd_replay(manifest);
    CLI::App* chosen = app.get_subcommands().front();
    rec.command = chosen->get_name();
    capture_parameters(*chosen, rec);
    if (*s_sim) return cmd_simulate(sim, rec);
    if (*s_sc) return cmd_scatter(sc, rec);
    if (*s_fit) return cmd_fit(fit, rec);
    return cmd_verify_bank(ver, rec);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace scatlab::cli
