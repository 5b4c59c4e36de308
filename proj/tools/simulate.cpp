#include <algorithm>
#include <cmath>
#include <sstream>

#include "commands.hpp"
#include "lgeo/error.hpp"
#include "lgeo/io/config.hpp"
#include "lgeo/marchenko_pastur.hpp"
#include "lgeo/observables.hpp"
#include "lgeo/synth.hpp"
#include "lgeo/version.hpp"

namespace lgeo::cli {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

std::size_t get_size(const io::KeyValueConfig& kv, const std::string& key, std::size_t fallback) {
  const long long v = kv.get_int(key, static_cast<long long>(fallback));
  if (v < 0) throw ConfigError(key + " must be >= 0");
  return static_cast<std::size_t>(v);
}

std::uint64_t get_seed(const io::KeyValueConfig& kv, std::optional<std::uint64_t> cli_seed) {
  if (cli_seed) return *cli_seed;
  return static_cast<std::uint64_t>(kv.get_int("seed", 1));
}

Spectrum spectrum_of(const Matrix& C) { return Spectrum(symmetric_eigenvalues(C)); }

io::LayerDiagnostics spectral_row(const std::string& model, int layer, const Spectrum& s) {
  io::LayerDiagnostics row;
  row.model_id = model;
  row.layer = layer;
  row.entropy = spectral_entropy(s);
  row.effective_rank = effective_rank(s);
  row.pr_dimension = pr_dimension(s);
  return row;
}

void add_sample_omega(io::LayerDiagnostics& row, const ActivationMatrix& X) {
  double sum = 0.0, sum_sq = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  Vector h(X.data.cols());
  for (Eigen::Index i = 0; i < X.data.rows(); ++i) {
    h = X.data.row(i).transpose();
    const double w = omega(std::span<const double>(h.data(), static_cast<std::size_t>(h.size())));
    sum += w;
    sum_sq += w * w;
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  const double n = static_cast<double>(X.data.rows());
  row.n = X.rows();
  row.omega_mean = sum / n;
  row.omega_var = std::max(0.0, sum_sq / n - (sum / n) * (sum / n));
  row.omega_min = lo;
  row.omega_max = hi;
}

io::ReportDocument simulate_contraction(const io::KeyValueConfig& kv, std::uint64_t seed) {
  kv.require_known({"d", "k", "q", "sigma_perp2", "sigma_par2", "coupling", "steps", "seed",
                    "scalar_transverse", "particles"});
  synth::ContractionConfig cfg;
  cfg.d = get_size(kv, "d", cfg.d);
  cfg.k = get_size(kv, "k", cfg.k);
  cfg.q = kv.get_double("q", cfg.q);
  cfg.sigma_perp2 = kv.get_double("sigma_perp2", cfg.sigma_perp2);
  cfg.sigma_par2 = kv.get_double("sigma_par2", cfg.sigma_par2);
  cfg.coupling = kv.get_double("coupling", cfg.coupling);
  cfg.steps = get_size(kv, "steps", cfg.steps);
  cfg.scalar_transverse = kv.get_bool("scalar_transverse", cfg.scalar_transverse);
  cfg.seed = seed;
  cfg.validate();
  const std::size_t particles = get_size(kv, "particles", 0);

  io::ReportDocument doc;
  const auto ops = synth::contraction_operators(cfg);
  const auto covs = synth::run_contraction(cfg);
  std::vector<ActivationMatrix> ensemble;
  if (particles > 0) ensemble = synth::sample_contraction(cfg, particles);

  const double trace0 = synth::transverse_block(covs.front().entries, cfg.k).trace();
  const double q2 = cfg.q * cfg.q;
  bool psd_ok = true, spectral_ok = true, noise_ok = true, norm_ok = true, trace_ok = true;
  double worst_psd = 0.0, worst_trace_ratio = 0.0, worst_norm = 0.0;
  std::vector<double> traces, bounds;
  for (std::size_t l = 0; l < covs.size(); ++l) {
    const Matrix& C = covs[l].entries;
    const Matrix Cp = synth::transverse_block(C, cfg.k);
    const double tr = Cp.trace();
    const double bound = synth::transverse_trace_bound(cfg, trace0, l);
    traces.push_back(tr);
    bounds.push_back(bound);
    if (tr > bound * (1.0 + 1e-12) + 1e-300) trace_ok = false;
    if (bound > 0.0) worst_trace_ratio = std::max(worst_trace_ratio, tr / bound);

    auto row = spectral_row("contraction", static_cast<int>(l), spectrum_of(C));
    row.gamma = cfg.steps > 0 ? double(l) / double(cfg.steps) : 0.0;
    if (particles > 0) add_sample_omega(row, ensemble[l]);
    doc.layers.push_back(row);

    if (l + 1 == covs.size() || cfg.transverse_dim() == 0) continue;
    const auto& op = ops[l];
    const Matrix Sp = synth::transverse_block(op.Sigma, cfg.k);
    const Matrix next = synth::transverse_block(covs[l + 1].entries, cfg.k);
    const double floor = -1e-9 * Cp.norm();
    const double gap = symmetric_eigenvalues(q2 * Cp + Sp - next).back();
    worst_psd = std::min(worst_psd, gap / std::max(Cp.norm(), 1e-300));
    if (gap < floor) psd_ok = false;
    const double top_next = symmetric_eigenvalues(next - Sp).front();
    const double top_now = symmetric_eigenvalues(Cp).front();
    if (top_next > q2 * top_now + 1e-9 * Cp.norm()) spectral_ok = false;
    const auto sig = symmetric_eigenvalues(cfg.sigma_perp2 * Matrix::Identity(Sp.rows(), Sp.cols()) - Sp);
    if (sig.back() < -1e-12 * std::max(1.0, cfg.sigma_perp2)) noise_ok = false;
    worst_norm = std::max(worst_norm, op.transverse_norm);
    if (op.transverse_norm > cfg.q * (1.0 + 1e-10)) norm_ok = false;
  }
  doc.series.emplace_back("transverse_trace", traces);
  doc.series.emplace_back("transverse_trace_bound", bounds);
  doc.checks.push_back({"transverse_norm", norm_ok, "max ||A_perp|| = " + fmt(worst_norm) + ", q = " + fmt(cfg.q)});
  doc.checks.push_back({"transverse_noise_bound", noise_ok, "Sigma_perp <= sigma_perp2 Id"});
  // The Loewner form C' <= q^2 C + Sigma needs A_perp proportional to the
  // identity; for general contractions only its norm and trace forms hold.
  if (cfg.scalar_transverse) {
    doc.checks.push_back({"psd_recursion", psd_ok,
                          "min eigenvalue of q^2 C + Sigma - C', relative = " + fmt(worst_psd)});
  }
  doc.checks.push_back({"spectral_recursion", spectral_ok, "||C' - Sigma|| <= q^2 ||C||"});
  doc.checks.push_back({"trace_bound", trace_ok, "max trace / bound = " + fmt(worst_trace_ratio)});

  if (cfg.sigma_perp2 == 0.0 && cfg.q > 0.0 && cfg.transverse_dim() > 0) {
    const auto needed = static_cast<std::size_t>(std::ceil(std::log(1e-6) / std::log(q2)));
    if (cfg.steps >= needed) {
      const Matrix& last = covs.back().entries;
      const double full = effective_rank(spectrum_of(last));
      const double par = effective_rank(spectrum_of(synth::parallel_block(last, cfg.k)));
      doc.checks.push_back({"parallel_collapse", std::abs(full - par) <= 0.5,
                            "R_eff " + fmt(full) + " vs parallel block " + fmt(par)});
    }
  }
  doc.scalars = {{"order_recursion_min_gap", worst_psd},
                 {"final_transverse_trace", traces.back()},
                 {"asymptotic_bound",
                  double(cfg.transverse_dim()) * cfg.sigma_perp2 / (1.0 - q2)}};
  return doc;
}

Matrix parse_prototypes(const std::string& text) {
  // Rows separated by ';', entries by ','.
  std::vector<std::vector<double>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    io::KeyValueConfig tmp;
    tmp.set("row", row);
    rows.push_back(tmp.get_doubles("row"));
  }
  if (rows.empty()) throw ConfigError("prototypes: empty");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw ConfigError("prototypes: ragged rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

io::ReportDocument simulate_mixture(const io::KeyValueConfig& kv, std::uint64_t seed) {
  kv.require_known({"probs", "prototypes", "d", "prototype_scale", "sigma2", "samples", "seed"});
  synth::MixtureConfig cfg;
  if (!kv.has("probs")) throw ConfigError("mixture: probs is required");
  cfg.probs = kv.get_doubles("probs");
  cfg.sigma2 = kv.get_double("sigma2", cfg.sigma2);
  cfg.samples = get_size(kv, "samples", cfg.samples);
  cfg.seed = seed;
  if (kv.has("prototypes")) {
    if (kv.has("d") || kv.has("prototype_scale")) {
      throw ConfigError("mixture: prototypes excludes d and prototype_scale");
    }
    cfg.prototypes = parse_prototypes(kv.get_string("prototypes", ""));
  } else {
    const std::size_t d = get_size(kv, "d", 16);
    const double scale = kv.get_double("prototype_scale", 3.0);
    // Prototype norms concentrate around `scale`.
    cfg.prototypes = Matrix::Zero(cfg.probs.size(), d);
    const auto basis = synth::random_orthonormal(d, std::min(d, cfg.probs.size()), seed ^ 0x5bd1e995ULL);
    for (std::size_t i = 0; i < basis.size(); ++i) cfg.prototypes.row(i) = scale * basis[i].transpose();
  }
  cfg.validate();

  io::ReportDocument doc;
  const std::size_t k = cfg.k();
  const double d = static_cast<double>(cfg.d());
  const Matrix centered = synth::centered_prototypes(cfg);
  Vector weighted = Vector::Zero(centered.cols());
  for (std::size_t i = 0; i < k; ++i) weighted += cfg.probs[i] * centered.row(i).transpose();
  const double scale = std::max(1.0, cfg.prototypes.rowwise().norm().maxCoeff());
  doc.checks.push_back({"centering_identity", weighted.norm() <= 1e-12 * scale,
                        "|sum p_i c_i| = " + fmt(weighted.norm())});

  const auto pop = symmetric_eigenvalues(synth::mixture_population_cov(cfg).entries);
  const auto pop_rank = static_cast<std::size_t>(
      std::count_if(pop.begin(), pop.end(), [&](double v) { return v > cfg.sigma2 + 1e-9; }));
  doc.checks.push_back({"population_rank", pop_rank + 1 <= k,
                        std::to_string(pop_rank) + " eigenvalues above sigma2, k = " + std::to_string(k)});

  const auto X = synth::sample_mixture(cfg);
  const Spectrum s = covariance_spectrum(X);
  const double fence = cfg.sigma2 * std::pow(1.0 + std::sqrt(d / double(cfg.samples)), 2) * 1.05;
  const auto sample_count = static_cast<std::size_t>(std::count_if(
      s.eigenvalues().begin(), s.eigenvalues().end(), [&](double v) { return v > fence; }));
  doc.checks.push_back({"sample_outliers", sample_count + 1 <= k,
                        std::to_string(sample_count) + " sample eigenvalues above " + fmt(fence)});

  auto row = spectral_row("mixture", 0, s);
  add_sample_omega(row, X);
  doc.layers.push_back(row);
  doc.series.emplace_back("population_eigenvalues", pop);
  doc.series.emplace_back("sample_eigenvalues", s.eigenvalues());
  doc.scalars = {{"population_rank", double(pop_rank)},
                 {"sample_outliers", double(sample_count)},
                 {"fence", fence}};
  return doc;
}

io::ReportDocument simulate_spiked(const io::KeyValueConfig& kv, std::uint64_t seed) {
  kv.require_known({"sigma2", "thetas", "d", "T", "seed", "margin"});
  synth::SpikedConfig cfg;
  cfg.sigma2 = kv.get_double("sigma2", cfg.sigma2);
  cfg.d = get_size(kv, "d", cfg.d);
  cfg.T = get_size(kv, "T", cfg.T);
  cfg.seed = seed;
  std::vector<double> thetas = kv.has("thetas") ? kv.get_doubles("thetas") : std::vector<double>{};
  std::sort(thetas.begin(), thetas.end(), std::greater<>());
  if (thetas.size() > cfg.d) throw ConfigError("spiked: more spikes than dimensions");
  const auto dirs = synth::random_orthonormal(cfg.d, thetas.size(), seed ^ 0x2545f4914f6cdd1dULL);
  for (std::size_t r = 0; r < thetas.size(); ++r) cfg.spikes.push_back({thetas[r], dirs[r]});
  cfg.validate();
  const double margin = kv.get_double("margin", rmt::kDefaultSpikeMargin);

  io::ReportDocument doc;
  const auto X = synth::sample_spiked(cfg);
  const Spectrum s = covariance_spectrum(X);
  const double c = double(cfg.d) / double(cfg.T);
  const rmt::MPModel truth(cfg.sigma2, c);
  const auto fitted = rmt::fit_sigma2(s, c);
  const auto spikes = rmt::detect_spikes(s, fitted, margin);

  std::vector<double> predicted;
  for (double th : thetas) {
    const auto p = rmt::bbp_predict(truth, th);
    if (p.detectable) predicted.push_back(*p.predicted_outlier);
  }
  doc.checks.push_back({"bbp_detectability", spikes.count() == predicted.size(),
                        std::to_string(spikes.count()) + " detected, " + std::to_string(predicted.size()) +
                            " predicted"});
  double worst = 0.0;
  for (std::size_t r = 0; r < predicted.size() && r < s.size(); ++r) {
    worst = std::max(worst, std::abs(s[r] - predicted[r]) / predicted[r]);
  }
  doc.checks.push_back({"bbp_location", worst <= 0.05, "max relative error " + fmt(worst)});

  auto row = spectral_row("spiked", 0, s);
  row.n = X.rows();
  row.spike_count = spikes.count();
  row.ks = rmt::ks_statistic(s, fitted);
  doc.layers.push_back(row);
  doc.mp = fitted;
  doc.series.emplace_back("predicted_outliers", predicted);
  std::vector<double> observed;
  for (const auto& sp : spikes.outliers) observed.push_back(sp.eigenvalue);
  doc.series.emplace_back("detected_outliers", observed);
  doc.scalars = {{"sigma2_hat", fitted.sigma2()}, {"lambda_plus", fitted.lambda_plus()}, {"c", c}};
  return doc;
}

}  // namespace

io::ReportDocument cmd_simulate(const std::string& kind, const std::string& config,
                                std::optional<std::uint64_t> seed) {
  const auto kv = io::KeyValueConfig::load(config);
  const std::uint64_t s = get_seed(kv, seed);
  io::ReportDocument doc;
  if (kind == "contraction") {
    doc = simulate_contraction(kv, s);
  } else if (kind == "mixture") {
    doc = simulate_mixture(kv, s);
  } else if (kind == "spiked") {
    doc = simulate_spiked(kv, s);
  } else {
    throw InputError("unknown simulation '" + kind + "'");
  }
  doc.tool_version = kVersion;
  doc.command = "simulate " + kind;
  doc.config = kv.entries();
  doc.config["seed"] = std::to_string(s);
  return doc;
}

}  // namespace lgeo::cli
