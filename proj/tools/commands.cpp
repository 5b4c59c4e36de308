#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "lgeo/attention.hpp"
#include "lgeo/error.hpp"
#include "lgeo/io/activation_file.hpp"
#include "lgeo/io/dataset.hpp"
#include "lgeo/io/profile_csv.hpp"
#include "lgeo/marchenko_pastur.hpp"
#include "lgeo/observables.hpp"
#include "lgeo/phase.hpp"
#include "lgeo/version.hpp"
#include "text_input.hpp"

namespace lgeo::cli {

namespace {

io::ReportDocument make_doc(std::string command) {
  io::ReportDocument doc;
  doc.tool_version = kVersion;
  doc.command = std::move(command);
  return doc;
}

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

std::string series_name(const std::string& base, const ActivationMatrix& X, bool prefixed) {
  return prefixed ? "L" + std::to_string(X.layer) + "." + base : base;
}

bool has_extension(const std::string& path, const std::string& ext) {
  return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
}

io::LayerDiagnostics layer_row(const ActivationMatrix& X) {
  io::LayerDiagnostics row;
  row.model_id = X.model_id;
  row.layer = X.layer;
  row.n = X.rows();
  return row;
}

void add_omega_stats(io::LayerDiagnostics& row, const ActivationMatrix& X) {
  double mean = 0.0, m2 = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  Vector h(X.data.cols());
  for (Eigen::Index i = 0; i < X.data.rows(); ++i) {
    h = X.data.row(i).transpose();
    const double w = omega(std::span<const double>(h.data(), static_cast<std::size_t>(h.size())));
    const double delta = w - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (w - mean);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  row.omega_mean = mean;
  row.omega_var = m2 / static_cast<double>(X.data.rows());
  row.omega_min = lo;
  row.omega_max = hi;
}

void add_profile_rows(io::ReportDocument& doc, const phase::DepthProfile& p) {
  for (const auto& pt : p.points) {
    io::LayerDiagnostics row;
    row.model_id = p.model_id;
    row.layer = pt.layer;
    row.gamma = pt.gamma;
    row.n = pt.n;
    row.omega_mean = pt.mean_omega;
    row.omega_var = pt.var_omega;
    doc.layers.push_back(row);
  }
}

}  // namespace

std::vector<ActivationMatrix> load_layers(const std::vector<std::string>& files) {
  if (files.empty()) throw InputError("no activation files given");
  std::vector<std::future<ActivationMatrix>> pending;
  pending.reserve(files.size());
  for (const auto& f : files) {
    pending.push_back(std::async(std::launch::async, [f] { return io::read_activations(f); }));
  }
  std::vector<ActivationMatrix> out;
  out.reserve(files.size());
  for (auto& fut : pending) out.push_back(fut.get());
  std::stable_sort(out.begin(), out.end(),
                   [](const ActivationMatrix& a, const ActivationMatrix& b) { return a.layer < b.layer; });
  return out;
}

io::ReportDocument cmd_omega(const std::vector<std::string>& files) {
  auto doc = make_doc("omega");
  for (const auto& X : load_layers(files)) {
    validate_activations(X);
    auto row = layer_row(X);
    add_omega_stats(row, X);
    doc.layers.push_back(row);
  }
  return doc;
}

io::ReportDocument cmd_spectrum(const std::vector<std::string>& files, int bins, GramMode gram) {
  if (bins < 1) throw InputError("--bins must be >= 1");
  auto doc = make_doc("spectrum");
  doc.config["bins"] = std::to_string(bins);
  doc.config["gram"] = gram == GramMode::Auto ? "auto" : gram == GramMode::On ? "on" : "off";
  const auto layers = load_layers(files);
  const bool prefixed = layers.size() > 1;
  for (const auto& X : layers) {
    const Spectrum s = covariance_spectrum(X, gram);
    auto row = layer_row(X);
    row.entropy = spectral_entropy(s);
    row.effective_rank = effective_rank(s);
    row.pr_dimension = pr_dimension(s);
    doc.layers.push_back(row);
    const ESDHistogram h = esd(s, bins);
    doc.series.emplace_back(series_name("eigenvalues", X, prefixed), s.eigenvalues());
    doc.series.emplace_back(series_name("esd_edges", X, prefixed), h.bin_edges);
    doc.series.emplace_back(series_name("esd_density", X, prefixed), h.densities);
  }
  return doc;
}

io::ReportDocument cmd_mp_fit(const std::vector<std::string>& files, double margin) {
  if (!(margin >= 0.0)) throw InputError("--margin must be >= 0");
  auto doc = make_doc("mp-fit");
  doc.config["margin"] = num(margin);
  const auto layers = load_layers(files);
  const bool prefixed = layers.size() > 1;
  for (const auto& X : layers) {
    const Spectrum s = covariance_spectrum(X);
    const double c = static_cast<double>(X.cols()) / static_cast<double>(X.rows());
    const auto model = rmt::fit_sigma2(s, c);
    const auto spikes = rmt::detect_spikes(s, model, margin);
    const double ks = rmt::ks_statistic(s, model);
    auto row = layer_row(X);
    row.spike_count = spikes.count();
    row.ks = ks;
    doc.layers.push_back(row);
    std::vector<double> values;
    for (const auto& sp : spikes.outliers) values.push_back(sp.eigenvalue);
    doc.series.emplace_back(series_name("spikes", X, prefixed), values);
    if (!prefixed) {
      doc.mp = model;
      doc.scalars = {{"sigma2", model.sigma2()},         {"c", c},
                     {"lambda_minus", model.lambda_minus()}, {"lambda_plus", model.lambda_plus()},
                     {"ks", ks},                          {"spike_count", double(spikes.count())}};
    }
  }
  return doc;
}

io::ReportDocument cmd_critical_depth(const CriticalDepthArgs& args) {
  auto doc = make_doc("critical-depth");
  doc.config["tau"] = num(args.tau);
  phase::DepthProfile profile;
  if (!args.embedded.empty()) {
    if (!args.inputs.empty()) throw InputError("give either --embedded or input files, not both");
    doc.config["source"] = "embedded:" + args.embedded;
    profile = io::embedded_profile(args.embedded);
  } else if (args.inputs.empty()) {
    throw InputError("critical-depth needs a profile CSV, .lga files or --embedded MODEL");
  } else if (std::all_of(args.inputs.begin(), args.inputs.end(),
                         [](const std::string& f) { return has_extension(f, ".lga"); })) {
    const auto layers = load_layers(args.inputs);
    profile = phase::build_profile(layers, args.total_layers);
    doc.config["source"] = "activations";
  } else {
    if (args.inputs.size() != 1) throw InputError("critical-depth takes a single profile CSV");
    doc.config["source"] = args.inputs.front();
    auto profiles = io::read_profile_csv(args.inputs.front());
    if (profiles.empty()) throw InputError("profile CSV has no rows");
    if (args.model.empty()) {
      if (profiles.size() > 1) throw InputError("CSV holds several models; select one with --model");
      profile = std::move(profiles.front());
    } else {
      const auto it = std::find_if(profiles.begin(), profiles.end(),
                                   [&](const phase::DepthProfile& p) { return p.model_id == args.model; });
      if (it == profiles.end()) throw InputError("model '" + args.model + "' not in CSV");
      profile = std::move(*it);
    }
    if (args.total_layers > 0) {
      profile = phase::make_profile(profile.model_id, profile.points, args.total_layers);
    }
  }
  const auto report = phase::critical_depth(profile, args.tau);
  add_profile_rows(doc, profile);
  doc.phase = report;
  doc.scalars = {{"gamma_c_hat", report.gamma_c_hat},
                 {"jump_magnitude", report.jump_magnitude},
                 {"total_layers", double(report.total_layers)}};
  return doc;
}

io::ReportDocument cmd_attention(const std::string& energies, std::optional<double> beta) {
  auto doc = make_doc("attention");
  const attn::EnergyVector e(read_numbers(energies), beta.value_or(1.0));
  doc.config["beta"] = num(e.beta());
  const auto p = attn::gibbs(e);
  const double f = attn::free_energy(p, e);
  const double target = -e.log_partition() / e.beta();
  doc.series.emplace_back("weights", p.probs());
  doc.scalars = {{"beta", e.beta()},
                 {"log_partition", e.log_partition()},
                 {"free_energy", f},
                 {"identity_residual", std::abs(f - target)},
                 {"entropy", attn::shannon_entropy(p)}};
  return doc;
}

io::ReportDocument cmd_fisher(const FisherArgs& args) {
  auto doc = make_doc("fisher");
  const auto head = read_linear_head(args.head);
  const auto hv = read_numbers(args.h);
  const Vector h = Eigen::Map<const Vector>(hv.data(), static_cast<Eigen::Index>(hv.size()));
  const Matrix G = attn::fisher_linear_head(head, h);
  const auto eig = symmetric_eigenvalues(G);
  const double tol = 1e-9 * std::max(1.0, std::abs(eig.front()));
  const auto rank = static_cast<std::size_t>(
      std::count_if(eig.begin(), eig.end(), [tol](double v) { return v > tol; }));
  const auto V = static_cast<std::size_t>(head.weight.rows());
  const auto d = static_cast<std::size_t>(head.weight.cols());
  doc.series.emplace_back("eigenvalues", eig);
  doc.scalars = {{"rank", double(rank)}, {"classes", double(V)}, {"dimension", double(d)}};
  doc.checks.push_back({"psd", eig.back() >= -1e-10, "min eigenvalue " + num(eig.back())});
  doc.checks.push_back({"rank_bound", rank <= std::min(d, V - 1),
                        "rank " + std::to_string(rank) + " <= " + std::to_string(std::min(d, V - 1))});
  if (args.mc > 0) {
    doc.config["mc"] = std::to_string(args.mc);
    doc.config["seed"] = std::to_string(args.seed);
    const Matrix est = attn::fisher_monte_carlo(head, h, args.mc, args.seed);
    const double norm = G.norm();
    const double resid = (G - est).norm() / (norm > 0.0 ? norm : 1.0);
    doc.scalars.emplace_back("mc_relative_residual", resid);
  }
  return doc;
}

io::ReportDocument cmd_fss(const std::string& curves_path, int bins) {
  auto doc = make_doc("fss");
  doc.config["bins"] = std::to_string(bins);
  const auto curves = io::read_fss_csv(curves_path);
  phase::FSSOptions opts;
  opts.bins = bins;
  const auto fit = phase::fss_collapse(curves, opts);
  for (const auto& c : curves) add_profile_rows(doc, c.profile);
  doc.scalars = {{"beta_over_nu", fit.beta_over_nu},
                 {"one_over_nu", fit.one_over_nu},
                 {"nu", 1.0 / fit.one_over_nu},
                 {"gamma_c", fit.gamma_c},
                 {"collapse_residual", fit.collapse_residual},
                 {"evaluations", double(fit.evaluations)}};
  return doc;
}

}  // namespace lgeo::cli
