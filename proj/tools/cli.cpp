#include "cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "lgeo/error.hpp"
#include "lgeo/version.hpp"

namespace lgeo::cli {

namespace {

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw InputError("write to " + path + " failed");
}

GramMode parse_gram(const std::string& s) {
  if (s == "on") return GramMode::On;
  if (s == "off") return GramMode::Off;
  return GramMode::Auto;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometry and spectral diagnostics for layer activations", "lgeo"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  std::string format = "json";
  std::string out_path;
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "gnuplot"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "Write the report to PATH instead of stdout");

  std::vector<std::string> files;
  int bins = 50;
  std::string gram = "auto";
  double margin = rmt::kDefaultSpikeMargin;
  CriticalDepthArgs depth;
  std::string sim_kind, sim_config;
  std::optional<std::uint64_t> sim_seed;
  std::string energies;
  std::optional<double> beta;
  FisherArgs fisher;
  std::string curves;
  int fss_bins = 20;

  auto* omega = app.add_subcommand("omega", "Per-row Omega summary of activation files");
  omega->add_option("files", files, "LGA1 activation files")->required()->check(CLI::ExistingFile);

  auto* spectrum = app.add_subcommand("spectrum", "Covariance spectrum and spectral observables");
  spectrum->add_option("files", files, "LGA1 activation files")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--bins", bins, "ESD histogram bins")->capture_default_str();
  spectrum->add_option("--gram", gram, "Use the T x T Gram path")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();

  auto* mpfit = app.add_subcommand("mp-fit", "Marchenko-Pastur bulk fit and spike detection");
  mpfit->add_option("files", files, "LGA1 activation files")->required()->check(CLI::ExistingFile);
  mpfit->add_option("--margin", margin, "Relative margin above the bulk edge")->capture_default_str();

  auto* cdepth = app.add_subcommand("critical-depth", "Largest Omega jump and threshold class");
  cdepth->add_option("inputs", depth.inputs, "Profile CSV or LGA1 files")->check(CLI::ExistingFile);
  cdepth->add_option("--embedded", depth.embedded, "Use a built-in model signature");
  cdepth->add_option("--model", depth.model, "Model to select from a multi-model CSV");
  cdepth->add_option("--tau", depth.tau, "Omega threshold")->capture_default_str();
  cdepth->add_option("--total-layers", depth.total_layers, "Layer count L used for gamma = l/L");

  auto* simulate = app.add_subcommand("simulate", "Synthetic run with invariant checks");
  simulate->add_option("kind", sim_kind, "contraction, mixture or spiked")
      ->required()
      ->check(CLI::IsMember({"contraction", "mixture", "spiked"}));
  simulate->add_option("--config", sim_config, "key = value config file")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim_seed, "Override the config seed");

  auto* attention = app.add_subcommand("attention", "Gibbs weights and free energy");
  attention->add_option("--energies", energies, "File of energies, comma or whitespace separated")
      ->required()
      ->check(CLI::ExistingFile);
  attention->add_option("--beta", beta, "Inverse temperature (default 1)");

  auto* fisher_cmd = app.add_subcommand("fisher", "Fisher metric of a linear softmax head");
  fisher_cmd->set_help_flag("--help", "Print this help message and exit");
  fisher_cmd->add_option("--head", fisher.head, "Weight matrix (text) or JSON {weight, bias}")
      ->required()
      ->check(CLI::ExistingFile);
  fisher_cmd->add_option("--h", fisher.h, "Latent vector file")->required()->check(CLI::ExistingFile);
  fisher_cmd->add_option("--mc", fisher.mc, "Monte-Carlo samples for the oracle residual");
  fisher_cmd->add_option("--seed", fisher.seed, "Monte-Carlo seed")->capture_default_str();

  auto* fss = app.add_subcommand("fss", "Finite-size scaling collapse fit");
  fss->add_option("--curves", curves, "CSV with model,N,layer,omega")
      ->required()
      ->check(CLI::ExistingFile);
  fss->add_option("--bins", fss_bins, "Bins of the collapse objective")->capture_default_str();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("lgeo");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    io::ReportDocument doc;
    bool invariant_run = false;
    if (*omega) {
      doc = cmd_omega(files);
    } else if (*spectrum) {
      doc = cmd_spectrum(files, bins, parse_gram(gram));
    } else if (*mpfit) {
      doc = cmd_mp_fit(files, margin);
    } else if (*cdepth) {
      doc = cmd_critical_depth(depth);
    } else if (*simulate) {
      doc = cmd_simulate(sim_kind, sim_config, sim_seed);
      invariant_run = true;
    } else if (*attention) {
      doc = cmd_attention(energies, beta);
    } else if (*fisher_cmd) {
      doc = cmd_fisher(fisher);
    } else if (*fss) {
      doc = cmd_fss(curves, fss_bins);
    }
    write_output(io::emit_report(doc, io::parse_report_format(format)), out_path, out);
    if (invariant_run && !doc.all_checks_passed()) {
      for (const auto& c : doc.checks) {
        if (!c.passed) err << "lgeo: check failed: " << c.name << " (" << c.detail << ")\n";
      }
      return kExitInvariant;
    }
    return kExitOk;
  } catch (const phase::FSSFitError& e) {
    const auto& b = e.best();
    err << "lgeo: " << e.what() << "\nbest: beta/nu=" << b.beta_over_nu << " 1/nu=" << b.one_over_nu
        << " gamma_c=" << b.gamma_c << " residual=" << b.collapse_residual << '\n';
    return kExitNumerical;
  } catch (const InputError& e) {
    err << "lgeo: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    err << "lgeo: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "lgeo: internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace lgeo::cli
