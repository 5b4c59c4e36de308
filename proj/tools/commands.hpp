#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgeo/covariance.hpp"
#include "lgeo/io/report.hpp"

namespace lgeo::cli {

struct CriticalDepthArgs {
  std::vector<std::string> inputs;  // one profile CSV or several .lga files
  std::string embedded;
  std::string model;
  double tau = phase::kDefaultTau;
  int total_layers = 0;
};

struct FisherArgs {
  std::string head;
  std::string h;
  std::size_t mc = 0;
  std::uint64_t seed = 1;
};

io::ReportDocument cmd_omega(const std::vector<std::string>& files);
io::ReportDocument cmd_spectrum(const std::vector<std::string>& files, int bins, GramMode gram);
io::ReportDocument cmd_mp_fit(const std::vector<std::string>& files, double margin);
io::ReportDocument cmd_critical_depth(const CriticalDepthArgs& args);
io::ReportDocument cmd_attention(const std::string& energies, std::optional<double> beta);
io::ReportDocument cmd_fisher(const FisherArgs& args);
io::ReportDocument cmd_fss(const std::string& curves, int bins);
io::ReportDocument cmd_simulate(const std::string& kind, const std::string& config,
                                std::optional<std::uint64_t> seed);

/// Loads activation files concurrently and returns them sorted by layer;
/// files sharing a layer keep their command-line order.
std::vector<ActivationMatrix> load_layers(const std::vector<std::string>& files);

}  // namespace lgeo::cli
