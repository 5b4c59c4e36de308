#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lgeo/phase.hpp"

namespace lgeo::io {

struct SignatureRecord {
  std::string_view model_id;
  int layer;
  double omega;
};

/// The per-layer mean-Omega signatures of five open models (two decimals).
std::span<const SignatureRecord> embedded_dataset();

/// Model names in table order.
std::vector<std::string> embedded_models();

std::optional<double> embedded_omega(std::string_view model, int layer);

/// Depth profile of one embedded model, L = number of listed layers.
/// InputError for unknown models.
phase::DepthProfile embedded_profile(std::string_view model);

/// FNV-1a 64 over "model,layer,omega\n" lines with omega at two decimals.
std::uint64_t dataset_checksum(std::span<const SignatureRecord> records);

}  // namespace lgeo::io
