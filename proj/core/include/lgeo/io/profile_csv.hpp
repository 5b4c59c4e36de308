#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "lgeo/phase.hpp"

namespace lgeo::io {

// Header must contain model, layer, omega; optional columns var_omega, n,
// total_layers. One DepthProfile per model, in first-appearance order.
std::vector<phase::DepthProfile> read_profile_csv(std::istream& in);
std::vector<phase::DepthProfile> read_profile_csv(const std::filesystem::path& path);

void write_profile_csv(const std::vector<phase::DepthProfile>& profiles, std::ostream& out);

// Scaled curves: model, N, layer, omega (+ optional total_layers).
std::vector<phase::ScaledCurve> read_fss_csv(std::istream& in);
std::vector<phase::ScaledCurve> read_fss_csv(const std::filesystem::path& path);
void write_fss_csv(const std::vector<phase::ScaledCurve>& curves, std::ostream& out);

}  // namespace lgeo::io
