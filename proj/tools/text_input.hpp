#pragma once

#include <filesystem>
#include <vector>

#include "lgeo/attention.hpp"

namespace lgeo::cli {

/// Reals separated by commas, semicolons or whitespace; '#' starts a comment.
std::vector<double> read_numbers(const std::filesystem::path& path);

/// One row per non-empty line; every row must have the same width.
Matrix read_matrix(const std::filesystem::path& path);

/// JSON object {"weight": [[...]], "bias": [...]} or a plain-text weight
/// matrix (bias taken as zero).
attn::LinearHead read_linear_head(const std::filesystem::path& path);

}  // namespace lgeo::cli
