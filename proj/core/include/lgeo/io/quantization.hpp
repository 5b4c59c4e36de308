#pragma once

#include <cstdint>

#include "lgeo/covariance.hpp"

namespace lgeo::io {

/// Additive i.i.d. N(0, s2) noise on every entry, a stand-in for
/// low-bit quantization error.
ActivationMatrix add_quantization_noise(const ActivationMatrix& X, double s2, std::uint64_t seed);

}  // namespace lgeo::io
