#include "lgeo/io/quantization.hpp"

#include <cmath>
#include <random>

#include "lgeo/error.hpp"

namespace lgeo::io {

ActivationMatrix add_quantization_noise(const ActivationMatrix& X, double s2, std::uint64_t seed) {
  if (!(s2 >= 0.0) || !std::isfinite(s2)) throw InputError("quantization noise variance must be >= 0");
  ActivationMatrix out = X;
  if (s2 == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(s2));
  for (Eigen::Index r = 0; r < out.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.data.cols(); ++c) out.data(r, c) += normal(rng);
  }
  return out;
}

}  // namespace lgeo::io
