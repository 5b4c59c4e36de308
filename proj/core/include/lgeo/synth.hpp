#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lgeo/covariance.hpp"

namespace lgeo::synth {

/// Block-triangular linear dynamics h' = A h + xi with A = [[A_par, *], [0, A_perp]],
/// ||A_perp||_op <= q < 1 and Cov(xi) = Sigma with its transverse block
/// bounded by sigma_perp2 * Id.
struct ContractionConfig {
  std::size_t d = 32;
  std::size_t k = 4;  // parallel block size, 1 <= k <= d
  double q = 0.7;
  double sigma_perp2 = 0.0;
  double sigma_par2 = 0.1;  // isotropic noise on the parallel block
  double coupling = 0.1;    // entry scale of the "*" block
  std::size_t steps = 50;
  std::uint64_t seed = 1;
  /// A_perp = q * Id exactly (no random draw); used for closed-form checks.
  bool scalar_transverse = false;

  std::size_t transverse_dim() const noexcept { return d - k; }
  void validate() const;
};

/// One layer's linearized map and noise covariance.
struct ContractionStep {
  Matrix A;
  Matrix Sigma;
  double transverse_norm = 0.0;  // ||A_perp||_op
};

/// Deterministic operator sequence for (seed, config). Regenerates a draw
/// whose transverse norm exceeds q, up to a bounded number of retries.
std::vector<ContractionStep> contraction_operators(const ContractionConfig& cfg);

/// Exact covariance recursion C_{l+1} = A_l C_l A_l^T + Sigma_l, returning
/// C_0 .. C_steps. C_0 defaults to the identity.
std::vector<CovarianceMatrix> run_contraction(const ContractionConfig& cfg,
                                              const std::optional<Matrix>& c0 = std::nullopt);

/// Particle version of the same dynamics; returns the ensemble at every step.
std::vector<ActivationMatrix> sample_contraction(const ContractionConfig& cfg,
                                                 std::size_t particles);

Matrix transverse_block(const Matrix& C, std::size_t k);
Matrix parallel_block(const Matrix& C, std::size_t k);

/// q^{2 dl} Tr0 + (d - k) sigma_perp2 / (1 - q^2). DomainError if q >= 1.
double transverse_trace_bound(const ContractionConfig& cfg, double trace0, std::size_t steps_since);

/// Largest singular value via power iteration on A^T A (relative tol 1e-10).
double operator_norm(const Matrix& A, double rel_tol = 1e-10, int max_iter = 100000);

// ---------------------------------------------------------------------------

/// h = c_Z + eps, Z ~ probs, eps ~ N(0, sigma2 Id).
struct MixtureConfig {
  std::vector<double> probs;
  Matrix prototypes;  // k x d
  double sigma2 = 1.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;

  std::size_t k() const noexcept { return probs.size(); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(prototypes.cols()); }
  void validate() const;
};

/// Prototypes centered on their probability-weighted mean.
Matrix centered_prototypes(const MixtureConfig& cfg);

/// sigma2 Id + sum_i p_i c~_i c~_i^T
CovarianceMatrix mixture_population_cov(const MixtureConfig& cfg);

ActivationMatrix sample_mixture(const MixtureConfig& cfg);

// ---------------------------------------------------------------------------

struct SpikeComponent {
  double theta;
  Vector direction;  // unit norm
};

/// Rows ~ N(0, sigma2 Id + sum_r theta_r u_r u_r^T).
struct SpikedConfig {
  double sigma2 = 1.0;
  std::vector<SpikeComponent> spikes;
  std::size_t d = 100;
  std::size_t T = 400;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Orthonormal directions drawn uniformly (Gaussian + Gram-Schmidt).
std::vector<Vector> random_orthonormal(std::size_t d, std::size_t count, std::uint64_t seed);

Matrix spiked_population_cov(const SpikedConfig& cfg);
ActivationMatrix sample_spiked(const SpikedConfig& cfg);

// ---------------------------------------------------------------------------

struct TailMetrics {
  double partial_sum = 0.0;     // sum_{i <= n_max} i^-alpha
  double partial_sum_sq = 0.0;  // sum_{i <= n_max} i^-2alpha
  double tail_trace = 0.0;      // sum_{k < i <= n_max} i^-alpha
  bool trace_convergent = false;
  bool energy_convergent = false;
};

TailMetrics tail_metrics(double alpha, std::size_t k, std::size_t n_max);

}  // namespace lgeo::synth
