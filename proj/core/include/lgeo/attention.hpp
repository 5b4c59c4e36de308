#pragma once

#include <span>
#include <vector>

#include "lgeo/covariance.hpp"

namespace lgeo::attn {

/// Energies E_j with inverse temperature beta; finite, T >= 1, beta > 0.
class EnergyVector {
 public:
  EnergyVector(std::vector<double> energies, double beta);

  const std::vector<double>& energies() const noexcept { return energies_; }
  double beta() const noexcept { return beta_; }
  std::size_t size() const noexcept { return energies_.size(); }

  /// log sum_j exp(-beta E_j), evaluated stably.
  double log_partition() const;

 private:
  std::vector<double> energies_;
  double beta_;
};

/// Probability vector on the simplex (entries >= 0, sum 1 within 1e-12).
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<double> probs);

  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

struct LinearHead {
  Matrix weight;  // V x d
  Vector bias;    // V

  void validate() const;
};

SimplexPoint gibbs(const EnergyVector& e);

/// sum p_j E_j + (1/beta) sum p_j log p_j
double free_energy(const SimplexPoint& p, const EnergyVector& e);

/// Shannon entropy in nats, 0 log 0 = 0.
double shannon_entropy(const SimplexPoint& p);

/// sum p log(p/q); DomainError when q_j = 0 < p_j.
double kl_divergence(const SimplexPoint& p, const SimplexPoint& q);

/// Softmax of beta <q, k_j> with beta = 1/sqrt(d_k).
SimplexPoint attention_weights(std::span<const double> query,
                               std::span<const std::vector<double>> keys, std::size_t d_k);

/// Energies -<q, k_j>.
std::vector<double> attention_energies(std::span<const double> query,
                                       std::span<const std::vector<double>> keys);

/// G = W^T (diag(p) - p p^T) W with p = softmax(W h + b).
Matrix fisher_linear_head(const LinearHead& head, const Vector& h);

/// Monte-Carlo estimate (1/n) sum s(y) s(y)^T, s(y) = W^T (e_y - p), y ~ p.
Matrix fisher_monte_carlo(const LinearHead& head, const Vector& h, std::size_t samples,
                          std::uint64_t seed);

/// Entropy of gibbs(scale * E) at the same beta.
double effective_sharpness_probe(double scale, const EnergyVector& e);

}  // namespace lgeo::attn
