#include "lgeo/attention.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lgeo/error.hpp"

namespace lgeo::attn {

namespace {

constexpr double kSimplexTol = 1e-12;

std::vector<double> softmax_neg(const std::vector<double>& energies, double beta) {
  const double emin = *std::min_element(energies.begin(), energies.end());
  std::vector<double> w(energies.size());
  double total = 0.0;
  for (std::size_t j = 0; j < energies.size(); ++j) {
    w[j] = std::exp(-beta * (energies[j] - emin));
    total += w[j];
  }
  for (double& x : w) x /= total;
  return w;
}

Vector softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  Vector p = (logits.array() - top).exp().matrix();
  return p / p.sum();
}

}  // namespace

EnergyVector::EnergyVector(std::vector<double> energies, double beta)
    : energies_(std::move(energies)), beta_(beta) {
  if (energies_.empty()) throw InputError("energy vector needs T >= 1");
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw InputError("beta must be finite and > 0");
  for (double e : energies_) {
    if (!std::isfinite(e)) throw InputError("energies must be finite");
  }
}

double EnergyVector::log_partition() const {
  const double emin = *std::min_element(energies_.begin(), energies_.end());
  double total = 0.0;
  for (double e : energies_) total += std::exp(-beta_ * (e - emin));
  return -beta_ * emin + std::log(total);
}

SimplexPoint::SimplexPoint(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InputError("simplex point needs T >= 1");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InputError("probabilities must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kSimplexTol) throw InputError("probabilities must sum to 1");
}

void LinearHead::validate() const {
  if (weight.rows() < 2) throw InputError("linear head needs V >= 2");
  if (weight.cols() < 1) throw InputError("linear head needs d >= 1");
  if (bias.size() != weight.rows()) throw InputError("bias length must equal V");
  if (!weight.allFinite() || !bias.allFinite()) throw InputError("linear head has non-finite entries");
}

SimplexPoint gibbs(const EnergyVector& e) { return SimplexPoint(softmax_neg(e.energies(), e.beta())); }

double shannon_entropy(const SimplexPoint& p) {
  double h = 0.0;
  for (double x : p.probs()) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

double free_energy(const SimplexPoint& p, const EnergyVector& e) {
  if (p.size() != e.size()) throw InputError("free_energy: length mismatch");
  double energy = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) energy += p[j] * e.energies()[j];
  return energy - shannon_entropy(p) / e.beta();
}

double kl_divergence(const SimplexPoint& p, const SimplexPoint& q) {
  if (p.size() != q.size()) throw InputError("kl_divergence: length mismatch");
  double kl = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    if (q[j] == 0.0) throw DomainError("kl_divergence: p is not absolutely continuous w.r.t. q");
    kl += p[j] * std::log(p[j] / q[j]);
  }
  return std::max(kl, 0.0);
}

std::vector<double> attention_energies(std::span<const double> query,
                                       std::span<const std::vector<double>> keys) {
  if (keys.empty()) throw InputError("attention: need at least one key");
  std::vector<double> energies;
  energies.reserve(keys.size());
  for (const auto& key : keys) {
    if (key.size() != query.size()) throw InputError("attention: key length differs from query length");
    double dot = 0.0;
    for (std::size_t i = 0; i < key.size(); ++i) dot += query[i] * key[i];
    energies.push_back(-dot);
  }
  return energies;
}

SimplexPoint attention_weights(std::span<const double> query,
                               std::span<const std::vector<double>> keys, std::size_t d_k) {
  if (d_k < 1 || query.size() != d_k) throw InputError("attention: query length must equal d_k >= 1");
  return gibbs(EnergyVector(attention_energies(query, keys), 1.0 / std::sqrt(static_cast<double>(d_k))));
}

Matrix fisher_linear_head(const LinearHead& head, const Vector& h) {
  head.validate();
  if (h.size() != head.weight.cols()) throw InputError("fisher: h length must equal d");
  const Vector p = softmax(head.weight * h + head.bias);
  const Matrix middle = Matrix(p.asDiagonal()) - p * p.transpose();
  Matrix G = head.weight.transpose() * middle * head.weight;
  return 0.5 * (G + G.transpose());
}

Matrix fisher_monte_carlo(const LinearHead& head, const Vector& h, std::size_t samples,
                          std::uint64_t seed) {
  head.validate();
  if (h.size() != head.weight.cols()) throw InputError("fisher: h length must equal d");
  if (samples < 1) throw InputError("fisher: need at least one Monte-Carlo sample");
  const Vector p = softmax(head.weight * h + head.bias);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<Eigen::Index> draw(p.data(), p.data() + p.size());
  // Tally draws per class, then form the average of outer products.
  Vector counts = Vector::Zero(p.size());
  for (std::size_t n = 0; n < samples; ++n) counts(draw(rng)) += 1.0;
  const Eigen::Index d = head.weight.cols();
  Matrix G = Matrix::Zero(d, d);
  const Vector Wtp = head.weight.transpose() * p;
  for (Eigen::Index y = 0; y < p.size(); ++y) {
    if (counts(y) == 0.0) continue;
    const Vector score = head.weight.row(y).transpose() - Wtp;
    G.noalias() += (counts(y) / static_cast<double>(samples)) * score * score.transpose();
  }
  return G;
}

double effective_sharpness_probe(double scale, const EnergyVector& e) {
  if (!(scale > 0.0)) throw InputError("sharpness probe: scale must be > 0");
  std::vector<double> scaled = e.energies();
  for (double& x : scaled) x *= scale;
  return shannon_entropy(gibbs(EnergyVector(std::move(scaled), e.beta())));
}

}  // namespace lgeo::attn
