#include "lgeo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "lgeo/error.hpp"

namespace lgeo::synth {

namespace {

constexpr int kMaxRegenerations = 16;

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix M(rows, cols);
  // Fill in row-major order so the draw sequence is independent of storage order.
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) M(i, j) = normal(rng);
  }
  return M;
}

Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  const Matrix G = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  // Sign fix makes the draw Haar-distributed.
  const Matrix R = qr.matrixQR();
  for (std::size_t j = 0; j < n; ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return Q;
}

double largest_eigenvalue(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

// Symmetric square root of a PSD matrix (negative round-off clamped).
Matrix psd_sqrt(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
  const Vector root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

void ContractionConfig::validate() const {
  if (d < 1) throw ConfigError("contraction: d must be >= 1");
  if (k < 1 || k > d) throw ConfigError("contraction: need 1 <= k <= d");
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("contraction: q must lie in (0, 1)");
  if (!(sigma_perp2 >= 0.0)) throw ConfigError("contraction: sigma_perp2 must be >= 0");
  if (!(sigma_par2 >= 0.0)) throw ConfigError("contraction: sigma_par2 must be >= 0");
  if (!std::isfinite(coupling)) throw ConfigError("contraction: coupling must be finite");
}

double operator_norm(const Matrix& A, double rel_tol, int max_iter) {
  if (A.size() == 0) return 0.0;
  const Matrix AtA = A.transpose() * A;
  Vector v(AtA.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = AtA * v;
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    const bool done = std::abs(next - lambda) <= rel_tol * next;
    lambda = next;
    if (done) break;
  }
  return std::sqrt(lambda);
}

std::vector<ContractionStep> contraction_operators(const ContractionConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> shrink(0.5, 1.0);
  const std::size_t k = cfg.k;
  const std::size_t m = cfg.transverse_dim();
  std::vector<ContractionStep> steps;
  steps.reserve(cfg.steps);
  for (std::size_t l = 0; l < cfg.steps; ++l) {
    ContractionStep step;
    step.A = Matrix::Zero(cfg.d, cfg.d);
    step.A.topLeftCorner(k, k) = random_orthogonal(k, rng);
    if (m > 0) {
      step.A.topRightCorner(k, m) = cfg.coupling * gaussian_matrix(k, m, rng);
      Matrix perp;
      bool ok = false;
      for (int attempt = 0; attempt < kMaxRegenerations && !ok; ++attempt) {
        if (cfg.scalar_transverse) {
          perp = cfg.q * Matrix::Identity(m, m);
        } else {
          const Matrix G = gaussian_matrix(m, m, rng);
          perp = G * (cfg.q * shrink(rng) / operator_norm(G));
        }
        // Power iteration slightly underestimates; confirm with the exact norm.
        step.transverse_norm = std::sqrt(largest_eigenvalue(perp.transpose() * perp));
        ok = step.transverse_norm <= cfg.q * (1.0 + 1e-12);
      }
      if (!ok) throw ConfigError("contraction: could not draw A_perp with norm <= q");
      step.A.bottomRightCorner(m, m) = perp;
    }
    step.Sigma = Matrix::Zero(cfg.d, cfg.d);
    step.Sigma.topLeftCorner(k, k) = cfg.sigma_par2 * Matrix::Identity(k, k);
    if (m > 0 && cfg.sigma_perp2 > 0.0) {
      const Matrix B = gaussian_matrix(m, m, rng);
      const Matrix S = B * B.transpose();
      step.Sigma.bottomRightCorner(m, m) = S * (cfg.sigma_perp2 * shrink(rng) / largest_eigenvalue(S));
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

std::vector<CovarianceMatrix> run_contraction(const ContractionConfig& cfg,
                                              const std::optional<Matrix>& c0) {
  const auto ops = contraction_operators(cfg);
  Matrix C = c0 ? *c0 : Matrix::Identity(cfg.d, cfg.d);
  if (C.rows() != static_cast<Eigen::Index>(cfg.d) || C.cols() != C.rows()) {
    throw ConfigError("contraction: C0 must be d x d");
  }
  std::vector<CovarianceMatrix> out;
  out.reserve(ops.size() + 1);
  out.push_back({C, 0});
  for (const auto& op : ops) {
    Matrix next = op.A * C * op.A.transpose() + op.Sigma;
    C = 0.5 * (next + next.transpose());
    out.push_back({C, 0});
  }
  return out;
}

std::vector<ActivationMatrix> sample_contraction(const ContractionConfig& cfg, std::size_t particles) {
  if (particles < 2) throw ConfigError("contraction: need at least 2 particles");
  const auto ops = contraction_operators(cfg);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  Matrix H = gaussian_matrix(particles, cfg.d, rng);
  std::vector<ActivationMatrix> out;
  out.push_back({H, 0, "contraction"});
  int layer = 0;
  for (const auto& op : ops) {
    const Matrix noise = gaussian_matrix(particles, cfg.d, rng) * psd_sqrt(op.Sigma);
    H = H * op.A.transpose() + noise;
    out.push_back({H, ++layer, "contraction"});
  }
  return out;
}

Matrix transverse_block(const Matrix& C, std::size_t k) {
  const auto m = C.rows() - static_cast<Eigen::Index>(k);
  return C.bottomRightCorner(m, m);
}

Matrix parallel_block(const Matrix& C, std::size_t k) {
  return C.topLeftCorner(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
}

double transverse_trace_bound(const ContractionConfig& cfg, double trace0, std::size_t steps_since) {
  if (!(cfg.q < 1.0)) throw DomainError("transverse_trace_bound: q must be < 1");
  const double q2 = cfg.q * cfg.q;
  return std::pow(q2, static_cast<double>(steps_since)) * trace0 +
         static_cast<double>(cfg.transverse_dim()) * cfg.sigma_perp2 / (1.0 - q2);
}

// ---------------------------------------------------------------------------

void MixtureConfig::validate() const {
  if (probs.empty()) throw ConfigError("mixture: need k >= 1");
  if (static_cast<std::size_t>(prototypes.rows()) != probs.size()) {
    throw ConfigError("mixture: prototypes must have k rows");
  }
  if (prototypes.cols() < 1) throw ConfigError("mixture: d must be >= 1");
  if (!prototypes.allFinite()) throw ConfigError("mixture: non-finite prototype");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ConfigError("mixture: probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("mixture: probabilities must sum to 1");
  if (!(sigma2 > 0.0)) throw ConfigError("mixture: sigma2 must be > 0");
}

Matrix centered_prototypes(const MixtureConfig& cfg) {
  cfg.validate();
  const Eigen::Map<const Vector> p(cfg.probs.data(), static_cast<Eigen::Index>(cfg.probs.size()));
  const Eigen::RowVectorXd mean = p.transpose() * cfg.prototypes;
  return cfg.prototypes.rowwise() - mean;
}

CovarianceMatrix mixture_population_cov(const MixtureConfig& cfg) {
  const Matrix centered = centered_prototypes(cfg);
  const Eigen::Map<const Vector> p(cfg.probs.data(), static_cast<Eigen::Index>(cfg.probs.size()));
  Matrix C = centered.transpose() * p.asDiagonal() * centered;
  C.diagonal().array() += cfg.sigma2;
  return {0.5 * (C + C.transpose()), 0};
}

ActivationMatrix sample_mixture(const MixtureConfig& cfg) {
  cfg.validate();
  if (cfg.samples < 2) throw ConfigError("mixture: samples must be >= 2");
  std::mt19937_64 rng(cfg.seed);
  std::discrete_distribution<std::size_t> pick(cfg.probs.begin(), cfg.probs.end());
  std::normal_distribution<double> normal;
  const double sd = std::sqrt(cfg.sigma2);
  const auto d = cfg.prototypes.cols();
  ActivationMatrix X{Matrix(cfg.samples, d), 0, "mixture"};
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    const auto z = static_cast<Eigen::Index>(pick(rng));
    for (Eigen::Index j = 0; j < d; ++j) X.data(i, j) = cfg.prototypes(z, j) + sd * normal(rng);
  }
  return X;
}

// ---------------------------------------------------------------------------

std::vector<Vector> random_orthonormal(std::size_t d, std::size_t count, std::uint64_t seed) {
  if (count > d) throw ConfigError("cannot draw more orthonormal vectors than dimensions");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> out;
  while (out.size() < count) {
    Vector v(d);
    for (std::size_t i = 0; i < d; ++i) v(i) = normal(rng);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : out) v -= u.dot(v) * u;
    }
    const double n = v.norm();
    if (n > 1e-8) out.push_back(v / n);
  }
  return out;
}

void SpikedConfig::validate() const {
  if (!(sigma2 > 0.0)) throw ConfigError("spiked: sigma2 must be > 0");
  if (d < 2 || T < 2) throw ConfigError("spiked: d and T must be >= 2");
  std::vector<Vector> basis;
  for (const auto& s : spikes) {
    if (!(s.theta > 0.0)) throw ConfigError("spiked: theta must be > 0");
    if (static_cast<std::size_t>(s.direction.size()) != d) {
      throw ConfigError("spiked: direction length must equal d");
    }
    if (std::abs(s.direction.norm() - 1.0) > 1e-12) throw ConfigError("spiked: directions must be unit vectors");
    Vector r = s.direction;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) r -= b.dot(r) * b;
    }
    if (r.norm() < 1e-8) throw ConfigError("spiked: spike directions must be linearly independent");
    basis.push_back(r.normalized());
  }
}

Matrix spiked_population_cov(const SpikedConfig& cfg) {
  cfg.validate();
  Matrix C = cfg.sigma2 * Matrix::Identity(cfg.d, cfg.d);
  for (const auto& s : cfg.spikes) C += s.theta * s.direction * s.direction.transpose();
  return C;
}

ActivationMatrix sample_spiked(const SpikedConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const double sd = std::sqrt(cfg.sigma2);
  ActivationMatrix X{sd * gaussian_matrix(cfg.T, cfg.d, rng), 0, "spiked"};
  for (const auto& s : cfg.spikes) {
    const Vector factor = std::sqrt(s.theta) * gaussian_matrix(cfg.T, 1, rng).col(0);
    X.data.noalias() += factor * s.direction.transpose();
  }
  return X;
}

// ---------------------------------------------------------------------------

TailMetrics tail_metrics(double alpha, std::size_t k, std::size_t n_max) {
  if (!(alpha > 0.0)) throw InputError("tail_metrics: alpha must be > 0");
  if (k < 1 || n_max <= k) throw InputError("tail_metrics: need 1 <= k < n_max");
  TailMetrics t;
  // Smallest terms first.
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = n_max; i >= 1; --i) {
    const double term = std::pow(static_cast<double>(i), -alpha);
    sum += term;
    sum_sq += term * term;
    if (i == k + 1) t.tail_trace = sum;
  }
  t.partial_sum = sum;
  t.partial_sum_sq = sum_sq;
  t.trace_convergent = alpha > 1.0;
  t.energy_convergent = alpha > 0.5;
  return t;
}

}  // namespace lgeo::synth
