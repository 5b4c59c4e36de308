#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "lgeo/attention.hpp"
#include "lgeo/covariance.hpp"
#include "lgeo/io/quantization.hpp"
#include "lgeo/marchenko_pastur.hpp"
#include "lgeo/observables.hpp"
#include "lgeo/phase.hpp"
#include "lgeo/synth.hpp"
#include "oracles.hpp"

using doctest::Approx;
using lgeo::ActivationMatrix;
using lgeo::Matrix;
using lgeo::Spectrum;
using lgeo::Vector;

namespace {

// Mixes Gaussian, sparse, heavy-tailed and badly scaled draws so the
// bounds are exercised away from the typical-vector regime.
std::vector<double> varied_vector(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> kind(0, 3);
  std::vector<double> h(d, 0.0);
  switch (kind(rng)) {
    case 0:
      for (double& x : h) x = g(rng);
      break;
    case 1: {
      std::bernoulli_distribution keep(0.1);
      for (double& x : h) x = keep(rng) ? g(rng) : 0.0;
      break;
    }
    case 2: {
      std::cauchy_distribution<double> cauchy;
      for (double& x : h) x = cauchy(rng);
      break;
    }
    default: {
      std::uniform_real_distribution<double> expo(-150.0, 150.0);
      const double s = std::pow(10.0, expo(rng));
      for (double& x : h) x = s * g(rng);
    }
  }
  if (std::all_of(h.begin(), h.end(), [](double x) { return x == 0.0; })) h[0] = 1.0;
  return h;
}

Matrix random_orthogonal(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix M(d, d);
  for (auto& v : M.reshaped()) v = g(rng);
  Eigen::HouseholderQR<Matrix> qr(M);
  return qr.householderQ() * Matrix::Identity(d, d);
}

ActivationMatrix gaussian_batch(std::size_t T, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ActivationMatrix X{Matrix(T, d), 0, "g"};
  for (auto& v : X.data.reshaped()) v = g(rng);
  return X;
}

std::vector<double> random_simplex(std::size_t T, std::mt19937_64& rng) {
  std::exponential_distribution<double> e;
  std::vector<double> p(T);
  for (double& v : p) v = e(rng);
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= s;
  return p;
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("omega bounds over random vectors") {
  std::mt19937_64 rng(101);
  for (std::size_t d : {2u, 8u, 64u, 1024u}) {
    CAPTURE(d);
    const double upper = lgeo::omega_upper_bound(d);
    int violations = 0;
    double worst_ref = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const auto h = varied_vector(d, rng);
      const double w = lgeo::omega(h);
      if (!(w >= 0.0 && w <= upper)) ++violations;
      // The reference formula overflows on the rescaled draws; skip those.
      const double ref = oracle::omega(h);
      if (std::isfinite(ref)) worst_ref = std::max(worst_ref, std::abs(ref - w));
    }
    CHECK(violations == 0);
    CHECK(worst_ref < 1e-12);
  }
}

TEST_CASE("omega extremizers attain the bounds") {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution sign;
  std::uniform_real_distribution<double> mag(0.1, 10.0);
  for (std::size_t d : {2u, 8u, 64u, 1024u}) {
    for (int rep = 0; rep < 100; ++rep) {
      const double a = mag(rng);
      std::vector<double> flat(d);
      for (double& x : flat) x = sign(rng) ? a : -a;
      CHECK(lgeo::omega(flat) <= 1e-12);
      std::vector<double> sparse(d, 0.0);
      sparse[std::uniform_int_distribution<std::size_t>(0, d - 1)(rng)] = sign(rng) ? a : -a;
      CHECK(std::abs(lgeo::omega(sparse) - lgeo::omega_upper_bound(d)) <= 1e-12);
    }
  }
}

TEST_CASE("omega is invariant to scale, permutation and sign flips") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> expo(-8.0, 8.0);
  std::bernoulli_distribution flip;
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    auto h = oracle::random_vector(1 + i % 200, rng);
    const double w = lgeo::omega(h);
    const double alpha = (flip(rng) ? -1.0 : 1.0) * std::pow(10.0, expo(rng));
    std::vector<double> scaled(h);
    for (double& x : scaled) x *= alpha;
    std::vector<double> shuffled(h);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (double& x : shuffled) x = flip(rng) ? -x : x;
    worst = std::max({worst, std::abs(lgeo::omega(scaled) - w), std::abs(lgeo::omega(shuffled) - w)});
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("participation ratio and effective rank bounds over random spectra") {
  std::mt19937_64 rng(202);
  for (std::size_t d : {2u, 8u, 64u, 1024u}) {
    CAPTURE(d);
    int violations = 0;
    const int reps = d == 1024 ? 2000 : 10000;
    for (int i = 0; i < reps; ++i) {
      auto v = varied_vector(d, rng);
      const double peak = std::abs(*std::max_element(v.begin(), v.end(), [](double x, double y) {
        return std::abs(x) < std::abs(y);
      }));
      for (double& x : v) x = (x / peak) * (x / peak);
      const Spectrum s(v);
      const double pr = lgeo::pr_dimension(s);
      const double er = lgeo::effective_rank(s);
      const double rank = static_cast<double>(s.rank());
      const bool ok = pr >= 1.0 && pr <= rank && rank <= static_cast<double>(d) && er >= 1.0 &&
                      er <= static_cast<double>(d) && pr <= er * (1.0 + 1e-12);
      if (!ok) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("spectral extremizers") {
  for (std::size_t d : {2u, 8u, 64u, 1024u}) {
    const Spectrum uniform(std::vector<double>(d, 3.7));
    CHECK(std::abs(lgeo::effective_rank(uniform) - static_cast<double>(d)) <= 1e-12 * d);
    CHECK(std::abs(lgeo::pr_dimension(uniform) - static_cast<double>(d)) <= 1e-12 * d);
    std::vector<double> one(d, 0.0);
    one[d / 2] = 2.5;
    const Spectrum single(one);
    CHECK(lgeo::effective_rank(single) == 1.0);
    CHECK(lgeo::pr_dimension(single) == 1.0);
    CHECK(lgeo::spectral_entropy(single) == 0.0);
    // Entropy matches the reference sum.
    std::mt19937_64 rng(d);
    auto v = oracle::random_vector(d, rng);
    for (double& x : v) x *= x;
    CHECK(lgeo::spectral_entropy(Spectrum(v)) == Approx(oracle::entropy(v)).epsilon(1e-12));
  }
  // Effective rank strictly between the extremes otherwise.
  const Spectrum mixed(std::vector<double>{4, 1, 0});
  CHECK(lgeo::effective_rank(mixed) > 1.0);
  CHECK(lgeo::effective_rank(mixed) < 2.0);
}

TEST_CASE("trace and Frobenius identities") {
  std::mt19937_64 rng(303);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t d = 2 + rep * 3;
    const auto X = gaussian_batch(d + 10 + rep, d, rng);
    const auto C = lgeo::estimate_covariance(X);
    const auto s = lgeo::eigendecompose(C);
    double sq = 0.0;
    for (double v : s.eigenvalues()) sq += v * v;
    CHECK(s.trace() == Approx(C.entries.trace()).epsilon(1e-9));
    CHECK(sq == Approx(C.entries.squaredNorm()).epsilon(1e-9));
  }
}

TEST_CASE("spectra are rotation equivariant") {
  std::mt19937_64 rng(404);
  for (Eigen::Index d : {3, 10, 33, 64}) {
    const auto C = lgeo::estimate_covariance(gaussian_batch(2 * d, d, rng));
    const Matrix Q = random_orthogonal(d, rng);
    lgeo::CovarianceMatrix R{Q * C.entries * Q.transpose(), C.sample_count};
    R.entries = 0.5 * (R.entries + R.entries.transpose()).eval();
    const auto a = lgeo::eigendecompose(C).eigenvalues();
    const auto b = lgeo::eigendecompose(R).eigenvalues();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("gram and direct spectra agree on nonzero eigenvalues") {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<std::size_t> Tdist(5, 20);
  std::uniform_int_distribution<std::size_t> ddist(10, 100);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t T = Tdist(rng);
    const std::size_t d = ddist(rng);
    const auto X = gaussian_batch(T, d, rng);
    const auto direct = lgeo::eigendecompose(lgeo::estimate_covariance(X)).eigenvalues();
    const auto gram = lgeo::gram_spectrum(X).eigenvalues();
    REQUIRE(gram.size() == d);
    const std::size_t nonzero = std::min(T - 1, d);
    double worst = 0.0;
    for (std::size_t i = 0; i < nonzero; ++i) worst = std::max(worst, std::abs(direct[i] - gram[i]));
    CHECK(worst <= 1e-9 * direct.front());
    for (std::size_t i = nonzero; i < d; ++i) CHECK(gram[i] == 0.0);
  }
}

TEST_CASE("MP edges scale with sigma2") {
  for (double c : {0.1, 0.5, 1.0, 2.0}) {
    for (double alpha : {0.01, 0.5, 3.0, 1e4}) {
      const lgeo::rmt::MPModel base(1.3, c);
      const lgeo::rmt::MPModel scaled(alpha * 1.3, c);
      CHECK(scaled.lambda_plus() == Approx(alpha * base.lambda_plus()).epsilon(1e-14));
      CHECK(std::abs(scaled.lambda_minus() - alpha * base.lambda_minus()) <= 1e-14 * scaled.lambda_plus());
    }
  }
}

TEST_CASE("critical depth is invariant to an additive shift") {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.1, 0.6);
  std::uniform_real_distribution<double> shift(-0.09, 0.35);
  for (int rep = 0; rep < 200; ++rep) {
    const int L = 8 + rep % 40;
    std::vector<lgeo::phase::ProfilePoint> pts;
    for (int l = 0; l < L; ++l) pts.push_back({l, 0.0, u(rng), 0.0, 1});
    const auto p = lgeo::phase::make_profile("r", pts, L);
    const double c = shift(rng);
    for (auto& pt : pts) pt.mean_omega += c;
    const auto q = lgeo::phase::make_profile("r", pts, L);
    const auto a = lgeo::phase::critical_depth(p);
    const auto b = lgeo::phase::critical_depth(q);
    CHECK(a.jump_layer_pair == b.jump_layer_pair);
    CHECK(a.gamma_c_hat == b.gamma_c_hat);
    CHECK(b.jump_magnitude == Approx(a.jump_magnitude).epsilon(1e-9));
  }
}

TEST_CASE("free energy is minimised by the Gibbs distribution") {
  std::mt19937_64 rng(707);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> logbeta(std::log(0.1), std::log(10.0));
  const std::size_t sizes[] = {2, 8, 64};
  int not_minimal = 0;
  double worst_identity = 0.0;
  double worst_partition = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t T = sizes[i % 3];
    std::vector<double> E(T);
    const double scale = std::exp(g(rng));
    for (double& v : E) v = scale * g(rng);
    const lgeo::attn::EnergyVector e(E, std::exp(logbeta(rng)));
    const auto star = lgeo::attn::gibbs(e);
    const lgeo::attn::SimplexPoint p(random_simplex(T, rng));
    const double fp = lgeo::attn::free_energy(p, e);
    const double fs = lgeo::attn::free_energy(star, e);
    const double kl = lgeo::attn::kl_divergence(p, star);
    if (!(fs < fp)) ++not_minimal;
    worst_identity = std::max(worst_identity, std::abs((fp - fs) - kl / e.beta()) / std::max(1.0, std::abs(fp)));
    worst_partition =
        std::max(worst_partition, std::abs(fs + e.log_partition() / e.beta()) / std::max(1.0, std::abs(fs)));
  }
  CHECK(not_minimal == 0);
  CHECK(worst_identity <= 1e-12);
  CHECK(worst_partition <= 1e-12);
}

TEST_CASE("gibbs weights are shift invariant") {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> g;
  for (int i = 0; i < 500; ++i) {
    const std::size_t T = 1 + i % 50;
    std::vector<double> E(T);
    for (double& v : E) v = g(rng);
    const double c = 100.0 * g(rng);
    std::vector<double> shifted(E);
    for (double& v : shifted) v += c;
    const auto a = lgeo::attn::gibbs(lgeo::attn::EnergyVector(E, 1.7));
    const auto b = lgeo::attn::gibbs(lgeo::attn::EnergyVector(shifted, 1.7));
    for (std::size_t j = 0; j < T; ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-12);
  }
}

TEST_CASE("Fisher metric is PSD, rank limited and blind to the kernel of W") {
  std::mt19937_64 rng(909);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 60; ++rep) {
    const Eigen::Index V = 2 + rep % 6;
    const Eigen::Index d = 1 + rep % 11;
    lgeo::attn::LinearHead head{Matrix(V, d), Vector(V)};
    for (auto& v : head.weight.reshaped()) v = g(rng);
    for (auto& v : head.bias) v = g(rng);
    Vector h(d);
    for (auto& v : h) v = g(rng);
    const Matrix G = lgeo::attn::fisher_linear_head(head, h);
    const auto ev = lgeo::symmetric_eigenvalues(G);
    CHECK(ev.back() >= -1e-10);
    const double tol = 1e-9 * std::max(1.0, ev.front());
    const auto rank = std::count_if(ev.begin(), ev.end(), [&](double v) { return v > tol; });
    CHECK(rank <= std::min<Eigen::Index>(d, V - 1));
    if (d > V) {
      Eigen::JacobiSVD<Matrix> svd(head.weight, Eigen::ComputeFullV);
      // Right singular vectors beyond rank(W) <= V span the kernel.
      for (Eigen::Index j = V; j < d; ++j) {
        const Vector n = svd.matrixV().col(j);
        CHECK((G * n).norm() <= 1e-10 * std::max(1.0, G.norm()));
      }
    }
  }
}

TEST_CASE("mixture population covariance has rank at most k - 1 above the noise") {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> kd(1, 8);
  std::uniform_int_distribution<Eigen::Index> dd(8, 128);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 50; ++rep) {
    lgeo::synth::MixtureConfig cfg;
    const std::size_t k = kd(rng);
    const Eigen::Index d = dd(rng);
    cfg.probs = random_simplex(k, rng);
    cfg.prototypes.resize(static_cast<Eigen::Index>(k), d);
    for (auto& v : cfg.prototypes.reshaped()) v = 2.0 * g(rng);
    cfg.sigma2 = std::exp(g(rng));
    const Matrix c = lgeo::synth::centered_prototypes(cfg);
    Vector w = Vector::Zero(d);
    for (std::size_t i = 0; i < k; ++i) w += cfg.probs[i] * c.row(static_cast<Eigen::Index>(i)).transpose();
    CHECK(w.norm() <= 1e-12 * std::max(1.0, c.norm()));
    const auto ev = lgeo::symmetric_eigenvalues(lgeo::synth::mixture_population_cov(cfg).entries);
    const auto above = std::count_if(ev.begin(), ev.end(), [&](double v) { return v > cfg.sigma2 + 1e-9; });
    CHECK(above <= static_cast<long>(k) - 1);
    CHECK(above == static_cast<long>(k) - 1);
  }
}

TEST_CASE("sample covariance error of a mixture shrinks like one over root T") {
  lgeo::synth::MixtureConfig cfg;
  cfg.probs = {0.3, 0.45, 0.25};
  cfg.prototypes = Matrix{{2, 0, 0, 1, 0, 0}, {0, -1, 2, 0, 0, 1}, {-1, 1, 0, 0, 2, 0}};
  cfg.sigma2 = 0.5;
  const Matrix truth = lgeo::synth::mixture_population_cov(cfg).entries;
  auto mean_error = [&](std::size_t T) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
      cfg.samples = T;
      cfg.seed = seed;
      sum += (lgeo::estimate_covariance(lgeo::synth::sample_mixture(cfg)).entries - truth).norm();
    }
    return sum / 24.0;
  };
  const double coarse = mean_error(2000);
  const double fine = mean_error(8000);
  CHECK(coarse / fine >= 2.0 / 1.5);
  CHECK(coarse / fine <= 2.0 * 1.5);
}

TEST_CASE("transverse trace bound dominates over seeded contraction runs") {
  std::mt19937_64 rng(1101);
  std::uniform_int_distribution<std::size_t> dd(4, 24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double qs[] = {0.3, 0.7, 0.95};
  for (int rep = 0; rep < 100; ++rep) {
    lgeo::synth::ContractionConfig cfg;
    cfg.d = dd(rng);
    cfg.k = 1 + static_cast<std::size_t>(u(rng) * static_cast<double>(cfg.d - 1));
    cfg.q = qs[rep % 3];
    cfg.sigma_perp2 = rep % 4 == 0 ? 0.0 : 0.2 * u(rng);
    cfg.coupling = u(rng);
    cfg.steps = 50;
    cfg.seed = 5000 + rep;
    cfg.scalar_transverse = rep % 5 == 0;
    CAPTURE(rep);
    const auto ops = lgeo::synth::contraction_operators(cfg);
    const auto C = lgeo::synth::run_contraction(cfg);
    REQUIRE(C.size() == cfg.steps + 1);
    const double trace0 = lgeo::synth::transverse_block(C[0].entries, cfg.k).trace();
    int violations = 0;
    for (std::size_t l = 0; l <= cfg.steps; ++l) {
      const double realized = lgeo::synth::transverse_block(C[l].entries, cfg.k).trace();
      const double bound = lgeo::synth::transverse_trace_bound(cfg, trace0, l);
      if (realized > bound * (1.0 + 1e-10) + 1e-12) ++violations;
      if (l < cfg.steps) {
        const Matrix P = lgeo::synth::transverse_block(C[l].entries, cfg.k);
        const Matrix S = lgeo::synth::transverse_block(ops[l].Sigma, cfg.k);
        const Matrix N = lgeo::synth::transverse_block(C[l + 1].entries, cfg.k);
        const double nP = lgeo::symmetric_eigenvalues(P).front();
        const double nS = lgeo::symmetric_eigenvalues(S).front();
        const double nN = lgeo::symmetric_eigenvalues(N).front();
        if (nN > cfg.q * cfg.q * nP + nS + 1e-10 * std::max(1.0, nN)) ++violations;
        if (ops[l].transverse_norm > cfg.q * (1.0 + 1e-12)) ++violations;
        if (cfg.scalar_transverse) {
          // The gap is round-off sized here; symmetrise before the solver.
          const Matrix G = cfg.q * cfg.q * P + S - N;
          const auto gap = lgeo::symmetric_eigenvalues(0.5 * (G + G.transpose()));
          if (gap.back() < -1e-9 * P.norm()) ++violations;
        }
      }
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("noise-free transverse dynamics collapse onto the parallel block") {
  for (double q : {0.3, 0.7, 0.95}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      lgeo::synth::ContractionConfig cfg;
      cfg.d = 20;
      cfg.k = 4;
      cfg.q = q;
      cfg.sigma_perp2 = 0.0;
      cfg.seed = seed;
      cfg.steps = static_cast<std::size_t>(std::ceil(std::log(1e-6) / std::log(q * q)));
      const auto C = lgeo::synth::run_contraction(cfg);
      const auto& last = C.back().entries;
      const double full = lgeo::effective_rank(lgeo::eigendecompose({last, 0}));
      const double par = lgeo::effective_rank(lgeo::eigendecompose({lgeo::synth::parallel_block(last, cfg.k), 0}));
      CHECK(std::abs(full - par) <= 0.5);
    }
  }
}

TEST_CASE("phase diagnostics survive quantization noise") {
  // Spike count of a planted model.
  lgeo::synth::SpikedConfig cfg;
  cfg.sigma2 = 1.0;
  cfg.d = 400;
  cfg.T = 1600;
  cfg.seed = 12;
  const auto dirs = lgeo::synth::random_orthonormal(cfg.d, 2, 13);
  cfg.spikes = {{6.0, dirs[0]}, {3.0, dirs[1]}};
  const auto X = lgeo::synth::sample_spiked(cfg);
  const auto noisy = lgeo::io::add_quantization_noise(X, 0.25 * cfg.sigma2, 14);
  const double c = 0.25;
  const auto count = [&](const ActivationMatrix& A) {
    const auto s = lgeo::covariance_spectrum(A);
    return lgeo::rmt::detect_spikes(s, lgeo::rmt::fit_sigma2(s, c)).count();
  };
  CHECK(count(X) == 2);
  CHECK(count(noisy) == count(X));

  // Depth sweep: dense Gaussian rows before layer 7, sparse bursts after.
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g;
  std::bernoulli_distribution burst(0.05);
  std::vector<ActivationMatrix> clean;
  std::vector<ActivationMatrix> quantized;
  for (int l = 0; l < 12; ++l) {
    ActivationMatrix B{Matrix(200, 64), l, "sweep"};
    for (auto& v : B.data.reshaped()) v = l < 7 ? g(rng) : (burst(rng) ? 10.0 * g(rng) : 0.1 * g(rng));
    quantized.push_back(lgeo::io::add_quantization_noise(B, 0.25, 100 + l));
    clean.push_back(std::move(B));
  }
  const auto a = lgeo::phase::critical_depth(lgeo::phase::build_profile(clean));
  const auto b = lgeo::phase::critical_depth(lgeo::phase::build_profile(quantized));
  CHECK(a.jump_layer_pair == std::pair<int, int>{6, 7});
  CHECK(b.jump_layer_pair == a.jump_layer_pair);
}

}  // TEST_SUITE
