#include "lgeo/marchenko_pastur.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lgeo/error.hpp"
#include "quadrature.hpp"
#include "stats.hpp"

namespace lgeo::rmt {

namespace {

constexpr double kQuadTol = 1e-12;
constexpr std::size_t kMinBulk = 10;

// Integral of the continuous density over [lambda_minus, lambda] using
// lambda = a + (b - a)(1 - cos phi) / 2, which removes both square-root
// edge singularities (and the 1/lambda pole when a = 0).
double continuous_mass(double lambda, const MPModel& m) {
  const double a = m.lambda_minus();
  const double b = m.lambda_plus();
  if (lambda <= a) return 0.0;
  const double span = b - a;
  const double t = std::clamp(1.0 - 2.0 * (std::min(lambda, b) - a) / span, -1.0, 1.0);
  const double phi_max = std::acos(t);
  const double half_span = 0.5 * span;
  const double prefactor = half_span * half_span / (2.0 * std::numbers::pi * m.sigma2() * m.c());
  auto integrand = [&](double phi) {
    const double s = std::sin(phi);
    const double one_minus_cos = 2.0 * std::sin(0.5 * phi) * std::sin(0.5 * phi);
    const double x = a + half_span * one_minus_cos;
    if (x <= 0.0) {
      // a == 0 and phi -> 0: s^2 / x -> 2 / half_span.
      return prefactor * 2.0 / half_span;
    }
    return prefactor * s * s / x;
  };
  return detail::gauss_kronrod(integrand, 0.0, phi_max, kQuadTol);
}

}  // namespace

MPModel::MPModel(double sigma2, double c) : sigma2_(sigma2), c_(c) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InputError("MP sigma2 must be > 0");
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("MP aspect ratio c must be > 0");
  const double r = std::sqrt(c);
  lambda_minus_ = sigma2 * (1.0 - r) * (1.0 - r);
  lambda_plus_ = sigma2 * (1.0 + r) * (1.0 + r);
}

double mp_density(double lambda, const MPModel& m) {
  if (lambda < 0.0 || std::isnan(lambda)) throw InputError("mp_density: lambda must be >= 0");
  const double a = m.lambda_minus();
  const double b = m.lambda_plus();
  if (lambda <= a || lambda >= b) return 0.0;
  return std::sqrt((b - lambda) * (lambda - a)) /
         (2.0 * std::numbers::pi * m.sigma2() * m.c() * lambda);
}

double mp_cdf(double lambda, const MPModel& m) {
  if (std::isnan(lambda)) throw InputError("mp_cdf: lambda is NaN");
  if (lambda < 0.0) return 0.0;
  if (lambda >= m.lambda_plus()) return 1.0;
  const double value = m.mass_at_zero() + continuous_mass(lambda, m);
  return std::clamp(value, 0.0, 1.0);
}

double mp_quantile(double u, const MPModel& m) {
  if (!(u >= 0.0 && u <= 1.0)) throw InputError("mp_quantile: u must lie in [0, 1]");
  if (u <= m.mass_at_zero()) return m.mass_at_zero() > 0.0 ? 0.0 : m.lambda_minus();
  if (u >= 1.0) return m.lambda_plus();
  double lo = m.lambda_minus();
  double hi = m.lambda_plus();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * m.lambda_plus(); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mp_cdf(mid, m) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MPModel fit_sigma2(const Spectrum& s, double c) {
  if (s.empty()) throw InputError("fit_sigma2: empty spectrum");
  if (!(c > 0.0)) throw InputError("fit_sigma2: c must be > 0");
  std::vector<double> candidates;
  candidates.reserve(s.size());
  for (auto it = s.eigenvalues().rbegin(); it != s.eigenvalues().rend(); ++it) {
    // With c > 1 the sample spectrum carries ~d - T structural zeros.
    if (c > 1.0 && *it <= 0.0) continue;
    candidates.push_back(*it);
  }
  if (candidates.size() < kMinBulk) {
    throw FitError("fit_sigma2: fewer than 10 candidate bulk eigenvalues");
  }
  const double q1 = detail::quantile_sorted(candidates, 0.25);
  const double q3 = detail::quantile_sorted(candidates, 0.75);
  const double fence = q3 + 1.5 * (q3 - q1);
  const auto bulk_end = std::upper_bound(candidates.begin(), candidates.end(), fence);
  const std::span<const double> bulk(candidates.begin(), bulk_end);
  if (bulk.size() < kMinBulk) throw FitError("fit_sigma2: fewer than 10 bulk eigenvalues");
  const double bulk_median = detail::quantile_sorted(bulk, 0.5);
  if (!(bulk_median > 0.0)) throw FitError("fit_sigma2: bulk median is zero");

  // Median of the unit-variance MP law restricted to the part of its support
  // that survives the fence; iterate because the fence in unit-variance
  // coordinates depends on sigma2.
  const MPModel unit(1.0, c);
  const double atom = unit.mass_at_zero();
  double sigma2 = bulk_median / mp_quantile(atom + 0.5 * (1.0 - atom), unit);
  for (int it = 0; it < 50; ++it) {
    const double kept = mp_cdf(fence / sigma2, unit) - atom;
    const double target = atom + 0.5 * kept;
    const double next = bulk_median / mp_quantile(target, unit);
    const bool done = std::abs(next - sigma2) <= 1e-12 * sigma2;
    sigma2 = next;
    if (done) break;
  }
  return MPModel(sigma2, c);
}

SpikeSet detect_spikes(const Spectrum& s, const MPModel& m, double margin) {
  if (!(margin >= 0.0)) throw InputError("detect_spikes: margin must be >= 0");
  SpikeSet out;
  out.margin = margin;
  const double cut = m.lambda_plus() * (1.0 + margin);
  for (std::size_t i = 0; i < s.size() && s[i] > cut; ++i) out.outliers.push_back({s[i], i});
  return out;
}

BBPPrediction bbp_predict(const MPModel& m, double theta) {
  if (!(theta > 0.0)) throw InputError("bbp_predict: theta must be > 0");
  BBPPrediction p;
  p.detectable = theta > m.sigma2() * std::sqrt(m.c());
  if (p.detectable) {
    p.predicted_outlier = (m.sigma2() + theta) * (1.0 + m.c() * m.sigma2() / theta);
  }
  return p;
}

double ks_statistic(const Spectrum& s, const MPModel& m) {
  if (s.empty()) throw InputError("ks_statistic: empty spectrum");
  const std::size_t spikes = detect_spikes(s, m).count();
  if (spikes >= s.size()) throw FitError("ks_statistic: no bulk eigenvalues left after spike removal");
  std::vector<double> bulk(s.eigenvalues().begin() + static_cast<long>(spikes), s.eigenvalues().end());
  std::reverse(bulk.begin(), bulk.end());
  const double n = static_cast<double>(bulk.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < bulk.size();) {
    std::size_t j = i;
    while (j < bulk.size() && bulk[j] == bulk[i]) ++j;
    const double x = bulk[i];
    const double right = mp_cdf(x, m);
    const double left = (x <= 0.0) ? 0.0 : right;  // only the zero atom is a jump
    ks = std::max({ks, std::abs(static_cast<double>(j) / n - right),
                   std::abs(static_cast<double>(i) / n - left)});
    i = j;
  }
  return ks;
}

}  // namespace lgeo::rmt
