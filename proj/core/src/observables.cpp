#include "lgeo/observables.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "lgeo/error.hpp"

namespace lgeo {

double eigen_zero_tolerance(double largest) noexcept {
  return kEigenZeroTol * std::max(largest, 1.0);
}

Spectrum::Spectrum(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("spectrum contains a non-finite eigenvalue");
  }
  std::sort(values_.begin(), values_.end(), std::greater<>());
  if (values_.empty()) return;
  const double tol = eigen_zero_tolerance(values_.front());
  for (double& v : values_) {
    if (v < -tol) {
      throw InputError("eigenvalue " + std::to_string(v) + " below -tol: matrix is not PSD");
    }
    if (v < tol) v = 0.0;
  }
  trace_ = std::accumulate(values_.begin(), values_.end(), 0.0);
}

std::size_t Spectrum::rank() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; }));
}

double omega_upper_bound(std::size_t d) {
  if (d == 0) throw InputError("omega needs d >= 1");
  return 1.0 - 1.0 / std::sqrt(static_cast<double>(d));
}

double omega(std::span<const double> h) {
  if (h.empty()) throw InputError("omega needs d >= 1");
  double l1 = 0.0;
  double sumsq = 0.0;
  double peak = 0.0;
  for (double x : h) {
    if (!std::isfinite(x)) throw InputError("omega: non-finite entry");
    const double a = std::abs(x);
    l1 += a;
    sumsq += a * a;
    peak = std::max(peak, a);
  }
  if (peak == 0.0) throw DomainError("omega undefined at origin");
  if (sumsq < std::numeric_limits<double>::min()) {
    throw DomainError("omega undefined at origin (2-norm underflows)");
  }
  const double d = static_cast<double>(h.size());
  if (!std::isfinite(sumsq) || !std::isfinite(l1)) {
    // Rescale by the peak so large but finite vectors still evaluate.
    l1 = 0.0;
    sumsq = 0.0;
    for (double x : h) {
      const double a = std::abs(x) / peak;
      l1 += a;
      sumsq += a * a;
    }
  }
  const double value = 1.0 - l1 / std::sqrt(d * sumsq);
  return std::clamp(value, 0.0, omega_upper_bound(h.size()));
}

namespace {

void require_positive_trace(const Spectrum& s, const char* what) {
  if (s.empty() || !(s.trace() > 0.0)) {
    throw DomainError(std::string(what) + ": spectrum has zero trace");
  }
}

}  // namespace

double spectral_entropy(const Spectrum& s) {
  require_positive_trace(s, "spectral_entropy");
  double entropy = 0.0;
  for (double v : s.eigenvalues()) {
    if (v <= 0.0) continue;
    const double p = v / s.trace();
    entropy -= p * std::log(p);
  }
  return std::clamp(entropy, 0.0, std::log(static_cast<double>(s.size())));
}

double effective_rank(const Spectrum& s) {
  return std::clamp(std::exp(spectral_entropy(s)), 1.0, static_cast<double>(s.size()));
}

double pr_dimension(const Spectrum& s) {
  require_positive_trace(s, "pr_dimension");
  // Normalise first so the squares cannot overflow.
  const double top = s.largest();
  double sum = 0.0;
  double sumsq = 0.0;
  for (double v : s.eigenvalues()) {
    const double x = v / top;
    sum += x;
    sumsq += x * x;
  }
  return std::clamp(sum * sum / sumsq, 1.0, static_cast<double>(s.rank()));
}

}  // namespace lgeo
