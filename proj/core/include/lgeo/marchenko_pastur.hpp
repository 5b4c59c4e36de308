#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lgeo/observables.hpp"

namespace lgeo::rmt {

/// Marchenko-Pastur null: white noise of variance sigma2, aspect ratio c = d/T.
class MPModel {
 public:
  MPModel(double sigma2, double c);

  double sigma2() const noexcept { return sigma2_; }
  double c() const noexcept { return c_; }
  double lambda_minus() const noexcept { return lambda_minus_; }
  double lambda_plus() const noexcept { return lambda_plus_; }
  /// Weight of the atom at zero, 1 - 1/c for c > 1 and 0 otherwise.
  double mass_at_zero() const noexcept { return c_ > 1.0 ? 1.0 - 1.0 / c_ : 0.0; }

  bool operator==(const MPModel&) const = default;

 private:
  double sigma2_;
  double c_;
  double lambda_minus_;
  double lambda_plus_;
};

struct Spike {
  double eigenvalue;
  std::size_t index;  // position in the descending spectrum
};

struct SpikeSet {
  std::vector<Spike> outliers;
  double margin = 0.0;

  std::size_t count() const noexcept { return outliers.size(); }
};

struct BBPPrediction {
  bool detectable = false;
  std::optional<double> predicted_outlier;
};

inline constexpr double kDefaultSpikeMargin = 0.05;

/// Continuous part of the density. Throws InputError for lambda < 0.
double mp_density(double lambda, const MPModel& m);

/// Distribution function including the zero atom; adaptive quadrature,
/// absolute error below 1e-8.
double mp_cdf(double lambda, const MPModel& m);

/// Inverse of mp_cdf for u in [0, 1]; values inside the zero atom map to 0.
double mp_quantile(double u, const MPModel& m);

/// Median-matched noise level from the Tukey-fenced bulk of s.
/// Throws FitError when fewer than 10 bulk eigenvalues remain.
MPModel fit_sigma2(const Spectrum& s, double c);

/// Eigenvalues above lambda_plus * (1 + margin), descending.
SpikeSet detect_spikes(const Spectrum& s, const MPModel& m, double margin = kDefaultSpikeMargin);

/// Spiked-Wishart asymptotics: detectable iff theta > sigma2 sqrt(c), with
/// outlier location (sigma2 + theta)(1 + c sigma2 / theta).
BBPPrediction bbp_predict(const MPModel& m, double theta);

/// Kolmogorov-Smirnov distance between the bulk (spikes removed with the
/// default margin) and mp_cdf. Throws FitError if no bulk remains.
double ks_statistic(const Spectrum& s, const MPModel& m);

}  // namespace lgeo::rmt
