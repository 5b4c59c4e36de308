#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lgeo/covariance.hpp"
#include "lgeo/error.hpp"

namespace lgeo::phase {

inline constexpr double kDefaultTau = 0.75;

struct ProfilePoint {
  int layer = 0;
  double gamma = 0.0;  // layer / total_layers
  double mean_omega = 0.0;
  double var_omega = 0.0;
  std::size_t n = 1;
};

/// Per-layer order-parameter statistics for one model.
struct DepthProfile {
  std::string model_id;
  int total_layers = 0;
  std::vector<ProfilePoint> points;

  /// Throws InputError if layers are not strictly increasing within
  /// [0, total_layers], gamma != layer / L, or statistics are out of range.
  void validate() const;
};

/// Assembles a profile, setting gamma = layer / total_layers. With
/// total_layers <= 0, L is taken as max(layer) + 1.
DepthProfile make_profile(std::string model_id, std::vector<ProfilePoint> points,
                          int total_layers = 0);

struct ThresholdClass {
  bool exceeds = false;
  std::optional<int> onset_layer;
};

struct PhaseReport {
  std::string model_id;
  int total_layers = 0;
  double gamma_c_hat = 0.0;
  std::pair<int, int> jump_layer_pair{0, 0};
  double jump_magnitude = 0.0;
  std::optional<double> susceptibility_peak_gamma;
  bool exceeds_threshold = false;
  double tau_c = kDefaultTau;
  std::optional<int> onset_layer;

  bool operator==(const PhaseReport&) const = default;
};

/// Mean and population variance of omega over the rows of each batch.
/// Batches are ordered by their layer field.
DepthProfile build_profile(std::span<const ActivationMatrix> batches, int total_layers = 0);

/// Largest |m(l+1) - m(l)| over adjacent layers; ties go to the smallest
/// layer; gamma_c_hat = (l + 1) / L.
PhaseReport critical_depth(const DepthProfile& p, double tau_c = kDefaultTau);

std::optional<double> susceptibility_peak(const DepthProfile& p);

ThresholdClass classify_phase(const DepthProfile& p, double tau_c = kDefaultTau);

// ---------------------------------------------------------------------------
// Finite-size scaling collapse

struct ScaledCurve {
  double scale = 1.0;  // model size N
  DepthProfile profile;
};

struct FSSFit {
  double beta_over_nu = 0.0;
  double one_over_nu = 0.0;
  double gamma_c = 0.0;
  double collapse_residual = 0.0;
  int evaluations = 0;
};

struct FSSOptions {
  int bins = 20;
  int max_evaluations = 20000;
  double tolerance = 1e-10;
  /// Start grid; gamma_c starts default to quantiles of the observed gammas.
  std::vector<double> beta_over_nu_starts{0.0, 0.25, 0.5};
  std::vector<double> one_over_nu_starts{0.25, 0.5, 1.0};
  std::vector<double> gamma_c_starts{};
};

/// Collapse dispersion at fixed exponents: points are mapped to
/// ((gamma - gamma_c) N^{1/nu}, m N^{beta/nu}), binned in x, and the summed
/// within-bin variance is divided by the total variance of y.
double collapse_dispersion(std::span<const ScaledCurve> curves, double beta_over_nu,
                           double one_over_nu, double gamma_c, int bins = 20);

/// Thrown when no start of the search converges; carries the best point seen.
class FSSFitError : public FitError {
 public:
  FSSFitError(const std::string& what, FSSFit best) : FitError(what), best_(best) {}
  const FSSFit& best() const noexcept { return best_; }

 private:
  FSSFit best_;
};

/// Multi-start Nelder-Mead minimisation of collapse_dispersion.
/// Needs >= 3 scales with >= 5 points each (InputError otherwise).
FSSFit fss_collapse(std::span<const ScaledCurve> curves, const FSSOptions& opts = {});

}  // namespace lgeo::phase
