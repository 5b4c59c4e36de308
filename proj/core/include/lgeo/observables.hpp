#pragma once

#include <span>
#include <vector>

namespace lgeo {

/// Relative floor below which eigenvalues are treated as numerical zero:
/// tol = kEigenZeroTol * max(lambda_1, 1).
inline constexpr double kEigenZeroTol = 1e-12;

double eigen_zero_tolerance(double largest) noexcept;

/// Descending, nonnegative eigenvalue sequence with cached trace.
///
/// Construction sorts the input, clamps values in [-tol, 0) to zero and
/// rejects anything more negative as non-PSD input.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::vector<double> eigenvalues);

  const std::vector<double>& eigenvalues() const noexcept { return values_; }
  double trace() const noexcept { return trace_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double largest() const { return values_.empty() ? 0.0 : values_.front(); }

  /// Number of eigenvalues above the numerical-zero floor.
  std::size_t rank() const noexcept;

 private:
  std::vector<double> values_;
  double trace_ = 0.0;
};

/// Object-integrity order parameter 1 - |h|_1 / (sqrt(d) |h|_2).
/// Throws DomainError for the zero vector (or one whose 2-norm underflows)
/// and InputError for non-finite entries.
double omega(std::span<const double> h);

/// Upper bound of omega in dimension d, attained by 1-sparse vectors.
double omega_upper_bound(std::size_t d);

double spectral_entropy(const Spectrum& s);
double effective_rank(const Spectrum& s);
double pr_dimension(const Spectrum& s);

}  // namespace lgeo
