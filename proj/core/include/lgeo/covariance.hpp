#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgeo/observables.hpp"

namespace lgeo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest hidden dimension accepted by the dense eigensolver paths.
inline constexpr std::size_t kMaxDimension = 8192;

/// T x d batch of latent states for one layer (rows are samples).
struct ActivationMatrix {
  Matrix data;
  int layer = 0;
  std::string model_id;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(data.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(data.cols()); }
};

/// Symmetric d x d sample covariance with the number of rows it came from.
struct CovarianceMatrix {
  Matrix entries;
  std::size_t sample_count = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

struct ESDHistogram {
  std::vector<double> bin_edges;  // size bins + 1, ascending
  std::vector<double> densities;  // size bins

  std::size_t bins() const noexcept { return densities.size(); }
  /// Sum of density * width; 1 for a valid histogram.
  double mass() const;
};

struct EigenDecomposition {
  Spectrum spectrum;
  Matrix vectors;  // column i pairs with spectrum[i]
};

enum class GramMode { Auto, On, Off };

/// Throws InputError unless X has >= 2 rows, >= 1 column and finite entries.
void validate_activations(const ActivationMatrix& X);

/// Unbiased (1/(T-1)) covariance of the rows of X, centered on the batch mean.
CovarianceMatrix estimate_covariance(const ActivationMatrix& X);

/// Full descending spectrum of a covariance matrix. Rejects asymmetric
/// input (beyond 1e-10 relative) and eigenvalues below -tol.
Spectrum eigendecompose(const CovarianceMatrix& C);
EigenDecomposition eigendecompose_with_vectors(const CovarianceMatrix& C);

/// Spectrum from the T x T Gram matrix of centered rows, zero-padded to d.
Spectrum gram_spectrum(const ActivationMatrix& X);

/// Covariance spectrum of X; Auto picks the Gram path when T < d.
Spectrum covariance_spectrum(const ActivationMatrix& X, GramMode mode = GramMode::Auto);

/// Eigenvalues (descending) of an arbitrary symmetric matrix, no PSD check.
std::vector<double> symmetric_eigenvalues(const Matrix& A);

/// Histogram with a fixed number of equal-width bins over [min, max].
ESDHistogram esd(const Spectrum& s, int bins);
/// Histogram with Freedman-Diaconis bin width.
ESDHistogram esd(const Spectrum& s);
int freedman_diaconis_bins(const Spectrum& s);

}  // namespace lgeo
