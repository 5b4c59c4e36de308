#include "lgeo/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "lgeo/error.hpp"
#include "stats.hpp"

namespace lgeo {

namespace {

constexpr double kSymmetryTol = 1e-10;

Matrix centered_rows(const ActivationMatrix& X) {
  const Eigen::RowVectorXd mean = X.data.colwise().mean();
  return X.data.rowwise() - mean;
}

void check_dimension(std::size_t d) {
  if (d > kMaxDimension) {
    throw InputError("dimension " + std::to_string(d) + " exceeds the supported maximum of " +
                     std::to_string(kMaxDimension));
  }
}

Matrix checked_symmetric(const Matrix& A) {
  if (A.rows() != A.cols()) throw InputError("covariance matrix is not square");
  if (!A.allFinite()) throw InputError("covariance matrix has non-finite entries");
  const double scale = A.norm();
  const double asym = (A - A.transpose()).norm();
  if (asym > kSymmetryTol * std::max(scale, 1e-300)) {
    throw InputError("matrix is not symmetric (relative asymmetry " +
                     std::to_string(asym / scale) + ")");
  }
  return 0.5 * (A + A.transpose());
}

std::vector<double> descending(const Vector& ascending) {
  std::vector<double> out(ascending.data(), ascending.data() + ascending.size());
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

double ESDHistogram::mass() const {
  double total = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    total += densities[i] * (bin_edges[i + 1] - bin_edges[i]);
  }
  return total;
}

void validate_activations(const ActivationMatrix& X) {
  if (X.data.rows() < 2) throw InputError("activation matrix needs at least 2 rows");
  if (X.data.cols() < 1) throw InputError("activation matrix needs at least 1 column");
  if (!X.data.allFinite()) throw InputError("activation matrix has non-finite entries");
}

CovarianceMatrix estimate_covariance(const ActivationMatrix& X) {
  validate_activations(X);
  check_dimension(X.cols());
  const Matrix centered = centered_rows(X);
  const auto d = X.data.cols();
  Matrix C = Matrix::Zero(d, d);
  C.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(),
                                                1.0 / static_cast<double>(X.rows() - 1));
  C.triangularView<Eigen::StrictlyUpper>() = C.transpose();
  return {std::move(C), X.rows()};
}

std::vector<double> symmetric_eigenvalues(const Matrix& A) {
  const Matrix S = checked_symmetric(A);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw FitError("symmetric eigensolver did not converge");
  return descending(solver.eigenvalues());
}

Spectrum eigendecompose(const CovarianceMatrix& C) {
  check_dimension(C.dim());
  return Spectrum(symmetric_eigenvalues(C.entries));
}

EigenDecomposition eigendecompose_with_vectors(const CovarianceMatrix& C) {
  check_dimension(C.dim());
  const Matrix S = checked_symmetric(C.entries);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw FitError("symmetric eigensolver did not converge");
  EigenDecomposition out{Spectrum(descending(solver.eigenvalues())),
                         solver.eigenvectors().rowwise().reverse()};
  return out;
}

Spectrum gram_spectrum(const ActivationMatrix& X) {
  validate_activations(X);
  check_dimension(X.cols());
  const Matrix centered = centered_rows(X);
  const auto T = centered.rows();
  Matrix G = Matrix::Zero(T, T);
  G.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0 / static_cast<double>(T - 1));
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(G, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw FitError("symmetric eigensolver did not converge");
  std::vector<double> values = descending(solver.eigenvalues());
  values.resize(X.cols(), 0.0);
  return Spectrum(std::move(values));
}

Spectrum covariance_spectrum(const ActivationMatrix& X, GramMode mode) {
  const bool use_gram =
      mode == GramMode::On || (mode == GramMode::Auto && X.rows() < X.cols());
  return use_gram ? gram_spectrum(X) : eigendecompose(estimate_covariance(X));
}

ESDHistogram esd(const Spectrum& s, int bins) {
  if (s.empty()) throw InputError("esd: empty spectrum");
  if (bins < 1) throw InputError("esd: bins must be >= 1");
  const auto& v = s.eigenvalues();
  double lo = v.back();
  double hi = v.front();
  if (hi - lo <= 0.0) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  ESDHistogram h;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.bin_edges[i] = lo + width * i;
  h.bin_edges.back() = hi;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double x : v) {
    auto idx = static_cast<long>(std::floor((x - lo) / width));
    idx = std::clamp(idx, 0L, static_cast<long>(bins) - 1);
    counts[static_cast<std::size_t>(idx)] += 1.0;
  }
  const double n = static_cast<double>(v.size());
  h.densities.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    h.densities[i] = counts[i] / (n * (h.bin_edges[i + 1] - h.bin_edges[i]));
  }
  return h;
}

int freedman_diaconis_bins(const Spectrum& s) {
  if (s.empty()) throw InputError("esd: empty spectrum");
  std::vector<double> asc(s.eigenvalues().rbegin(), s.eigenvalues().rend());
  const double range = asc.back() - asc.front();
  const double iqr = detail::quantile_sorted(asc, 0.75) - detail::quantile_sorted(asc, 0.25);
  const double n = static_cast<double>(asc.size());
  if (range <= 0.0) return 1;
  if (iqr <= 0.0) return static_cast<int>(std::ceil(std::log2(n))) + 1;  // Sturges
  const double width = 2.0 * iqr / std::cbrt(n);
  return std::clamp(static_cast<int>(std::ceil(range / width)), 1, 10000);
}

ESDHistogram esd(const Spectrum& s) { return esd(s, freedman_diaconis_bins(s)); }

}  // namespace lgeo
