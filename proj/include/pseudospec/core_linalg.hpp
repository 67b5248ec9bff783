#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pseudospec/types.hpp"

namespace pseudospec {

/// Spectrum of a matrix clustered into (value, multiplicity) pairs.
struct SpectrumReport {
  std::vector<std::pair<Complex, int>> distinct;  // sorted by (re, im) of centroid
  std::vector<Complex> raw;                       // eigenvalues with repetition
  double cluster_tol = 0.0;

  int count_distinct() const { return static_cast<int>(distinct.size()); }
  int max_multiplicity() const;
  /// Sorted multiplicity pattern, e.g. {1, 1, 2}.
  std::vector<int> multiplicity_pattern() const;
};

/// Eigenvalues of a square complex matrix, with repetition. Backed by a
/// Schur decomposition (Hessenberg reduction + shifted QR with deflation),
/// iteration cap 100 sweeps per row. Deterministic for fixed input.
ComplexVector eigenvalues(const ComplexMatrix& a);

/// Default clustering tolerance, 1e-7 * (1 + ||A||).
double default_cluster_tol(const ComplexMatrix& a);

/// Single-linkage clustering of eigenvalues at threshold tol.
/// Multiplicities always sum to raw.size(); empty input gives an empty report.
SpectrumReport cluster_spectrum(const ComplexVector& raw, double tol);

/// Singular values in descending order.
RealVector singular_values(const ComplexMatrix& m);

/// Smallest singular value (0 for any zero-dimension direction handled by caller).
double sigma_min(const ComplexMatrix& m);

/// n_cols - numerical rank. Auto tolerance: max(m,n) * sigma_max * 1e-12.
Index nullity(const ComplexMatrix& m, std::optional<double> tol = std::nullopt);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& m);

}  // namespace pseudospec
