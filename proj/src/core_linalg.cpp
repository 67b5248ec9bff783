#include "pseudospec/core_linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pseudospec {

int SpectrumReport::max_multiplicity() const {
  int m = 0;
  for (const auto& [value, mult] : distinct) m = std::max(m, mult);
  return m;
}

std::vector<int> SpectrumReport::multiplicity_pattern() const {
  std::vector<int> pattern;
  pattern.reserve(distinct.size());
  for (const auto& [value, mult] : distinct) pattern.push_back(mult);
  std::sort(pattern.begin(), pattern.end());
  return pattern;
}

ComplexVector eigenvalues(const ComplexMatrix& a) {
  require_square(a, "eigenvalues");
  require_finite(a, "eigenvalues");
  const Index n = a.rows();
  Eigen::ComplexSchur<ComplexMatrix> schur;
  schur.setMaxIterations(100 * n);
  schur.compute(a, /*computeU=*/false);
  if (schur.info() != Eigen::Success) {
    std::vector<Complex> partial;
    if (schur.matrixT().rows() == n)
      for (Index i = 0; i < n; ++i) partial.push_back(schur.matrixT()(i, i));
    throw ConvergenceError("eigenvalues: QR iteration did not converge within 100*n sweeps",
                           std::move(partial));
  }
  return schur.matrixT().diagonal();
}

double default_cluster_tol(const ComplexMatrix& a) { return 1e-7 * (1.0 + spectral_norm(a)); }

SpectrumReport cluster_spectrum(const ComplexVector& raw, double tol) {
  if (tol < 0.0) throw PreconditionError("cluster_spectrum: tol must be nonnegative");
  SpectrumReport report;
  report.cluster_tol = tol;
  const Index n = raw.size();
  report.raw.assign(raw.data(), raw.data() + n);
  if (n == 0) return report;

  // Single-linkage union-find: join any pair within tol.
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(raw[i] - raw[j]) <= tol) {
        Index ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }

  std::vector<std::pair<Complex, int>> clusters;
  std::vector<Index> root_slot(n, -1);
  std::vector<Complex> sums;
  for (Index i = 0; i < n; ++i) {
    Index r = find(i);
    if (root_slot[r] < 0) {
      root_slot[r] = static_cast<Index>(clusters.size());
      clusters.emplace_back(Complex{0, 0}, 0);
      sums.push_back(Complex{0, 0});
    }
    Index slot = root_slot[r];
    sums[slot] += raw[i];
    clusters[slot].second += 1;
  }
  for (std::size_t c = 0; c < clusters.size(); ++c)
    clusters[c].first = sums[c] / static_cast<double>(clusters[c].second);
  std::sort(clusters.begin(), clusters.end(), [](const auto& x, const auto& y) {
    if (x.first.real() != y.first.real()) return x.first.real() < y.first.real();
    return x.first.imag() < y.first.imag();
  });
  report.distinct = std::move(clusters);
  return report;
}

RealVector singular_values(const ComplexMatrix& m) {
  if (m.size() == 0) throw DimensionError("singular_values: empty matrix");
  require_finite(m, "singular_values");
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

double sigma_min(const ComplexMatrix& m) {
  RealVector s = singular_values(m);
  return s(s.size() - 1);
}

Index nullity(const ComplexMatrix& m, std::optional<double> tol) {
  RealVector s = singular_values(m);
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double tau =
      tol ? *tol : static_cast<double>(std::max(m.rows(), m.cols())) * smax * 1e-12;
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tau) ++rank;
  return m.cols() - rank;
}

double spectral_norm(const ComplexMatrix& m) {
  RealVector s = singular_values(m);
  return s(0);
}

}  // namespace pseudospec
