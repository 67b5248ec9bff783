#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pseudospec/pseudospectrum.hpp"
#include "pseudospec/structure.hpp"
#include "pseudospec/types.hpp"

namespace pseudospec {

struct MultiplicityProfile {
  int mu_eps = 0;  // max over components of the baseline multiplicity sum
  std::vector<std::pair<int, int>> per_component;  // (label, sum of m(alpha, A))
  int m_of_A = 0;  // max eigenvalue multiplicity of A
};

/// mu(eps, A) over a labeled region. Throws CoverageError when an eigenvalue
/// of A cannot be assigned to any component.
MultiplicityProfile mu_eps(const ComplexMatrix& a, double eps, const GridRegion& region,
                           double cluster_tol = -1.0);

struct SimpleGuaranteeResult {
  bool verdict = false;  // region has n components
  int samples_checked = 0;
  int simple_count = 0;
  bool empirical_ok = true;
  bool grid_artifact_warning = false;  // verdict true but a sample was non-simple
};

/// If the structured region has n components, every A + M_S(z) with ||z|| < eps
/// has simple eigenvalues; the empirical arm verifies this on strict-ball draws.
SimpleGuaranteeResult simple_eigenvalue_guarantee(const ComplexMatrix& a, const StructurePattern& s,
                                                  double eps, const GridRegion& region,
                                                  std::uint64_t seed = 0, int samples = 200,
                                                  double cluster_tol = -1.0);

struct DistanceBoundResult {
  double eps_star = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool open_above = false;  // mu(eps_hi, A) <= k already
  Index n_re = 0, n_im = 0;  // grid the certificate was computed on
};

/// sup{eps : mu(eps, A) <= k} by bisection on a grid fixed once per run
/// (sigma_min field precomputed, so mu is grid-exactly monotone in eps).
/// Lower-bounds the distance from A to matrices with max multiplicity > k.
DistanceBoundResult distance_lower_bound(const ComplexMatrix& a, int k, double eps_lo,
                                         double eps_hi, Index resolution = 401,
                                         double cluster_tol = -1.0);

struct WitnessResult {
  double distance = 0.0;
  ComplexMatrix x;
};

/// Searches for X with clustered max multiplicity >= k+1, upper-bounding the
/// true minimum distance. Collapses eigenvalue subsets to the center of their
/// smallest enclosing circle through the Schur form; random subset trials
/// under `budget` when full enumeration is too large.
std::optional<WitnessResult> witness_higher_multiplicity(const ComplexMatrix& a, int k, int budget,
                                                         std::uint64_t seed,
                                                         double cluster_tol = -1.0);

}  // namespace pseudospec
