#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "pseudospec/structure.hpp"
#include "pseudospec/types.hpp"

namespace pseudospec {

enum class Provenance : std::uint8_t {
  kCertifiedOutside = 0,  // unstructured mode only
  kOutsideUnknown = 1,    // structured mode: not reached by any certificate
  kSampledInside = 2,     // hit by an eigenvalue of a sampled A + M_S(z)
  kCertifiedInside = 3,   // sigma_min test (unstructured) or feasibility witness (refine)
};

enum class RegionMode : std::uint8_t { kUnstructured, kStructured };

struct Box {
  double re_min = 0, re_max = 0, im_min = 0, im_max = 0;
  bool contains(Complex z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

/// Rasterized pseudospectrum. Cells are indexed (ix, iy) with ix along the
/// real axis; storage is row-major over iy. Point-to-cell uses the half-open
/// convention [x, x + dx).
struct GridRegion {
  Box box;
  Index n_re = 0, n_im = 0;
  double epsilon = 0.0;
  RegionMode mode = RegionMode::kUnstructured;
  std::vector<std::uint8_t> inside;
  std::vector<int> labels;  // 0 outside, 1..component_count
  std::vector<Provenance> provenance;
  int component_count = 0;

  Index cell_count() const { return n_re * n_im; }
  Index cell_index(Index ix, Index iy) const { return iy * n_re + ix; }
  double cell_dre() const { return (box.re_max - box.re_min) / static_cast<double>(n_re); }
  double cell_dim() const { return (box.im_max - box.im_min) / static_cast<double>(n_im); }
  double cell_diag() const;
  Complex cell_center(Index ix, Index iy) const;
  /// False when lambda is outside the box.
  bool locate(Complex lambda, Index& ix, Index& iy) const;
};

/// lambda in Lambda_eps(A) via sigma_min(lambda I - A) <= eps.
bool unstructured_membership(const ComplexMatrix& a, Complex lambda, double eps);

/// Result of the structured distance upper-bound search. When no feasible z
/// meets the residual tolerance after all restarts, feasible is false
/// (lambda may be unreachable under S) and d_hat/witness are meaningless.
struct StructuredDistanceResult {
  bool feasible = false;
  double d_hat = std::numeric_limits<double>::infinity();
  PerturbationVector witness;
  double residual = std::numeric_limits<double>::infinity();
};

/// Upper bound on min{ ||z|| : lambda in spectrum(A + M_S(z)) }. Parameterizes
/// by a unit eigenvector candidate v, eliminates z by least squares against
/// Phi(v) (the n x s matrix with Phi[i_k, k] = v(j_k)), and minimizes the
/// feasibility-penalized norm over v by projected gradient with random
/// restarts. Best-of over restarts, so d_hat is nonincreasing in restarts.
StructuredDistanceResult structured_distance_upper(const ComplexMatrix& a,
                                                   const StructurePattern& s, Complex lambda,
                                                   int restarts, std::uint64_t seed);

struct GridOptions {
  Box box;
  bool auto_box = false;  // ignore box, derive one from the spectrum (and sweep)
  Index n_re = 201, n_im = 201;
  Index samples = 2000;
  std::uint64_t seed = 0;
  bool refine = false;
  int refine_restarts = 3;
};

/// Rasterizes Lambda_eps(A) (s == nullptr) or an inner approximation of
/// Lambda'_{S,eps}(A). Structured mode sweeps z = 0, strict-ball samples and
/// any extra_zs (each must satisfy ||z|| < eps), marking every cell hit by an
/// eigenvalue of A + M_S(z); with refine set, cells adjacent to the marked set
/// whose center admits a feasibility witness with d_hat <= eps are added.
/// Throws BoxError when an eigenvalue of A lies outside the box.
GridRegion grid_pseudospectrum(const ComplexMatrix& a, const StructurePattern* s, double eps,
                               const GridOptions& opt,
                               const std::vector<PerturbationVector>& extra_zs = {});

/// Flood-fill labeling with 8-connectivity; labels in row-major first-visit order.
GridRegion connected_components(GridRegion region);

/// Label of the cell containing lambda, else of the nearest inside cell within
/// 2 cell diagonals, else 0 (outside).
int component_of(Complex lambda, const GridRegion& region);

struct ComponentReport {
  int component_id = 0;
  int baseline_sum = 0;
  std::vector<std::pair<int, int>> per_z_sums;  // (z index, multiplicity sum)
  bool conserved = false;
  bool nonempty_for_all_z = false;
};

struct ComponentCheck {
  std::vector<ComponentReport> components;
  int coverage_violations = 0;  // eigenvalues assigned to no component

  bool all_conserved() const {
    for (const auto& c : components)
      if (!c.conserved) return false;
    return true;
  }
  bool all_nonempty() const {
    for (const auto& c : components)
      if (!c.nonempty_for_all_z) return false;
    return true;
  }
};

/// Per-component multiplicity sums: baseline (z = 0) against every supplied z.
/// Every z must satisfy ||z|| < eps. cluster_tol < 0 selects the default rule.
ComponentCheck component_eigen_report(const ComplexMatrix& a, const StructurePattern& s, double eps,
                                      const GridRegion& region,
                                      const std::vector<PerturbationVector>& zs,
                                      double cluster_tol = -1.0);

}  // namespace pseudospec
