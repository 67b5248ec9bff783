#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pseudospec/types.hpp"

namespace pseudospec {

/// Index set S of perturbable entries of an n x n matrix. Positions are held
/// 0-based and in lexicographic order; files and reports use 1-based indices,
/// converted at the I/O boundary only.
struct StructurePattern {
  Index n = 0;
  std::vector<std::pair<Index, Index>> positions;

  /// Validates, deduplicate-rejects and sorts. `positions` are 0-based here.
  static StructurePattern create(Index n, std::vector<std::pair<Index, Index>> positions);

  Index size() const { return static_cast<Index>(positions.size()); }
};

/// Perturbation vector z with its Euclidean norm cached.
struct PerturbationVector {
  ComplexVector components;
  double euclidean_norm = 0.0;

  PerturbationVector() = default;
  explicit PerturbationVector(ComplexVector z)
      : components(std::move(z)), euclidean_norm(components.norm()) {}

  static PerturbationVector zero(Index s) { return PerturbationVector(ComplexVector::Zero(s)); }
  Index size() const { return components.size(); }
};

/// M_S(z): z_k at position (i_k, j_k), zero elsewhere. Exactly linear in z.
ComplexMatrix embed(const StructurePattern& s, const PerturbationVector& z);

/// Left inverse of embed on its image: (M(i_1,j_1), ..., M(i_s,j_s)).
PerturbationVector extract(const StructurePattern& s, const ComplexMatrix& m);

/// A + M_S(z).
ComplexMatrix perturbed(const ComplexMatrix& a, const StructurePattern& s,
                        const PerturbationVector& z);

/// Deterministic samples from the complex radius-ball in C^s (uniform over the
/// 2s-real-dimensional ball). With strict set, the effective radius shrinks by
/// (1 - 1e-9) so the strict/closed distinction stays testable in floating
/// point. When count >= 2s the boundary-scaled canonical directions
/// +-r e_1, +-r e_2, ... lead the list.
std::vector<PerturbationVector> sample_ball(Index s, double radius, bool strict, Index count,
                                            std::uint64_t seed);

}  // namespace pseudospec
