#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pseudospec/pseudospectrum.hpp"
#include "pseudospec/structure.hpp"
#include "pseudospec/types.hpp"

namespace pseudospec {

/// Matched eigenvalue trajectories of Z(t) = A + M_S(t z), t in [0, 1].
struct TrajectoryRecord {
  std::vector<double> t_samples;  // increasing, endpoints 0 and 1 present
  ComplexMatrix paths;            // row i = path i, one column per t sample
  std::vector<double> step_residuals;  // max matched displacement per accepted step
  std::vector<int> distinct_counts;    // clustered count per sample

  struct Candidate {
    double t_lo = 0, t_hi = 0;
    int u_before = 0, u_after = 0;
  };
  std::vector<Candidate> bifurcation_candidates;
};

/// Bottleneck assignment between two equal-length eigenvalue lists: minimizes
/// the maximum pairwise displacement, ties by total displacement, then by the
/// matched values in lexicographic order (so the matched pairs do not depend
/// on the input ordering of `next`). Returns perm with prev[i] -> next[perm[i]].
std::vector<Index> match_step(const ComplexVector& prev, const ComplexVector& next);

/// Continuation of the spectrum along Z(t). Steps are bisected until the max
/// matched displacement is <= max_disp (or the step underflows 1e-12, which
/// throws DiscontinuityError since finite matrices cannot jump).
TrajectoryRecord track(const ComplexMatrix& a, const StructurePattern& s,
                       const PerturbationVector& z, int initial_steps, double max_disp,
                       double cluster_tol = -1.0);

struct ProfilePoint {
  double t = 0;
  int u_resultant = 0;  // n - nullity(R(p_Z(t), p'_Z(t)))
  int u_clustered = 0;  // diagnostic cross-check; authoritative for verdicts
};

/// u(t) profile over a sorted t grid.
std::vector<ProfilePoint> distinct_count_profile(const ComplexMatrix& a, const StructurePattern& s,
                                                 const PerturbationVector& z,
                                                 const std::vector<double>& t_grid,
                                                 std::optional<double> rank_tol = std::nullopt,
                                                 double cluster_tol = -1.0);

/// Endpoint-dense Chebyshev points on [0, 1] (default grid for bifurcation scans).
std::vector<double> chebyshev_grid(Index count);

struct BifurcationResult {
  bool found = false;
  double t_star = 0.0;
  double width = 0.0;
  std::string note;
};

/// Localizes a drop of the distinct-eigenvalue count inside the bracket to
/// width <= 1e-9. When the clustered counts at the endpoints differ, this is
/// plain bisection on the u(t) profile; an interior drop is first located by
/// golden-section minimization of the minimal eigenvalue gap (the drop set is
/// finite, so endpoint bisection alone cannot see it). A bracket with constant
/// u yields found = false.
BifurcationResult refine_bifurcation(const ComplexMatrix& a, const StructurePattern& s,
                                     const PerturbationVector& z, double t_lo, double t_hi,
                                     double cluster_tol = -1.0);

struct MultiplicityConstancyVerdict {
  bool pass = false;
  bool interval_patterns_constant = false;
  bool component_sums_constant = false;
  int unassigned_count = 0;  // path values that landed in no component
  std::vector<std::vector<int>> interval_patterns;      // sorted pattern per interval
  std::vector<std::vector<int>> component_sum_traces;   // [component-1][sample]
  std::vector<std::string> violations;
};

/// Checks that (a) between consecutive bifurcation candidates the clustered
/// multiplicity pattern is constant, and (b) per-component multiplicity sums
/// are constant over the whole trajectory, bifurcation points included.
MultiplicityConstancyVerdict multiplicity_constancy_check(const TrajectoryRecord& record,
                                                          const GridRegion& region,
                                                          double cluster_tol = -1.0);

struct LocalConservationVerdict {
  bool pass = false;
  bool spectrum_contained = false;  // spectrum(A') inside the union of eta-balls
  int failed_ball = -1;             // index into centers, -1 when none
  std::vector<Complex> centers;     // distinct eigenvalues of A
  std::vector<int> expected;        // m(lambda_i, A)
  std::vector<int> ball_sums;       // eigenvalues of A' per ball
};

/// Realizes the local conservation identity: spectrum(A') lies in the union
/// of eta-balls around the distinct eigenvalues of A and each ball carries
/// exactly the baseline multiplicity. Requires 0 < eta < (min gap)/2.
LocalConservationVerdict local_conservation_check(const ComplexMatrix& a,
                                                  const ComplexMatrix& a_prime, double eta,
                                                  double cluster_tol = -1.0);

}  // namespace pseudospec
