#include "pseudospec/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "pseudospec/core_linalg.hpp"
#include "pseudospec/polynomials.hpp"

namespace pseudospec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool lex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Kuhn's augmenting-path matching restricted to edges with d[i][j] <= thr.
bool perfect_matching_exists(const std::vector<std::vector<double>>& d, double thr) {
  const int n = static_cast<int>(d.size());
  std::vector<int> match_col(n, -1);
  std::vector<char> used;
  std::function<bool(int)> try_assign = [&](int i) -> bool {
    for (int j = 0; j < n; ++j) {
      if (used[j] || d[i][j] > thr) continue;
      used[j] = 1;
      if (match_col[j] < 0 || try_assign(match_col[j])) {
        match_col[j] = i;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < n; ++i) {
    used.assign(n, 0);
    if (!try_assign(i)) return false;
  }
  return true;
}

// Classic O(n^3) Hungarian algorithm; returns row -> column assignment.
std::vector<int> hungarian_min_sum(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

}  // namespace

std::vector<Index> match_step(const ComplexVector& prev, const ComplexVector& next) {
  if (prev.size() != next.size()) throw DimensionError("match_step: lists must have equal length");
  const int n = static_cast<int>(prev.size());
  if (n == 0) return {};

  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  std::vector<double> thresholds;
  thresholds.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      d[i][j] = std::abs(prev(i) - next(j));
      thresholds.push_back(d[i][j]);
    }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  // Smallest threshold admitting a perfect matching = the bottleneck value.
  std::size_t lo = 0, hi = thresholds.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (perfect_matching_exists(d, thresholds[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  const double bottleneck = thresholds[lo];

  // Min total displacement among bottleneck-optimal matchings.
  const double big = (bottleneck + 1.0) * (n + 10);
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost[i][j] = d[i][j] <= bottleneck ? d[i][j] : big;
  std::vector<int> sigma = hungarian_min_sum(cost);

  // Canonicalize exact ties by the matched values so the matched pairs do not
  // depend on the input ordering of `next`.
  bool changed = true;
  int guard = n * n + 4;
  while (changed && guard-- > 0) {
    changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const int si = sigma[i], sj = sigma[j];
        if (d[i][sj] > bottleneck || d[j][si] > bottleneck) continue;
        if (d[i][si] + d[j][sj] == d[i][sj] + d[j][si] && lex_less(next(sj), next(si))) {
          std::swap(sigma[i], sigma[j]);
          changed = true;
        }
      }
  }

  std::vector<Index> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = sigma[i];
  return perm;
}

namespace {

double path_cluster_tol(const ComplexMatrix& a, const PerturbationVector& z, double cluster_tol) {
  if (cluster_tol >= 0.0) return cluster_tol;
  return 1e-7 * (1.0 + spectral_norm(a) + z.euclidean_norm);
}

ComplexMatrix z_of_t(const ComplexMatrix& a, const StructurePattern& s,
                     const PerturbationVector& z, double t) {
  return perturbed(a, s, PerturbationVector(ComplexVector(t * z.components)));
}

struct Sample {
  double t;
  ComplexVector values;  // ordered by path identity
  double residual;       // matched displacement of the step landing here
};

// Appends samples for (t_lo, t_hi]; ordered_lo carries path identity.
void refine_segment(const ComplexMatrix& a, const StructurePattern& s,
                    const PerturbationVector& z, double t_lo, const ComplexVector& ordered_lo,
                    double t_hi, const ComplexVector& raw_hi, double max_disp,
                    std::vector<Sample>& out) {
  const std::vector<Index> perm = match_step(ordered_lo, raw_hi);
  ComplexVector ordered_hi(raw_hi.size());
  double disp = 0.0;
  for (Index i = 0; i < raw_hi.size(); ++i) {
    ordered_hi(i) = raw_hi(perm[static_cast<std::size_t>(i)]);
    disp = std::max(disp, std::abs(ordered_lo(i) - ordered_hi(i)));
  }
  if (disp <= max_disp || (t_hi - t_lo) < 1e-12) {
    if (disp > max_disp)
      throw DiscontinuityError("track: step underflow at t = " + std::to_string(t_lo) +
                               " with displacement " + std::to_string(disp));
    out.push_back({t_hi, std::move(ordered_hi), disp});
    return;
  }
  const double mid = 0.5 * (t_lo + t_hi);
  refine_segment(a, s, z, t_lo, ordered_lo, mid, eigenvalues(z_of_t(a, s, z, mid)), max_disp, out);
  refine_segment(a, s, z, mid, out.back().values, t_hi, raw_hi, max_disp, out);
}

}  // namespace

TrajectoryRecord track(const ComplexMatrix& a, const StructurePattern& s,
                       const PerturbationVector& z, int initial_steps, double max_disp,
                       double cluster_tol) {
  require_square(a, "track");
  if (initial_steps < 2) throw PreconditionError("track: initial_steps must be >= 2");
  if (max_disp <= 0.0) throw PreconditionError("track: max_disp must be positive");
  if (z.size() != s.size()) throw DimensionError("track: z does not match the pattern");

  const Index n = a.rows();
  std::vector<Sample> samples;
  samples.push_back({0.0, eigenvalues(a), 0.0});
  for (int k = 1; k <= initial_steps; ++k) {
    const double t = static_cast<double>(k) / initial_steps;
    refine_segment(a, s, z, samples.back().t, samples.back().values, t,
                   eigenvalues(z_of_t(a, s, z, t)), max_disp, samples);
  }

  TrajectoryRecord record;
  const Index count = static_cast<Index>(samples.size());
  record.t_samples.resize(count);
  record.paths.resize(n, count);
  record.step_residuals.resize(count - 1);
  record.distinct_counts.resize(count);
  const double tol = path_cluster_tol(a, z, cluster_tol);
  for (Index j = 0; j < count; ++j) {
    record.t_samples[j] = samples[j].t;
    record.paths.col(j) = samples[j].values;
    if (j > 0) record.step_residuals[j - 1] = samples[j].residual;
    record.distinct_counts[j] = cluster_spectrum(samples[j].values, tol).count_distinct();
  }
  for (Index j = 0; j + 1 < count; ++j)
    if (record.distinct_counts[j] != record.distinct_counts[j + 1])
      record.bifurcation_candidates.push_back({record.t_samples[j], record.t_samples[j + 1],
                                               record.distinct_counts[j],
                                               record.distinct_counts[j + 1]});
  return record;
}

std::vector<double> chebyshev_grid(Index count) {
  if (count < 2) throw PreconditionError("chebyshev_grid: need at least 2 points");
  std::vector<double> grid(count);
  for (Index j = 0; j < count; ++j)
    grid[j] = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(j) /
                                    static_cast<double>(count - 1)));
  grid.front() = 0.0;
  grid.back() = 1.0;
  return grid;
}

std::vector<ProfilePoint> distinct_count_profile(const ComplexMatrix& a, const StructurePattern& s,
                                                 const PerturbationVector& z,
                                                 const std::vector<double>& t_grid,
                                                 std::optional<double> rank_tol,
                                                 double cluster_tol) {
  require_square(a, "distinct_count_profile");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()))
    throw PreconditionError("distinct_count_profile: t_grid must be sorted");
  const double tol = path_cluster_tol(a, z, cluster_tol);
  std::vector<ProfilePoint> profile;
  profile.reserve(t_grid.size());
  for (double t : t_grid) {
    const ComplexVector eigs = eigenvalues(z_of_t(a, s, z, t));
    ProfilePoint point;
    point.t = t;
    point.u_clustered = cluster_spectrum(eigs, tol).count_distinct();
    point.u_resultant = static_cast<int>(count_distinct_roots(monic_from_roots(eigs), rank_tol));
    profile.push_back(point);
  }
  return profile;
}

namespace {

double min_gap(const ComplexVector& values) {
  double gap = kInf;
  for (Index i = 0; i < values.size(); ++i)
    for (Index j = i + 1; j < values.size(); ++j)
      gap = std::min(gap, std::abs(values(i) - values(j)));
  return gap;
}

}  // namespace

BifurcationResult refine_bifurcation(const ComplexMatrix& a, const StructurePattern& s,
                                     const PerturbationVector& z, double t_lo, double t_hi,
                                     double cluster_tol) {
  if (!(t_lo < t_hi)) throw PreconditionError("refine_bifurcation: need t_lo < t_hi");
  if (a.rows() < 2) return {false, 0.0, 0.0, "n < 2: spectrum cannot bifurcate"};
  const double tol = path_cluster_tol(a, z, cluster_tol);
  auto u_at = [&](double t) {
    return cluster_spectrum(eigenvalues(z_of_t(a, s, z, t)), tol).count_distinct();
  };
  auto gap_at = [&](double t) { return min_gap(eigenvalues(z_of_t(a, s, z, t))); };

  const int u_lo = u_at(t_lo);
  const int u_hi = u_at(t_hi);
  if (u_lo != u_hi) {
    double lo = t_lo, hi = t_hi;
    while (hi - lo > 1e-9) {
      const double mid = 0.5 * (lo + hi);
      if (u_at(mid) == u_lo)
        lo = mid;
      else
        hi = mid;
    }
    return {true, 0.5 * (lo + hi), hi - lo, "count jump bracketed by bisection"};
  }

  // Constant count at the endpoints: hunt an interior drop at the minimum of
  // the (continuous) smallest eigenvalue gap.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = t_lo, hi = t_hi;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = gap_at(x1), g2 = gap_at(x2);
  while (hi - lo > 1e-9) {
    if (g1 <= g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - phi * (hi - lo);
      g1 = gap_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + phi * (hi - lo);
      g2 = gap_at(x2);
    }
  }
  double t_best = t_lo;
  double g_best = gap_at(t_lo);
  for (double t : {0.5 * (lo + hi), t_hi}) {
    const double g = gap_at(t);
    if (g < g_best) {
      g_best = g;
      t_best = t;
    }
  }
  const double scale = 1.0 + spectral_norm(a) + z.euclidean_norm;
  const double width = std::max(hi - lo, 1e-12);
  const double threshold = std::max(tol, 20.0 * std::sqrt(width) * scale);
  if (g_best <= threshold) return {true, t_best, width, "interior gap minimum below merge threshold"};
  return {false, 0.0, 0.0, "distinct count constant on the bracket"};
}

MultiplicityConstancyVerdict multiplicity_constancy_check(const TrajectoryRecord& record,
                                                          const GridRegion& region,
                                                          double cluster_tol) {
  MultiplicityConstancyVerdict verdict;
  const Index count = static_cast<Index>(record.t_samples.size());
  if (count == 0) throw PreconditionError("multiplicity_constancy_check: empty record");

  double tol = cluster_tol;
  if (tol < 0.0) {
    double scale = 0.0;
    for (Index j = 0; j < count; ++j) scale = std::max(scale, record.paths.col(j).cwiseAbs().maxCoeff());
    tol = 1e-7 * (1.0 + scale);
  }

  std::vector<SpectrumReport> reports(count);
  int u_max = 0;
  for (Index j = 0; j < count; ++j) {
    reports[j] = cluster_spectrum(record.paths.col(j), tol);
    u_max = std::max(u_max, reports[j].count_distinct());
  }

  // (a) Pattern constancy on maximal runs with the full distinct count.
  verdict.interval_patterns_constant = true;
  Index j = 0;
  while (j < count) {
    if (reports[j].count_distinct() < u_max) {
      ++j;
      continue;
    }
    Index end = j;
    while (end + 1 < count && reports[end + 1].count_distinct() == u_max) ++end;
    const std::vector<int> pattern = reports[j].multiplicity_pattern();
    for (Index k = j; k <= end; ++k)
      if (reports[k].multiplicity_pattern() != pattern) {
        verdict.interval_patterns_constant = false;
        verdict.violations.push_back("pattern change inside interval around t = " +
                                     std::to_string(record.t_samples[k]));
      }
    verdict.interval_patterns.push_back(pattern);
    j = end + 1;
  }

  // (b) Per-component sums along the whole trajectory.
  const int comps = region.component_count;
  verdict.component_sum_traces.assign(comps, std::vector<int>(count, 0));
  for (Index k = 0; k < count; ++k)
    for (const auto& [value, mult] : reports[k].distinct) {
      const int label = component_of(value, region);
      if (label == 0)
        verdict.unassigned_count += 1;
      else
        verdict.component_sum_traces[label - 1][k] += mult;
    }
  verdict.component_sums_constant = true;
  for (int comp = 0; comp < comps; ++comp)
    for (Index k = 1; k < count; ++k)
      if (verdict.component_sum_traces[comp][k] != verdict.component_sum_traces[comp][0]) {
        verdict.component_sums_constant = false;
        verdict.violations.push_back("component " + std::to_string(comp + 1) + " sum changed at t = " +
                                     std::to_string(record.t_samples[k]));
        break;
      }

  verdict.pass = verdict.interval_patterns_constant && verdict.component_sums_constant &&
                 verdict.unassigned_count == 0;
  return verdict;
}

LocalConservationVerdict local_conservation_check(const ComplexMatrix& a,
                                                  const ComplexMatrix& a_prime, double eta,
                                                  double cluster_tol) {
  require_square(a, "local_conservation_check");
  if (a_prime.rows() != a.rows() || a_prime.cols() != a.cols())
    throw DimensionError("local_conservation_check: A and A' must have equal dimensions");

  const double tol = cluster_tol >= 0.0 ? cluster_tol : default_cluster_tol(a);
  const SpectrumReport base = cluster_spectrum(eigenvalues(a), tol);

  double gap = kInf;
  for (std::size_t i = 0; i < base.distinct.size(); ++i)
    for (std::size_t j = i + 1; j < base.distinct.size(); ++j)
      gap = std::min(gap, std::abs(base.distinct[i].first - base.distinct[j].first));
  if (!(eta > 0.0) || !(eta < gap / 2.0))
    throw PreconditionError("local_conservation_check: need 0 < eta < (min gap)/2 = " +
                            std::to_string(gap / 2.0));

  LocalConservationVerdict verdict;
  for (const auto& [value, mult] : base.distinct) {
    verdict.centers.push_back(value);
    verdict.expected.push_back(mult);
    verdict.ball_sums.push_back(0);
  }
  verdict.spectrum_contained = true;

  const ComplexVector primed = eigenvalues(a_prime);
  for (Index i = 0; i < primed.size(); ++i) {
    int ball = -1;
    for (std::size_t b = 0; b < verdict.centers.size(); ++b)
      if (std::abs(primed(i) - verdict.centers[b]) < eta) {
        ball = static_cast<int>(b);
        break;
      }
    if (ball < 0)
      verdict.spectrum_contained = false;
    else
      verdict.ball_sums[static_cast<std::size_t>(ball)] += 1;
  }

  verdict.pass = verdict.spectrum_contained;
  for (std::size_t b = 0; b < verdict.centers.size(); ++b)
    if (verdict.ball_sums[b] != verdict.expected[b]) {
      verdict.pass = false;
      if (verdict.failed_ball < 0) verdict.failed_ball = static_cast<int>(b);
    }
  return verdict;
}

}  // namespace pseudospec
