#include "pseudospec/bounds.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pseudospec/core_linalg.hpp"
#include "pseudospec/parallel.hpp"
#include "pseudospec/rng.hpp"

namespace pseudospec {

MultiplicityProfile mu_eps(const ComplexMatrix& a, double eps, const GridRegion& region,
                           double cluster_tol) {
  (void)eps;
  if (region.labels.size() != static_cast<std::size_t>(region.cell_count()))
    throw PreconditionError("mu_eps: labels not computed");
  const double tol = cluster_tol >= 0.0 ? cluster_tol : default_cluster_tol(a);
  const SpectrumReport rep = cluster_spectrum(eigenvalues(a), tol);

  std::vector<int> sums(static_cast<std::size_t>(region.component_count) + 1, 0);
  for (const auto& [value, mult] : rep.distinct) {
    const int label = component_of(value, region);
    if (label == 0)
      throw CoverageError("mu_eps: eigenvalue not assigned to any component");
    sums[static_cast<std::size_t>(label)] += mult;
  }

  MultiplicityProfile profile;
  profile.m_of_A = rep.max_multiplicity();
  for (int comp = 1; comp <= region.component_count; ++comp) {
    profile.per_component.emplace_back(comp, sums[static_cast<std::size_t>(comp)]);
    profile.mu_eps = std::max(profile.mu_eps, sums[static_cast<std::size_t>(comp)]);
  }
  return profile;
}

SimpleGuaranteeResult simple_eigenvalue_guarantee(const ComplexMatrix& a, const StructurePattern& s,
                                                  double eps, const GridRegion& region,
                                                  std::uint64_t seed, int samples,
                                                  double cluster_tol) {
  require_square(a, "simple_eigenvalue_guarantee");
  SimpleGuaranteeResult result;
  result.verdict = region.component_count == a.rows();
  if (!result.verdict) return result;

  auto zs = sample_ball(s.size(), eps, /*strict=*/true, samples,
                        Rng::split(seed, static_cast<std::uint64_t>(RngStream::kSimpleGuarantee)));
  result.samples_checked = samples;
  for (const auto& z : zs) {
    const ComplexMatrix m = perturbed(a, s, z);
    const double tol = cluster_tol >= 0.0 ? cluster_tol : default_cluster_tol(m);
    if (cluster_spectrum(eigenvalues(m), tol).count_distinct() == a.rows())
      result.simple_count += 1;
  }
  result.empirical_ok = result.simple_count == result.samples_checked;
  result.grid_artifact_warning = !result.empirical_ok;
  return result;
}

namespace {

// sigma_min(center I - A) per cell; epsilon-independent, computed once per run.
struct SigmaField {
  GridRegion proto;  // geometry only
  std::vector<double> sigma;
};

SigmaField sigma_field(const ComplexMatrix& a, const Box& box, Index n_re, Index n_im) {
  SigmaField field;
  field.proto.box = box;
  field.proto.n_re = n_re;
  field.proto.n_im = n_im;
  field.proto.mode = RegionMode::kUnstructured;
  field.sigma.assign(static_cast<std::size_t>(n_re * n_im), 0.0);
  parallel_for(field.sigma.size(), [&](std::size_t c) {
    const Index iy = static_cast<Index>(c) / n_re;
    const Index ix = static_cast<Index>(c) % n_re;
    ComplexMatrix shifted = -a;
    shifted.diagonal().array() += field.proto.cell_center(ix, iy);
    field.sigma[c] = sigma_min(shifted);
  });
  return field;
}

GridRegion threshold_region(const SigmaField& field, double eps) {
  GridRegion region = field.proto;
  region.epsilon = eps;
  region.inside.assign(field.sigma.size(), 0);
  region.provenance.assign(field.sigma.size(), Provenance::kCertifiedOutside);
  for (std::size_t c = 0; c < field.sigma.size(); ++c)
    if (field.sigma[c] <= eps) {
      region.inside[c] = 1;
      region.provenance[c] = Provenance::kCertifiedInside;
    }
  return connected_components(std::move(region));
}

}  // namespace

DistanceBoundResult distance_lower_bound(const ComplexMatrix& a, int k, double eps_lo,
                                         double eps_hi, Index resolution, double cluster_tol) {
  require_square(a, "distance_lower_bound");
  if (!(0.0 < eps_lo && eps_lo < eps_hi))
    throw PreconditionError("distance_lower_bound: need 0 < eps_lo < eps_hi");
  const Index n = a.rows();
  const double tol = cluster_tol >= 0.0 ? cluster_tol : default_cluster_tol(a);
  const SpectrumReport rep = cluster_spectrum(eigenvalues(a), tol);
  const int m_of_a = rep.max_multiplicity();
  if (k < m_of_a || k > n)
    throw PreconditionError("distance_lower_bound: need m(A) <= k <= n, m(A) = " +
                            std::to_string(m_of_a));

  // Fixed box with margin eps_hi around the spectrum; fixed resolution.
  Complex center{0, 0};
  for (Index i = 0; i < rep.raw.size(); ++i) center += rep.raw[i];
  center /= static_cast<double>(rep.raw.size());
  double spread = 0.0;
  for (std::size_t i = 0; i < rep.raw.size(); ++i)
    for (std::size_t j = i + 1; j < rep.raw.size(); ++j)
      spread = std::max(spread, std::abs(rep.raw[i] - rep.raw[j]));
  const double half = spread / 2.0 + 2.0 * eps_hi;
  const Box box{center.real() - half, center.real() + half, center.imag() - half,
                center.imag() + half};
  const SigmaField field = sigma_field(a, box, resolution, resolution);

  auto mu_at = [&](double eps) {
    const GridRegion region = threshold_region(field, eps);
    return mu_eps(a, eps, region, tol).mu_eps;
  };

  if (mu_at(eps_lo) > k)
    throw PreconditionError("distance_lower_bound: mu(eps_lo) already exceeds k");

  DistanceBoundResult result;
  result.n_re = resolution;
  result.n_im = resolution;
  if (mu_at(eps_hi) <= k) {
    result.eps_star = eps_hi;
    result.bracket_lo = eps_hi;
    result.bracket_hi = eps_hi;
    result.open_above = true;
    return result;
  }

  double lo = eps_lo, hi = eps_hi;
  while (hi - lo > 1e-3 * eps_hi) {
    const double mid = 0.5 * (lo + hi);
    if (mu_at(mid) <= k)
      lo = mid;
    else
      hi = mid;
  }
  result.eps_star = lo;
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  return result;
}

namespace {

// Smallest enclosing circle of <= a few dozen points, brute force over the
// pairs and triples that can determine it.
struct Circle {
  Complex center{0, 0};
  double radius = 0.0;
};

Circle circle_from(Complex p, Complex q) {
  return {0.5 * (p + q), 0.5 * std::abs(p - q)};
}

bool circumcircle(Complex p1, Complex p2, Complex p3, Circle& out) {
  const double ax = p1.real(), ay = p1.imag();
  const double bx = p2.real(), by = p2.imag();
  const double cx = p3.real(), cy = p3.imag();
  const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
  if (std::abs(d) < 1e-14) return false;
  const double ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) +
                     (cx * cx + cy * cy) * (ay - by)) /
                    d;
  const double uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) +
                     (cx * cx + cy * cy) * (bx - ax)) /
                    d;
  out.center = Complex{ux, uy};
  out.radius = std::abs(out.center - p1);
  return true;
}

bool covers(const Circle& c, const std::vector<Complex>& pts) {
  for (Complex p : pts)
    if (std::abs(p - c.center) > c.radius * (1.0 + 1e-12) + 1e-300) return false;
  return true;
}

Circle smallest_enclosing_circle(const std::vector<Complex>& pts) {
  if (pts.size() == 1) return {pts[0], 0.0};
  Circle best{Complex{0, 0}, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Circle c = circle_from(pts[i], pts[j]);
      if (c.radius < best.radius && covers(c, pts)) best = c;
    }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      for (std::size_t l = j + 1; l < pts.size(); ++l) {
        Circle c;
        if (circumcircle(pts[i], pts[j], pts[l], c) && c.radius < best.radius && covers(c, pts))
          best = c;
      }
  return best;
}

}  // namespace

std::optional<WitnessResult> witness_higher_multiplicity(const ComplexMatrix& a, int k, int budget,
                                                         std::uint64_t seed, double cluster_tol) {
  require_square(a, "witness_higher_multiplicity");
  const Index n = a.rows();
  if (k < 1 || k >= n) throw PreconditionError("witness_higher_multiplicity: need 1 <= k < n");
  const double tol = cluster_tol >= 0.0 ? cluster_tol : default_cluster_tol(a);
  const SpectrumReport rep = cluster_spectrum(eigenvalues(a), tol);
  if (rep.max_multiplicity() >= k + 1) return WitnessResult{0.0, a};

  Eigen::ComplexSchur<ComplexMatrix> schur(a, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw ConvergenceError("witness_higher_multiplicity: Schur iteration failed", {});
  const ComplexMatrix q = schur.matrixU();
  const ComplexMatrix t = schur.matrixT();

  const int r = rep.count_distinct();
  auto try_subset = [&](std::uint64_t mask) -> std::optional<WitnessResult> {
    int total = 0;
    std::vector<Complex> pts;
    for (int i = 0; i < r; ++i)
      if (mask & (1ULL << i)) {
        total += rep.distinct[static_cast<std::size_t>(i)].second;
        pts.push_back(rep.distinct[static_cast<std::size_t>(i)].first);
      }
    if (total < k + 1 || pts.empty()) return std::nullopt;
    const Circle sec = smallest_enclosing_circle(pts);
    // Shift the selected diagonal entries of T to the circle center; the
    // unitary similarity keeps the distance at max |shift| = the radius.
    ComplexMatrix t2 = t;
    for (Index d = 0; d < n; ++d) {
      for (Complex p : pts)
        if (std::abs(t(d, d) - p) <= tol * 2.0 + 1e-14) {
          t2(d, d) = sec.center;
          break;
        }
    }
    ComplexMatrix x = q * t2 * q.adjoint();
    const double dist = spectral_norm(x - a);
    const SpectrumReport repx = cluster_spectrum(eigenvalues(x), tol);
    if (repx.max_multiplicity() >= k + 1) return WitnessResult{dist, std::move(x)};
    return std::nullopt;
  };

  std::optional<WitnessResult> best;
  auto consider = [&](std::optional<WitnessResult> cand) {
    if (cand && (!best || cand->distance < best->distance)) best = std::move(cand);
  };

  if (r <= 20) {
    for (std::uint64_t mask = 1; mask < (1ULL << r); ++mask) consider(try_subset(mask));
  } else {
    Rng rng(Rng::split(seed, static_cast<std::uint64_t>(RngStream::kWitnessSearch)));
    for (int trial = 0; trial < budget; ++trial) {
      std::uint64_t mask = 0;
      for (int i = 0; i < r; ++i)
        if (rng.uniform() < 0.5) mask |= (1ULL << i);
      consider(try_subset(mask));
    }
  }
  return best;
}

}  // namespace pseudospec
