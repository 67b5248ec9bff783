#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pseudospec/core_linalg.hpp"
#include "pseudospec/homotopy.hpp"
#include "test_helpers.hpp"

using namespace pseudospec;
using namespace pseudospec::testing;

namespace {

StructurePattern s21() { return StructurePattern::create(2, {{1, 0}}); }

PerturbationVector pv1(Complex z) {
  ComplexVector v(1);
  v << z;
  return PerturbationVector(std::move(v));
}

ComplexVector cv(std::initializer_list<Complex> values) {
  ComplexVector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (Complex x : values) v(i++) = x;
  return v;
}

// Brute-force (max, sum) lexicographic optimum over all permutations.
std::pair<double, double> brute_objective(const ComplexVector& prev, const ComplexVector& next) {
  const int n = static_cast<int>(prev.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best_max = std::numeric_limits<double>::infinity();
  double best_sum = std::numeric_limits<double>::infinity();
  do {
    double mx = 0, sum = 0;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(prev(i) - next(perm[static_cast<std::size_t>(i)]));
      mx = std::max(mx, d);
      sum += d;
    }
    if (mx < best_max || (mx == best_max && sum < best_sum)) {
      best_max = mx;
      best_sum = sum;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best_max, best_sum};
}

std::pair<double, double> objective_of(const ComplexVector& prev, const ComplexVector& next,
                                       const std::vector<Index>& perm) {
  double mx = 0, sum = 0;
  for (Index i = 0; i < prev.size(); ++i) {
    const double d = std::abs(prev(i) - next(perm[static_cast<std::size_t>(i)]));
    mx = std::max(mx, d);
    sum += d;
  }
  return {mx, sum};
}

}  // namespace

TEST_CASE("match_step: identity, swap, and zero displacement") {
  auto id = match_step(cv({{0, 0}, {5, 0}}), cv({{0.1, 0}, {5.0, 0}}));
  CHECK(id[0] == 0);
  CHECK(id[1] == 1);

  // prev = {1, -1}, next = {-1.05, 0.95}: bottleneck 0.05 under the swap.
  auto swap = match_step(cv({{1, 0}, {-1, 0}}), cv({{-1.05, 0}, {0.95, 0}}));
  CHECK(swap[0] == 1);
  CHECK(swap[1] == 0);

  auto same = match_step(cv({{2, 1}, {3, -1}}), cv({{2, 1}, {3, -1}}));
  CHECK(same[0] == 0);
  CHECK(same[1] == 1);

  CHECK_THROWS_AS(match_step(cv({{0, 0}}), cv({{0, 0}, {1, 0}})), DimensionError);
}

TEST_CASE("match_step achieves the brute-force bottleneck-then-sum optimum") {
  Rng rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 5);
    ComplexVector prev(n), next(n);
    for (Index i = 0; i < n; ++i) {
      prev(i) = rng.gaussian_complex();
      next(i) = rng.gaussian_complex();
    }
    const auto perm = match_step(prev, next);
    CHECK(objective_of(prev, next, perm) == brute_objective(prev, next));
  }
}

TEST_CASE("match_step matched pairs are invariant under shuffles of next") {
  Rng rng(57);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 4);
    ComplexVector prev(n), next(n);
    for (Index i = 0; i < n; ++i) {
      prev(i) = rng.gaussian_complex();
      next(i) = rng.gaussian_complex();
    }
    // Include exact duplicates to exercise tie handling.
    if (n >= 3 && trial % 3 == 0) next(2) = next(1);

    const auto base = match_step(prev, next);
    std::vector<Index> shuffle(static_cast<std::size_t>(n));
    std::iota(shuffle.begin(), shuffle.end(), Index{0});
    for (Index i = n - 1; i > 0; --i)
      std::swap(shuffle[static_cast<std::size_t>(i)],
                shuffle[static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(i + 1))]);
    ComplexVector next2(n);
    for (Index i = 0; i < n; ++i) next2(i) = next(shuffle[static_cast<std::size_t>(i)]);
    const auto perm2 = match_step(prev, next2);

    for (Index i = 0; i < n; ++i) {
      const Complex a = next(base[static_cast<std::size_t>(i)]);
      const Complex b = next2(perm2[static_cast<std::size_t>(i)]);
      CHECK(a == b);
    }
  }
}

TEST_CASE("match_step tie case: equal costs resolved by matched values") {
  // All four displacements equal 1; the value-lex rule pairs prev(0) with i.
  auto perm = match_step(cv({{0, 0}, {1, 1}}), cv({{1, 0}, {0, 1}}));
  CHECK(perm[0] == 1);
  CHECK(perm[1] == 0);
}

TEST_CASE("track: Jordan square-root paths") {
  auto record = track(j2(), s21(), pv1(Complex{1, 0}), 8, 0.05);
  REQUIRE(record.t_samples.front() == 0.0);
  REQUIRE(record.t_samples.back() == 1.0);
  const Index last = static_cast<Index>(record.t_samples.size()) - 1;
  // Paths end at +-1.
  const Complex p0 = record.paths(0, last), p1 = record.paths(1, last);
  CHECK(std::abs(std::abs(p0) - 1.0) < 1e-6);
  CHECK(std::abs(std::abs(p1) - 1.0) < 1e-6);
  CHECK(std::abs(p0 + p1) < 1e-6);
  // Interior samples follow +-sqrt(t).
  for (std::size_t j = 0; j < record.t_samples.size(); ++j) {
    const double t = record.t_samples[j];
    const double r = std::sqrt(t);
    const double d0 = std::abs(record.paths(0, static_cast<Index>(j)));
    CHECK(std::abs(d0 - r) < 1e-8);
  }
  // u(t): 1 at t = 0, 2 afterwards.
  CHECK(record.distinct_counts.front() == 1);
  CHECK(record.distinct_counts.back() == 2);
  REQUIRE(!record.bifurcation_candidates.empty());
  CHECK(record.bifurcation_candidates.front().t_lo == 0.0);
}

TEST_CASE("track: z = 0 keeps all paths constant") {
  auto record = track(diag2(1.0, 2.0), StructurePattern::create(2, {{0, 0}}), pv1(Complex{0, 0}),
                      4, 0.5);
  for (Index j = 0; j < record.paths.cols(); ++j) {
    CHECK(std::abs(record.paths(0, j) - record.paths(0, 0)) < 1e-12);
    CHECK(std::abs(record.paths(1, j) - record.paths(1, 0)) < 1e-12);
  }
  CHECK(record.bifurcation_candidates.empty());
}

TEST_CASE("track: diagonal path moves linearly, the other stays put") {
  auto record = track(diag2(0.0, 5.0), StructurePattern::create(2, {{0, 0}}),
                      pv1(Complex{0.9, 0}), 8, 0.2);
  for (std::size_t j = 0; j < record.t_samples.size(); ++j) {
    const double t = record.t_samples[j];
    const Index col = static_cast<Index>(j);
    const bool first_moves = std::abs(record.paths(0, 0)) < 1.0;
    const Complex moving = first_moves ? record.paths(0, col) : record.paths(1, col);
    const Complex fixed = first_moves ? record.paths(1, col) : record.paths(0, col);
    CHECK(std::abs(moving - Complex{0.9 * t, 0}) < 1e-9);
    CHECK(std::abs(fixed - Complex{5, 0}) < 1e-9);
  }
}

TEST_CASE("track endpoint consistency on random inputs") {
  Rng rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 3);
    ComplexMatrix a = random_matrix(n, rng);
    StructurePattern s = StructurePattern::create(n, {{0, 0}, {n - 1, 0}});
    ComplexVector z(2);
    z << 0.3 * rng.gaussian_complex(), 0.3 * rng.gaussian_complex();
    PerturbationVector zp(z);
    auto record = track(a, s, zp, 4, 0.1 * (1.0 + spectral_norm(a)));

    const double tol = 1e-6 * (1.0 + spectral_norm(a));
    ComplexVector end = record.paths.col(record.paths.cols() - 1);
    ComplexVector target = eigenvalues(perturbed(a, s, zp));
    auto perm = match_step(end, target);
    for (Index i = 0; i < n; ++i)
      CHECK(std::abs(end(i) - target(perm[static_cast<std::size_t>(i)])) < tol);
  }
}

TEST_CASE("distinct count profile: Jordan, separated diagonal, crossing diagonal") {
  auto profile = distinct_count_profile(j2(), s21(), pv1(Complex{1, 0}), {0.0, 0.25, 0.5, 1.0});
  REQUIRE(profile.size() == 4);
  CHECK(profile[0].u_resultant == 1);
  CHECK(profile[1].u_resultant == 2);
  CHECK(profile[2].u_resultant == 2);
  CHECK(profile[3].u_resultant == 2);
  for (const auto& p : profile) CHECK(p.u_clustered == p.u_resultant);

  auto steady = distinct_count_profile(diag2(1.0, 2.0), StructurePattern::create(2, {{0, 0}}),
                                       pv1(Complex{0.1, 0}), {0.0, 0.3, 0.7, 1.0});
  for (const auto& p : steady) CHECK(p.u_resultant == 2);

  auto crossing = distinct_count_profile(diag2(0.0, 1.0), StructurePattern::create(2, {{0, 0}}),
                                         pv1(Complex{2, 0}), {0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(crossing[2].u_resultant == 1);
  CHECK(crossing[2].u_clustered == 1);
  CHECK(crossing[0].u_resultant == 2);
  CHECK(crossing[4].u_resultant == 2);
}

TEST_CASE("resultant count agrees with clustering when gaps are healthy") {
  Rng rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 3);
    ComplexMatrix a = random_matrix(n, rng);
    StructurePattern s = StructurePattern::create(n, {{0, 0}});
    auto profile = distinct_count_profile(a, s, pv1(Complex{0.2, 0.1}), {0.0, 0.5, 1.0});
    for (const auto& p : profile) {
      ComplexVector eigs = eigenvalues(perturbed(
          a, s, PerturbationVector(ComplexVector(p.t * cv({{0.2, 0.1}})))));
      double gap = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) gap = std::min(gap, std::abs(eigs(i) - eigs(j)));
      if (gap >= 1e-4) CHECK(p.u_resultant == p.u_clustered);
    }
  }
}

TEST_CASE("refine_bifurcation: endpoint, interior, and absent bifurcations") {
  auto at_zero = refine_bifurcation(j2(), s21(), pv1(Complex{1, 0}), 0.0, 0.25);
  REQUIRE(at_zero.found);
  CHECK(std::abs(at_zero.t_star - 0.0) < 1e-6);

  auto interior = refine_bifurcation(diag2(0.0, 1.0), StructurePattern::create(2, {{0, 0}}),
                                     pv1(Complex{2, 0}), 0.25, 0.75);
  REQUIRE(interior.found);
  CHECK(std::abs(interior.t_star - 0.5) < 1e-6);

  auto none = refine_bifurcation(diag2(1.0, 2.0), StructurePattern::create(2, {{0, 0}}),
                                 pv1(Complex{0.1, 0}), 0.0, 1.0);
  CHECK_FALSE(none.found);
}

TEST_CASE("multiplicity constancy: Jordan pattern and component sums") {
  StructurePattern s = s21();
  PerturbationVector z = pv1(Complex{0.2, 0});
  const double eps = 0.25;
  GridOptions opt;
  opt.box = Box{-1, 1, -1, 1};
  opt.n_re = 101;
  opt.n_im = 101;
  opt.samples = 800;
  GridRegion region = connected_components(grid_pseudospectrum(j2(), &s, eps, opt));
  auto record = track(j2(), s, z, 8, eps / 10.0);
  auto verdict = multiplicity_constancy_check(record, region);
  CHECK(verdict.pass);
  CHECK(verdict.unassigned_count == 0);
  REQUIRE(!verdict.component_sum_traces.empty());
  for (int sum : verdict.component_sum_traces[0]) CHECK(sum == 2);
  // Pattern away from t = 0 is {1, 1}.
  REQUIRE(!verdict.interval_patterns.empty());
  CHECK(verdict.interval_patterns.back() == std::vector<int>{1, 1});
}

TEST_CASE("multiplicity constancy: separated diagonal keeps sums (1, 1)") {
  ComplexMatrix a = diag2(0.0, 5.0);
  StructurePattern s11 = StructurePattern::create(2, {{0, 0}});
  PerturbationVector z = pv1(Complex{0.9, 0});
  GridOptions opt;
  opt.auto_box = true;
  opt.n_re = 101;
  opt.n_im = 101;
  opt.samples = 600;
  GridRegion region = connected_components(grid_pseudospectrum(a, &s11, 1.0, opt));
  auto record = track(a, s11, z, 8, 0.1);
  auto verdict = multiplicity_constancy_check(record, region);
  CHECK(verdict.pass);
  REQUIRE(verdict.component_sum_traces.size() == 2);
  for (const auto& trace : verdict.component_sum_traces)
    for (int sum : trace) CHECK(sum == 1);
}

TEST_CASE("theorem 3 at the endpoints: every component receives a path") {
  ComplexMatrix a = diag2(0.0, 5.0);
  StructurePattern s11 = StructurePattern::create(2, {{0, 0}});
  GridOptions opt;
  opt.auto_box = true;
  opt.n_re = 101;
  opt.n_im = 101;
  opt.samples = 600;
  GridRegion region = connected_components(grid_pseudospectrum(a, &s11, 1.0, opt));
  REQUIRE(region.component_count == 2);
  auto record = track(a, s11, pv1(Complex{0.9, 0}), 8, 0.1);
  const Index last = record.paths.cols() - 1;
  std::vector<bool> hit(static_cast<std::size_t>(region.component_count) + 1, false);
  for (Index i = 0; i < record.paths.rows(); ++i) {
    const int label = component_of(record.paths(i, last), region);
    CHECK(label != 0);
    if (label > 0) hit[static_cast<std::size_t>(label)] = true;
  }
  for (int comp = 1; comp <= region.component_count; ++comp)
    CHECK(hit[static_cast<std::size_t>(comp)]);
}

TEST_CASE("local conservation: diagonal, Jordan block, and the trivial case") {
  auto v1 = local_conservation_check(diag2(0.0, 5.0), diag2(0.01, 5.02), 1.0);
  CHECK(v1.pass);
  CHECK(v1.ball_sums == std::vector<int>{1, 1});

  ComplexMatrix a = j2_plus(Complex{3, 0});
  ComplexMatrix ap = a;
  ap(1, 0) = Complex{1e-4, 0};
  auto v2 = local_conservation_check(a, ap, 1.0);
  CHECK(v2.pass);
  // Ball at 0 carries the double eigenvalue.
  REQUIRE(v2.centers.size() == 2);
  const std::size_t zero_ball = std::abs(v2.centers[0]) < 1.0 ? 0 : 1;
  CHECK(v2.ball_sums[zero_ball] == 2);

  auto v3 = local_conservation_check(diag2(1.0, 2.0), diag2(1.0, 2.0), 0.3);
  CHECK(v3.pass);

  CHECK_THROWS_AS(local_conservation_check(diag2(0.0, 1.0), diag2(0.0, 1.0), 0.6),
                  PreconditionError);
}

TEST_CASE("path confinement: tracked values stay in the region mask") {
  StructurePattern s = s21();
  PerturbationVector z = pv1(Complex{0.2, 0});
  GridOptions opt;
  opt.box = Box{-1, 1, -1, 1};
  opt.n_re = 101;
  opt.n_im = 101;
  opt.samples = 1000;
  GridRegion region = connected_components(grid_pseudospectrum(j2(), &s, 0.25, opt));
  auto record = track(j2(), s, z, 8, 0.025);
  for (Index j = 0; j < record.paths.cols(); ++j)
    for (Index i = 0; i < record.paths.rows(); ++i)
      CHECK(component_of(record.paths(i, j), region) != 0);
}
