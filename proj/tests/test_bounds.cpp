#include <doctest.h>

#include <cmath>

#include "pseudospec/bounds.hpp"
#include "pseudospec/core_linalg.hpp"
#include "test_helpers.hpp"

using namespace pseudospec;
using namespace pseudospec::testing;

namespace {

GridRegion unstructured_region(const ComplexMatrix& a, double eps, Index res = 161) {
  GridOptions opt;
  opt.auto_box = true;
  opt.n_re = res;
  opt.n_im = res;
  return connected_components(grid_pseudospectrum(a, nullptr, eps, opt));
}

}  // namespace

TEST_CASE("mu_eps: separated, Jordan-augmented, and merged spectra") {
  ComplexMatrix a = diag2(0.0, 5.0);
  auto profile = mu_eps(a, 1.0, unstructured_region(a, 1.0));
  CHECK(profile.mu_eps == 1);
  CHECK(profile.m_of_A == 1);
  REQUIRE(profile.per_component.size() == 2);
  for (const auto& [label, sum] : profile.per_component) CHECK(sum == 1);

  ComplexMatrix b = j2_plus(Complex{5, 0});
  auto profile_b = mu_eps(b, 0.1, unstructured_region(b, 0.1));
  CHECK(profile_b.mu_eps == 2);
  CHECK(profile_b.m_of_A == 2);

  // Large eps merges everything: mu = n.
  auto profile_c = mu_eps(a, 4.0, unstructured_region(a, 4.0));
  CHECK(profile_c.mu_eps == 2);
}

TEST_CASE("mu monotone in eps and equal to m(A) below half the gap") {
  Rng rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 3);
    ComplexMatrix a = random_matrix(n, rng);
    SpectrumReport rep = cluster_spectrum(eigenvalues(a), default_cluster_tol(a));
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.distinct.size(); ++i)
      for (std::size_t j = i + 1; j < rep.distinct.size(); ++j)
        gap = std::min(gap, std::abs(rep.distinct[i].first - rep.distinct[j].first));
    if (!std::isfinite(gap) || gap < 0.2) continue;

    const double eps_small = 0.2 * gap;
    auto small = mu_eps(a, eps_small, unstructured_region(a, eps_small));
    CHECK(small.mu_eps == rep.max_multiplicity());

    const double eps_large = 2.0 * gap;
    auto large = mu_eps(a, eps_large, unstructured_region(a, eps_large));
    CHECK(small.mu_eps <= large.mu_eps);
  }
}

TEST_CASE("simple eigenvalue guarantee: verdicts and the empirical arm") {
  ComplexMatrix a = diag2(0.0, 5.0);
  StructurePattern s11 = StructurePattern::create(2, {{0, 0}});
  GridOptions opt;
  opt.auto_box = true;
  opt.n_re = 121;
  opt.n_im = 121;
  opt.samples = 600;
  GridRegion region = connected_components(grid_pseudospectrum(a, &s11, 1.0, opt));
  auto result = simple_eigenvalue_guarantee(a, s11, 1.0, region);
  CHECK(result.verdict);
  CHECK(result.samples_checked == 200);
  CHECK(result.simple_count == 200);
  CHECK_FALSE(result.grid_artifact_warning);

  StructurePattern s21 = StructurePattern::create(2, {{1, 0}});
  GridOptions jopt;
  jopt.box = Box{-1, 1, -1, 1};
  jopt.n_re = 101;
  jopt.n_im = 101;
  jopt.samples = 600;
  GridRegion jregion = connected_components(grid_pseudospectrum(j2(), &s21, 0.25, jopt));
  auto jresult = simple_eigenvalue_guarantee(j2(), s21, 0.25, jregion);
  CHECK_FALSE(jresult.verdict);

  // Tiny eps on a simple spectrum: n components, all samples simple.
  GridOptions topt;
  topt.auto_box = true;
  topt.n_re = 101;
  topt.n_im = 101;
  topt.samples = 400;
  ComplexMatrix d = diag2(1.0, 2.0);
  GridRegion tregion = connected_components(grid_pseudospectrum(d, &s11, 0.05, topt));
  auto tresult = simple_eigenvalue_guarantee(d, s11, 0.05, tregion);
  CHECK(tresult.verdict);
  CHECK(tresult.simple_count == tresult.samples_checked);
}

TEST_CASE("distance lower bound: disc merge at half the gap") {
  ComplexMatrix a = diag2(0.0, 5.0);
  auto bound = distance_lower_bound(a, 1, 0.5, 4.0, 301);
  CHECK_FALSE(bound.open_above);
  CHECK(std::abs(bound.eps_star - 2.5) < 0.08);

  ComplexMatrix b = diag3(0.0, 2.0, 5.0);
  auto bound_b = distance_lower_bound(b, 2, 0.3, 4.0, 301);
  CHECK(std::abs(bound_b.eps_star - 1.0) < 0.06);

  // k = n: mu can never exceed n, so the bound is open above.
  auto open = distance_lower_bound(a, 2, 0.5, 4.0, 101);
  CHECK(open.open_above);
  CHECK(open.eps_star == 4.0);

  CHECK_THROWS_AS(distance_lower_bound(a, 1, 3.0, 4.0, 101), PreconditionError);
}

TEST_CASE("witness search: pair collapse and the trivial case") {
  ComplexMatrix a = diag2(0.0, 5.0);
  auto witness = witness_higher_multiplicity(a, 1, 32, 0);
  REQUIRE(witness.has_value());
  CHECK(witness->distance == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(std::abs(witness->x(0, 0) - Complex{2.5, 0}) < 1e-9);
  CHECK(std::abs(witness->x(1, 1) - Complex{2.5, 0}) < 1e-9);

  // A with m(A) >= k + 1 already: distance 0, X = A.
  ComplexMatrix b = j2_plus(Complex{5, 0});
  auto trivial = witness_higher_multiplicity(b, 1, 8, 0);
  REQUIRE(trivial.has_value());
  CHECK(trivial->distance == 0.0);

  // Triple-eigenvalue witness for k = 2 on J_2(0) + [5].
  auto triple = witness_higher_multiplicity(b, 2, 32, 0);
  REQUIRE(triple.has_value());
  SpectrumReport rep = cluster_spectrum(eigenvalues(triple->x), default_cluster_tol(triple->x));
  CHECK(rep.max_multiplicity() >= 3);
  auto bound = distance_lower_bound(b, 2, 0.1, 6.0, 201);
  const double slack = 2.0 * 12.0 / 200.0 * std::numbers::sqrt2 + 6e-3;
  CHECK(bound.eps_star <= triple->distance + slack);
}

TEST_CASE("corollary inequality holds on random matrices") {
  Rng rng(83);
  for (int trial = 0; trial < 4; ++trial) {
    const Index n = 3;
    ComplexMatrix a = 2.0 * random_matrix(n, rng);
    SpectrumReport rep = cluster_spectrum(eigenvalues(a), default_cluster_tol(a));
    const int k = rep.max_multiplicity();
    if (k >= n) continue;
    const double spread = 2.0 * spectral_norm(a) + 1.0;
    DistanceBoundResult bound;
    try {
      bound = distance_lower_bound(a, k, 1e-3 * spread, spread, 201);
    } catch (const PreconditionError&) {
      continue;  // mu(eps_lo) > k: clustered multiplicity at eps_lo already merged
    }
    auto witness = witness_higher_multiplicity(a, k, 32, 17);
    if (!witness) continue;
    const double half = spread;  // box half-width is spread/2 + 2*spread-ish; stay generous
    const double diag = std::hypot(4.0 * half / 200.0, 4.0 * half / 200.0);
    CHECK(bound.eps_star <= witness->distance + 2.0 * diag + (bound.bracket_hi - bound.bracket_lo));
  }
}
