#include <doctest.h>

#include <cmath>

#include "pseudospec/core_linalg.hpp"
#include "pseudospec/pseudospectrum.hpp"
#include "pseudospec/rng.hpp"
#include "test_helpers.hpp"

using namespace pseudospec;
using namespace pseudospec::testing;

namespace {

GridOptions square_box(double half, Index res, Index samples = 800, std::uint64_t seed = 0) {
  GridOptions opt;
  opt.box = Box{-half, half, -half, half};
  opt.n_re = res;
  opt.n_im = res;
  opt.samples = samples;
  opt.seed = seed;
  return opt;
}

StructurePattern s21() { return StructurePattern::create(2, {{1, 0}}); }

}  // namespace

TEST_CASE("unstructured membership via sigma_min") {
  ComplexMatrix a = diag2(0.0, 5.0);
  CHECK(unstructured_membership(a, Complex{0.5, 0}, 1.0));
  CHECK_FALSE(unstructured_membership(a, Complex{2.5, 0}, 1.0));
  CHECK(unstructured_membership(a, Complex{5.0, 0}, 1e-9));
  CHECK_THROWS_AS(unstructured_membership(a, Complex{0, 0}, 0.0), PreconditionError);
}

TEST_CASE("structured distance: Jordan block lambda^2 = z") {
  auto res = structured_distance_upper(j2(), s21(), Complex{0.3, 0}, 6, 1);
  REQUIRE(res.feasible);
  CHECK(res.d_hat == doctest::Approx(0.09).epsilon(1e-5));
  CHECK(std::abs(res.witness.components(0) - Complex{0.09, 0}) < 1e-6);
  CHECK(res.residual <= 1e-8 * (1.0 + spectral_norm(j2())));
}

TEST_CASE("structured distance: eigenvalue of A costs nothing") {
  auto res = structured_distance_upper(j2(), s21(), Complex{0, 0}, 2, 0);
  REQUIRE(res.feasible);
  CHECK(res.d_hat == 0.0);
  CHECK(res.witness.euclidean_norm == 0.0);
}

TEST_CASE("structured distance: diagonal entry moves its own eigenvalue") {
  StructurePattern s11 = StructurePattern::create(2, {{0, 0}});
  auto res = structured_distance_upper(diag2(0.0, 5.0), s11, Complex{1, 0}, 6, 2);
  REQUIRE(res.feasible);
  CHECK(res.d_hat == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(res.witness.components(0) - Complex{1, 0}) < 1e-5);
}

TEST_CASE("structured distance: unreachable lambda reports infeasible") {
  // S = {(1,2)} only scales the nilpotent part; the spectrum stays {0, 0}.
  StructurePattern s12 = StructurePattern::create(2, {{0, 1}});
  auto res = structured_distance_upper(j2(), s12, Complex{0.3, 0}, 4, 0);
  CHECK_FALSE(res.feasible);
}

TEST_CASE("structured distance is monotone nonincreasing in restarts") {
  ComplexMatrix a = j2_plus(Complex{3, 0});
  StructurePattern s = StructurePattern::create(3, {{1, 0}, {2, 0}});
  double prev = std::numeric_limits<double>::infinity();
  for (int restarts : {1, 3, 6}) {
    auto res = structured_distance_upper(a, s, Complex{0.2, 0.1}, restarts, 5);
    if (res.feasible) {
      CHECK(res.d_hat <= prev + 1e-15);
      prev = res.d_hat;
    }
  }
  CHECK(std::isfinite(prev));
}

TEST_CASE("unstructured grid: two discs, then one merged component") {
  ComplexMatrix a = diag2(0.0, 5.0);
  GridOptions opt;
  opt.box = Box{-2, 7, -2, 2};
  opt.n_re = 181;
  opt.n_im = 81;
  GridRegion region = connected_components(grid_pseudospectrum(a, nullptr, 1.0, opt));
  CHECK(region.component_count == 2);

  // Discs of radius 3 around 0 and 5 overlap (gap 5 < 3 + 3).
  GridOptions opt2;
  opt2.box = Box{-4, 9, -4, 4};
  opt2.n_re = 181;
  opt2.n_im = 121;
  GridRegion merged = connected_components(grid_pseudospectrum(a, nullptr, 3.0, opt2));
  CHECK(merged.component_count == 1);
}

TEST_CASE("grid rejects boxes that truncate the spectrum") {
  GridOptions opt;
  opt.box = Box{-1, 1, -1, 1};
  opt.n_re = 32;
  opt.n_im = 32;
  CHECK_THROWS_AS(grid_pseudospectrum(diag2(0.0, 5.0), nullptr, 0.5, opt), BoxError);
}

TEST_CASE("structured grid: Jordan disc geometry with refine") {
  const double eps = 0.25;
  GridOptions opt = square_box(1.0, 101, 500, 3);
  opt.refine = true;
  opt.refine_restarts = 2;
  StructurePattern s = s21();
  GridRegion region = connected_components(grid_pseudospectrum(j2(), &s, eps, opt));
  const double target = std::numbers::pi * eps;  // pi (sqrt(eps))^2
  std::size_t cells = 0;
  for (Index c = 0; c < region.cell_count(); ++c)
    if (region.inside[static_cast<std::size_t>(c)]) ++cells;
  const double area = static_cast<double>(cells) * region.cell_dre() * region.cell_dim();
  CHECK(area > 0.9 * target);
  CHECK(area < 1.1 * target);
  // Soundness: inside centers stay within sqrt(eps) + 2 cell diagonals.
  for (Index iy = 0; iy < region.n_im; ++iy)
    for (Index ix = 0; ix < region.n_re; ++ix)
      if (region.inside[static_cast<std::size_t>(region.cell_index(ix, iy))])
        CHECK(std::abs(region.cell_center(ix, iy)) <= std::sqrt(eps) + 2.0 * region.cell_diag());
  CHECK(region.component_count == 1);
}

TEST_CASE("inner approximation soundness of sampled witnesses") {
  ComplexMatrix a = j2();
  StructurePattern s = s21();
  const double eps = 0.25;
  auto zs = sample_ball(s.size(), eps, /*strict=*/true, 200, 11);
  const double bound = 1e-8 * (1.0 + spectral_norm(a));
  for (const auto& z : zs) {
    CHECK(z.euclidean_norm < eps);
    ComplexMatrix m = perturbed(a, s, z);
    for (Complex lambda : std::vector<Complex>{eigenvalues(m)(0), eigenvalues(m)(1)}) {
      ComplexMatrix shifted = -m;
      shifted.diagonal().array() += lambda;
      CHECK(sigma_min(shifted) <= bound);
    }
  }
}

TEST_CASE("monotonicity in eps: unstructured masks nest exactly") {
  Rng rng(29);
  ComplexMatrix a = random_matrix(3, rng);
  GridOptions opt;
  opt.auto_box = false;
  const double norm = spectral_norm(a);
  opt.box = Box{-2 * norm - 2, 2 * norm + 2, -2 * norm - 2, 2 * norm + 2};
  opt.n_re = 61;
  opt.n_im = 61;
  GridRegion small = grid_pseudospectrum(a, nullptr, 0.4, opt);
  GridRegion large = grid_pseudospectrum(a, nullptr, 0.9, opt);
  for (Index c = 0; c < small.cell_count(); ++c)
    if (small.inside[static_cast<std::size_t>(c)])
      CHECK(large.inside[static_cast<std::size_t>(c)] == 1);
}

TEST_CASE("monotonicity in eps: structured marks stay inside the larger true set") {
  // Closed form: Lambda_{S,eps}(J_2) is the disc of radius sqrt(eps).
  GridOptions opt = square_box(1.0, 101, 600, 5);
  StructurePattern s = s21();
  GridRegion small = grid_pseudospectrum(j2(), &s, 0.16, opt);
  const double r_large = std::sqrt(0.25);
  for (Index iy = 0; iy < small.n_im; ++iy)
    for (Index ix = 0; ix < small.n_re; ++ix)
      if (small.inside[static_cast<std::size_t>(small.cell_index(ix, iy))])
        CHECK(std::abs(small.cell_center(ix, iy)) <= r_large + small.cell_diag());
}

TEST_CASE("closure relation at grid scale: strict vs closed sampling") {
  StructurePattern s = s21();
  const double eps = 0.25;
  GridOptions opt = square_box(1.0, 81, 500, 9);
  // Identical sweeps except for the strict-ball shrink factor.
  GridRegion strict;
  strict.box = opt.box;
  strict.n_re = opt.n_re;
  strict.n_im = opt.n_im;
  strict.epsilon = eps;
  strict.mode = RegionMode::kStructured;
  GridRegion closed = strict;
  auto sweep_mask = [&](bool use_strict, GridRegion& region) {
    region.inside.assign(region.cell_count(), 0);
    region.provenance.assign(region.cell_count(), Provenance::kOutsideUnknown);
    for (const auto& z : sample_ball(s.size(), eps, use_strict, opt.samples, 7)) {
      ComplexVector eigs = eigenvalues(perturbed(j2(), s, z));
      for (Index i = 0; i < eigs.size(); ++i) {
        Index ix, iy;
        if (region.locate(eigs(i), ix, iy))
          region.inside[static_cast<std::size_t>(region.cell_index(ix, iy))] = 1;
      }
    }
  };
  sweep_mask(true, strict);
  sweep_mask(false, closed);
  // Differences only on boundary cells of the union mask.
  auto is_boundary = [&](const GridRegion& region, Index ix, Index iy) {
    for (Index dy = -1; dy <= 1; ++dy)
      for (Index dx = -1; dx <= 1; ++dx) {
        const Index nx = ix + dx, ny = iy + dy;
        if (nx < 0 || nx >= region.n_re || ny < 0 || ny >= region.n_im) return true;
        if (!region.inside[static_cast<std::size_t>(region.cell_index(nx, ny))]) return true;
      }
    return false;
  };
  GridRegion unionr = strict;
  for (Index c = 0; c < unionr.cell_count(); ++c)
    unionr.inside[static_cast<std::size_t>(c)] =
        strict.inside[static_cast<std::size_t>(c)] || closed.inside[static_cast<std::size_t>(c)];
  for (Index iy = 0; iy < strict.n_im; ++iy)
    for (Index ix = 0; ix < strict.n_re; ++ix) {
      const Index c = strict.cell_index(ix, iy);
      if (strict.inside[static_cast<std::size_t>(c)] != closed.inside[static_cast<std::size_t>(c)])
        CHECK(is_boundary(unionr, ix, iy));
    }
}

TEST_CASE("sigma(A) is contained in the structured mask for every eps") {
  StructurePattern s = s21();
  for (double eps : {0.01, 0.1, 0.25}) {
    GridOptions opt = square_box(1.0, 81, 200, 1);
    GridRegion region = connected_components(grid_pseudospectrum(j2(), &s, eps, opt));
    CHECK(component_of(Complex{0, 0}, region) != 0);
  }
}

TEST_CASE("component_of: containment, outside verdicts, half-open cells") {
  ComplexMatrix a = diag2(0.0, 5.0);
  GridOptions opt;
  opt.box = Box{-2, 7, -2, 2};
  opt.n_re = 90;
  opt.n_im = 40;
  GridRegion region = connected_components(grid_pseudospectrum(a, nullptr, 1.0, opt));
  CHECK(component_of(Complex{0, 0}, region) == 1);
  CHECK(component_of(Complex{5, 0}, region) == 2);
  CHECK(component_of(Complex{3.3, 1.8}, region) == 0);

  Index ix1, iy1, ix2, iy2;
  REQUIRE(region.locate(Complex{0.05, 0.05}, ix1, iy1));
  // A point exactly on a cell's lower-left corner belongs to that cell.
  REQUIRE(region.locate(region.cell_center(ix1, iy1) -
                            0.5 * Complex{region.cell_dre(), region.cell_dim()},
                        ix2, iy2));
  CHECK(ix1 == ix2);
  CHECK(iy1 == iy2);
}

TEST_CASE("component count is at most n when coverage holds") {
  Rng rng(37);
  for (int trial = 0; trial < 6; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 3);
    ComplexMatrix a = random_matrix(n, rng);
    StructurePattern s = StructurePattern::create(n, {{0, 0}});
    GridOptions opt;
    opt.auto_box = true;
    opt.n_re = 81;
    opt.n_im = 81;
    opt.samples = 400;
    opt.seed = static_cast<std::uint64_t>(trial);
    GridRegion region = connected_components(grid_pseudospectrum(a, &s, 0.3, opt));
    auto check = component_eigen_report(a, s, 0.3, region,
                                        sample_ball(1, 0.3, true, 20, 100 + trial));
    if (check.coverage_violations == 0) CHECK(region.component_count <= n);
  }
}

TEST_CASE("component_eigen_report: diagonal case conserves (1, 1)") {
  ComplexMatrix a = diag2(0.0, 5.0);
  StructurePattern s11 = StructurePattern::create(2, {{0, 0}});
  const double eps = 1.0;
  auto zs = sample_ball(1, eps, true, 50, 77);
  GridOptions opt;
  opt.auto_box = true;
  opt.n_re = 121;
  opt.n_im = 121;
  opt.samples = 800;
  GridRegion region = connected_components(grid_pseudospectrum(a, &s11, eps, opt, zs));
  auto check = component_eigen_report(a, s11, eps, region, zs);
  REQUIRE(check.components.size() == 2);
  CHECK(check.coverage_violations == 0);
  for (const auto& comp : check.components) {
    CHECK(comp.baseline_sum == 1);
    CHECK(comp.conserved);
    CHECK(comp.nonempty_for_all_z);
  }
}

TEST_CASE("component_eigen_report: Jordan block conserves the double eigenvalue") {
  StructurePattern s = s21();
  const double eps = 0.25;
  auto zs = sample_ball(1, eps, true, 50, 123);
  GridOptions opt = square_box(1.0, 121, 800, 4);
  GridRegion region = connected_components(grid_pseudospectrum(j2(), &s, eps, opt, zs));
  auto check = component_eigen_report(j2(), s, eps, region, zs);
  REQUIRE(check.components.size() == 1);
  CHECK(check.components[0].baseline_sum == 2);
  CHECK(check.components[0].conserved);
  CHECK(check.coverage_violations == 0);
}

TEST_CASE("component_eigen_report: z = 0 probe reproduces the baseline") {
  StructurePattern s = s21();
  GridOptions opt = square_box(1.0, 81, 400, 8);
  GridRegion region = connected_components(grid_pseudospectrum(j2(), &s, 0.25, opt));
  auto check = component_eigen_report(j2(), s, 0.25, region, {PerturbationVector::zero(1)});
  REQUIRE(check.components.size() == 1);
  CHECK(check.components[0].per_z_sums[0].second == check.components[0].baseline_sum);
}

TEST_CASE("component_eigen_report rejects probes on or outside the sphere") {
  StructurePattern s = s21();
  GridOptions opt = square_box(1.0, 41, 100, 0);
  GridRegion region = connected_components(grid_pseudospectrum(j2(), &s, 0.25, opt));
  ComplexVector z(1);
  z << Complex{0.25, 0};
  CHECK_THROWS_AS(component_eigen_report(j2(), s, 0.25, region, {PerturbationVector(z)}),
                  PreconditionError);
}
