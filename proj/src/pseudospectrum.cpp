#include "pseudospec/pseudospectrum.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "pseudospec/core_linalg.hpp"
#include "pseudospec/parallel.hpp"
#include "pseudospec/rng.hpp"

namespace pseudospec {

double GridRegion::cell_diag() const { return std::hypot(cell_dre(), cell_dim()); }

Complex GridRegion::cell_center(Index ix, Index iy) const {
  return {box.re_min + (static_cast<double>(ix) + 0.5) * cell_dre(),
          box.im_min + (static_cast<double>(iy) + 0.5) * cell_dim()};
}

bool GridRegion::locate(Complex lambda, Index& ix, Index& iy) const {
  const double fx = (lambda.real() - box.re_min) / cell_dre();
  const double fy = (lambda.imag() - box.im_min) / cell_dim();
  if (fx < 0 || fy < 0) return false;
  ix = static_cast<Index>(fx);
  iy = static_cast<Index>(fy);
  return ix >= 0 && ix < n_re && iy >= 0 && iy < n_im;
}

bool unstructured_membership(const ComplexMatrix& a, Complex lambda, double eps) {
  require_square(a, "unstructured_membership");
  if (eps <= 0.0) throw PreconditionError("unstructured_membership: eps must be positive");
  ComplexMatrix shifted = -a;
  shifted.diagonal().array() += lambda;
  return sigma_min(shifted) <= eps;
}

namespace {

// Phi(v): n x s with Phi(i_k, k) = v(j_k); then (A + M_S(z)) v = lambda v
// is equivalent to (lambda I - A) v = Phi(v) z.
ComplexMatrix phi_of(const StructurePattern& s, const ComplexVector& v) {
  ComplexMatrix phi = ComplexMatrix::Zero(v.size(), s.size());
  for (Index k = 0; k < s.size(); ++k) phi(s.positions[k].first, k) = v(s.positions[k].second);
  return phi;
}

struct LsqResult {
  ComplexVector z;
  double residual;  // ||(lambda I - A) v - Phi(v) z||
};

LsqResult least_norm_z(const ComplexMatrix& a, const StructurePattern& s, Complex lambda,
                       const ComplexVector& v) {
  ComplexVector b = lambda * v - a * v;
  ComplexMatrix phi = phi_of(s, v);
  Eigen::JacobiSVD<ComplexMatrix> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ComplexVector z = svd.solve(b);
  return {std::move(z), (b - phi * z).norm()};
}

ComplexVector smallest_right_singular_vector(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().col(m.cols() - 1);
}

}  // namespace

StructuredDistanceResult structured_distance_upper(const ComplexMatrix& a,
                                                   const StructurePattern& s, Complex lambda,
                                                   int restarts, std::uint64_t seed) {
  require_square(a, "structured_distance_upper");
  if (a.rows() != s.n) throw DimensionError("structured_distance_upper: pattern/matrix mismatch");
  if (restarts < 1) throw PreconditionError("structured_distance_upper: restarts must be >= 1");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw PreconditionError("structured_distance_upper: lambda must be finite");

  const Index n = a.rows();
  const double feas_tol = 1e-8 * (1.0 + spectral_norm(a));

  auto residual_of = [&](const ComplexVector& z) {
    ComplexMatrix m = -a - embed(s, PerturbationVector(ComplexVector(z)));
    m.diagonal().array() += lambda;
    return sigma_min(m);
  };

  StructuredDistanceResult best;
  // lambda in sigma(A): witness z = 0.
  if (residual_of(ComplexVector::Zero(s.size())) <= feas_tol) {
    best.feasible = true;
    best.d_hat = 0.0;
    best.witness = PerturbationVector::zero(s.size());
    best.residual = residual_of(ComplexVector::Zero(s.size()));
    return best;
  }

  const std::uint64_t base = Rng::split(seed, static_cast<std::uint64_t>(RngStream::kDistanceOptimizer));

  auto alternate = [&](ComplexVector& v, int iters) {
    // z <- least-norm lsq, v <- min right singular vector; the lsq residual
    // is nonincreasing under this alternation.
    for (int it = 0; it < iters; ++it) {
      LsqResult lr = least_norm_z(a, s, lambda, v);
      ComplexMatrix m = -a - embed(s, PerturbationVector(ComplexVector(lr.z)));
      m.diagonal().array() += lambda;
      v = smallest_right_singular_vector(m);
      if (lr.residual <= feas_tol * 0.1) break;
    }
  };

  auto penalized = [&](const ComplexVector& v, double beta) {
    LsqResult lr = least_norm_z(a, s, lambda, v);
    return lr.z.squaredNorm() + beta * lr.residual * lr.residual;
  };

  for (int r = 0; r < restarts; ++r) {
    Rng rng(Rng::split(base, static_cast<std::uint64_t>(r)));
    ComplexVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.gaussian_complex();
    v.normalize();

    alternate(v, 60);

    // Projected gradient on the feasibility-penalized witness norm, with an
    // escalating penalty so the final iterate stays (near-)feasible.
    for (double beta : {1e2, 1e5, 1e8}) {
      double step = 0.1;
      for (int it = 0; it < 20 && step > 1e-12; ++it) {
        const double f0 = penalized(v, beta);
        ComplexVector grad(n);
        const double h = 1e-6;
        for (Index i = 0; i < n; ++i) {
          ComplexVector vp = v;
          vp(i) += h;
          double fre = (penalized(vp, beta) - f0) / h;
          vp = v;
          vp(i) += Complex{0.0, h};
          double fim = (penalized(vp, beta) - f0) / h;
          grad(i) = Complex{fre, fim};
        }
        double gn = grad.norm();
        if (gn < 1e-14) break;
        bool moved = false;
        while (step > 1e-12) {
          ComplexVector vn = (v - (step / gn) * grad).normalized();
          if (penalized(vn, beta) < f0) {
            v = vn;
            step *= 1.5;
            moved = true;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
      }
    }

    alternate(v, 40);
    LsqResult lr = least_norm_z(a, s, lambda, v);
    const double res = residual_of(lr.z);
    if (res <= feas_tol) {
      PerturbationVector witness(ComplexVector(lr.z));
      if (!best.feasible || witness.euclidean_norm < best.d_hat) {
        best.feasible = true;
        best.d_hat = witness.euclidean_norm;
        best.witness = std::move(witness);
        best.residual = res;
      }
    } else if (!best.feasible) {
      best.residual = std::min(best.residual, res);
    }
  }
  return best;
}

namespace {

Box auto_box_from(const ComplexVector& spectrum, double eps,
                  const std::vector<ComplexVector>* sweep) {
  // Bounding-box midpoint: with half-width spread/2 + 2 eps this always
  // leaves margin >= 2 eps around every eigenvalue (a mean center does not
  // when the spectrum is unbalanced).
  double re_lo = spectrum(0).real(), re_hi = re_lo;
  double im_lo = spectrum(0).imag(), im_hi = im_lo;
  for (Index i = 1; i < spectrum.size(); ++i) {
    re_lo = std::min(re_lo, spectrum(i).real());
    re_hi = std::max(re_hi, spectrum(i).real());
    im_lo = std::min(im_lo, spectrum(i).imag());
    im_hi = std::max(im_hi, spectrum(i).imag());
  }
  const Complex center{0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)};
  double spread = 0.0;
  for (Index i = 0; i < spectrum.size(); ++i)
    for (Index j = i + 1; j < spectrum.size(); ++j)
      spread = std::max(spread, std::abs(spectrum(i) - spectrum(j)));
  const double half = spread / 2.0 + 2.0 * eps;
  Box box{center.real() - half, center.real() + half, center.imag() - half, center.imag() + half};
  if (sweep) {
    double re_lo = box.re_min, re_hi = box.re_max, im_lo = box.im_min, im_hi = box.im_max;
    for (const auto& eigs : *sweep)
      for (Index i = 0; i < eigs.size(); ++i) {
        re_lo = std::min(re_lo, eigs(i).real());
        re_hi = std::max(re_hi, eigs(i).real());
        im_lo = std::min(im_lo, eigs(i).imag());
        im_hi = std::max(im_hi, eigs(i).imag());
      }
    const double pad_re = 0.02 * (re_hi - re_lo) + 1e-9;
    const double pad_im = 0.02 * (im_hi - im_lo) + 1e-9;
    box = Box{re_lo - pad_re, re_hi + pad_re, im_lo - pad_im, im_hi + pad_im};
  }
  return box;
}

}  // namespace

GridRegion grid_pseudospectrum(const ComplexMatrix& a, const StructurePattern* s, double eps,
                               const GridOptions& opt,
                               const std::vector<PerturbationVector>& extra_zs) {
  require_square(a, "grid_pseudospectrum");
  require_finite(a, "grid_pseudospectrum");
  if (eps <= 0.0) throw PreconditionError("grid_pseudospectrum: eps must be positive");
  if (opt.n_re < 2 || opt.n_im < 2)
    throw PreconditionError("grid_pseudospectrum: resolution must be at least 2x2");
  if (s && s->n != a.rows())
    throw DimensionError("grid_pseudospectrum: pattern/matrix dimension mismatch");

  const ComplexVector spectrum = eigenvalues(a);

  // Structured sweep: z = 0, strict-ball samples, then caller-supplied probes.
  // Each nonzero z is also swept at fractional radii: the scaled vectors are
  // valid witnesses too, and their eigenvalues trace the trajectories that
  // connect every sample back to sigma(A), which keeps the mask connected.
  std::vector<PerturbationVector> zs;
  std::vector<ComplexVector> sweep_eigs;
  if (s) {
    zs.push_back(PerturbationVector::zero(s->size()));
    auto push_with_chain = [&zs](const PerturbationVector& z) {
      zs.push_back(z);
      for (double tau : {0.75, 0.5, 0.25})
        zs.emplace_back(ComplexVector(tau * z.components));
    };
    if (opt.samples > 0) {
      for (const auto& z :
           sample_ball(s->size(), eps, /*strict=*/true, opt.samples,
                       Rng::split(opt.seed, static_cast<std::uint64_t>(RngStream::kGridSweep))))
        push_with_chain(z);
    }
    for (const auto& z : extra_zs) {
      if (z.euclidean_norm >= eps)
        throw PreconditionError("grid_pseudospectrum: extra z with ||z|| >= eps");
      push_with_chain(z);
    }
    sweep_eigs.resize(zs.size());
    parallel_for(zs.size(), [&](std::size_t i) { sweep_eigs[i] = eigenvalues(perturbed(a, *s, zs[i])); });
  }

  GridRegion region;
  region.box = opt.auto_box ? auto_box_from(spectrum, eps, s ? &sweep_eigs : nullptr) : opt.box;
  if (!(region.box.re_max > region.box.re_min) || !(region.box.im_max > region.box.im_min))
    throw PreconditionError("grid_pseudospectrum: empty box");
  for (Index i = 0; i < spectrum.size(); ++i)
    if (!region.box.contains(spectrum(i)))
      throw BoxError("grid_pseudospectrum: eigenvalue " + std::to_string(spectrum(i).real()) + "+" +
                     std::to_string(spectrum(i).imag()) +
                     "i outside the box; enlarge it or use the auto box");

  region.n_re = opt.n_re;
  region.n_im = opt.n_im;
  region.epsilon = eps;
  region.mode = s ? RegionMode::kStructured : RegionMode::kUnstructured;
  region.inside.assign(region.cell_count(), 0);
  region.labels.assign(region.cell_count(), 0);
  region.provenance.assign(region.cell_count(), s ? Provenance::kOutsideUnknown
                                                  : Provenance::kCertifiedOutside);

  if (!s) {
    parallel_for(static_cast<std::size_t>(region.cell_count()), [&](std::size_t c) {
      const Index iy = static_cast<Index>(c) / region.n_re;
      const Index ix = static_cast<Index>(c) % region.n_re;
      ComplexMatrix shifted = -a;
      shifted.diagonal().array() += region.cell_center(ix, iy);
      if (sigma_min(shifted) <= eps) {
        region.inside[c] = 1;
        region.provenance[c] = Provenance::kCertifiedInside;
      }
    });
    return region;
  }

  for (const auto& eigs : sweep_eigs)
    for (Index i = 0; i < eigs.size(); ++i) {
      Index ix, iy;
      if (region.locate(eigs(i), ix, iy)) {
        const Index c = region.cell_index(ix, iy);
        region.inside[c] = 1;
        region.provenance[c] = Provenance::kSampledInside;
      }
    }

  if (opt.refine) {
    // Frontier flood: certify neighbors of the marked set; every component of
    // the true set is seeded through z = 0 (each contains an eigenvalue of A).
    std::deque<Index> queue;
    std::vector<std::uint8_t> tested(region.cell_count(), 0);
    for (Index c = 0; c < region.cell_count(); ++c)
      if (region.inside[c]) queue.push_back(c);
    while (!queue.empty()) {
      const Index c = queue.front();
      queue.pop_front();
      const Index iy = c / region.n_re, ix = c % region.n_re;
      for (Index dy = -1; dy <= 1; ++dy)
        for (Index dx = -1; dx <= 1; ++dx) {
          const Index nx = ix + dx, ny = iy + dy;
          if (nx < 0 || nx >= region.n_re || ny < 0 || ny >= region.n_im) continue;
          const Index nc = region.cell_index(nx, ny);
          if (region.inside[nc] || tested[nc]) continue;
          tested[nc] = 1;
          auto res = structured_distance_upper(a, *s, region.cell_center(nx, ny),
                                               opt.refine_restarts,
                                               Rng::split(opt.seed, 0x9E3779B9ULL + static_cast<std::uint64_t>(nc)));
          if (res.feasible && res.d_hat <= eps) {
            region.inside[nc] = 1;
            region.provenance[nc] = Provenance::kCertifiedInside;
            queue.push_back(nc);
          }
        }
    }
  }
  return region;
}

GridRegion connected_components(GridRegion region) {
  if (region.inside.size() != static_cast<std::size_t>(region.cell_count()))
    throw PreconditionError("connected_components: inside mask not computed");
  region.labels.assign(region.cell_count(), 0);
  int next = 0;
  std::vector<Index> stack;
  for (Index iy = 0; iy < region.n_im; ++iy)
    for (Index ix = 0; ix < region.n_re; ++ix) {
      const Index c0 = region.cell_index(ix, iy);
      if (!region.inside[c0] || region.labels[c0] != 0) continue;
      ++next;
      region.labels[c0] = next;
      stack.push_back(c0);
      while (!stack.empty()) {
        const Index c = stack.back();
        stack.pop_back();
        const Index cy = c / region.n_re, cx = c % region.n_re;
        for (Index dy = -1; dy <= 1; ++dy)
          for (Index dx = -1; dx <= 1; ++dx) {
            const Index nx = cx + dx, ny = cy + dy;
            if (nx < 0 || nx >= region.n_re || ny < 0 || ny >= region.n_im) continue;
            const Index nc = region.cell_index(nx, ny);
            if (region.inside[nc] && region.labels[nc] == 0) {
              region.labels[nc] = next;
              stack.push_back(nc);
            }
          }
      }
    }
  region.component_count = next;
  return region;
}

int component_of(Complex lambda, const GridRegion& region) {
  if (region.labels.size() != static_cast<std::size_t>(region.cell_count()))
    throw PreconditionError("component_of: labels not computed");
  Index ix, iy;
  if (region.locate(lambda, ix, iy) && region.inside[region.cell_index(ix, iy)])
    return region.labels[region.cell_index(ix, iy)];

  // Nearest inside cell center within 2 cell diagonals; first-visited wins ties.
  const double max_d = 2.0 * region.cell_diag();
  const Index wx = static_cast<Index>(max_d / region.cell_dre()) + 1;
  const Index wy = static_cast<Index>(max_d / region.cell_dim()) + 1;
  const Index cx = std::clamp<Index>(
      static_cast<Index>(std::floor((lambda.real() - region.box.re_min) / region.cell_dre())), 0,
      region.n_re - 1);
  const Index cy = std::clamp<Index>(
      static_cast<Index>(std::floor((lambda.imag() - region.box.im_min) / region.cell_dim())), 0,
      region.n_im - 1);
  double best = max_d;
  int best_label = 0;
  for (Index iy2 = std::max<Index>(0, cy - wy); iy2 <= std::min(region.n_im - 1, cy + wy); ++iy2)
    for (Index ix2 = std::max<Index>(0, cx - wx); ix2 <= std::min(region.n_re - 1, cx + wx); ++ix2) {
      const Index c = region.cell_index(ix2, iy2);
      if (!region.inside[c]) continue;
      const double d = std::abs(lambda - region.cell_center(ix2, iy2));
      if (d < best) {
        best = d;
        best_label = region.labels[c];
      }
    }
  return best_label;
}

ComponentCheck component_eigen_report(const ComplexMatrix& a, const StructurePattern& s, double eps,
                                      const GridRegion& region,
                                      const std::vector<PerturbationVector>& zs,
                                      double cluster_tol) {
  if (region.labels.size() != static_cast<std::size_t>(region.cell_count()))
    throw PreconditionError("component_eigen_report: labels not computed");
  for (const auto& z : zs)
    if (z.euclidean_norm >= eps)
      throw PreconditionError("component_eigen_report: z with ||z|| >= eps");

  const int c = region.component_count;
  ComponentCheck check;

  auto sums_for = [&](const ComplexMatrix& m) {
    std::vector<int> sums(static_cast<std::size_t>(c) + 1, 0);
    const double tol = cluster_tol >= 0.0 ? cluster_tol : default_cluster_tol(m);
    SpectrumReport rep = cluster_spectrum(eigenvalues(m), tol);
    for (const auto& [value, mult] : rep.distinct) {
      const int label = component_of(value, region);
      if (label == 0)
        check.coverage_violations += 1;
      else
        sums[static_cast<std::size_t>(label)] += mult;
    }
    return sums;
  };

  const std::vector<int> baseline = sums_for(a);
  std::vector<std::vector<int>> per_z(zs.size());
  std::vector<ComplexMatrix> mats(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) mats[i] = perturbed(a, s, zs[i]);
  for (std::size_t i = 0; i < zs.size(); ++i) per_z[i] = sums_for(mats[i]);

  for (int comp = 1; comp <= c; ++comp) {
    ComponentReport rep;
    rep.component_id = comp;
    rep.baseline_sum = baseline[static_cast<std::size_t>(comp)];
    rep.conserved = true;
    rep.nonempty_for_all_z = true;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const int sum = per_z[i][static_cast<std::size_t>(comp)];
      rep.per_z_sums.emplace_back(static_cast<int>(i), sum);
      if (sum != rep.baseline_sum) rep.conserved = false;
      if (sum < 1) rep.nonempty_for_all_z = false;
    }
    check.components.push_back(std::move(rep));
  }
  return check;
}

}  // namespace pseudospec
