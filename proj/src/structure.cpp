#include "pseudospec/structure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pseudospec/rng.hpp"

namespace pseudospec {

StructurePattern StructurePattern::create(Index n, std::vector<std::pair<Index, Index>> positions) {
  if (n < 1) throw PreconditionError("StructurePattern: n must be positive");
  if (positions.empty() || static_cast<Index>(positions.size()) > n * n)
    throw PreconditionError("StructurePattern: need 1 <= s <= n^2 positions");
  for (const auto& [i, j] : positions)
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw PreconditionError("StructurePattern: position (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") outside 1.." + std::to_string(n));
  std::sort(positions.begin(), positions.end());
  if (std::adjacent_find(positions.begin(), positions.end()) != positions.end())
    throw PreconditionError("StructurePattern: duplicate positions");
  return StructurePattern{n, std::move(positions)};
}

ComplexMatrix embed(const StructurePattern& s, const PerturbationVector& z) {
  if (z.size() != s.size())
    throw DimensionError("embed: z has length " + std::to_string(z.size()) + ", pattern has s = " +
                         std::to_string(s.size()));
  ComplexMatrix m = ComplexMatrix::Zero(s.n, s.n);
  for (Index k = 0; k < s.size(); ++k) m(s.positions[k].first, s.positions[k].second) = z.components(k);
  return m;
}

PerturbationVector extract(const StructurePattern& s, const ComplexMatrix& m) {
  if (m.rows() != s.n || m.cols() != s.n)
    throw DimensionError("extract: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", pattern expects n = " + std::to_string(s.n));
  ComplexVector z(s.size());
  for (Index k = 0; k < s.size(); ++k) z(k) = m(s.positions[k].first, s.positions[k].second);
  return PerturbationVector(std::move(z));
}

ComplexMatrix perturbed(const ComplexMatrix& a, const StructurePattern& s,
                        const PerturbationVector& z) {
  if (a.rows() != s.n || a.cols() != s.n)
    throw DimensionError("perturbed: matrix does not match the pattern dimension");
  ComplexMatrix m = embed(s, z);
  m += a;
  return m;
}

std::vector<PerturbationVector> sample_ball(Index s, double radius, bool strict, Index count,
                                            std::uint64_t seed) {
  if (radius <= 0.0) throw PreconditionError("sample_ball: radius must be positive");
  if (count < 1) throw PreconditionError("sample_ball: count must be >= 1");
  if (s < 1) throw PreconditionError("sample_ball: s must be >= 1");
  const double r_eff = strict ? radius * (1.0 - 1e-9) : radius;

  std::vector<PerturbationVector> out;
  out.reserve(count);
  if (count >= 2 * s) {
    for (Index k = 0; k < s && static_cast<Index>(out.size()) < count; ++k) {
      for (double sign : {1.0, -1.0}) {
        ComplexVector e = ComplexVector::Zero(s);
        e(k) = Complex{sign * r_eff, 0.0};
        out.emplace_back(std::move(e));
      }
    }
  }

  Rng rng(Rng::split(seed, static_cast<std::uint64_t>(RngStream::kBallSampler)));
  while (static_cast<Index>(out.size()) < count) {
    ComplexVector g(s);
    for (Index k = 0; k < s; ++k) g(k) = rng.gaussian_complex();
    double gn = g.norm();
    if (gn == 0.0) continue;
    double u = rng.uniform();
    double scale = r_eff * std::pow(u, 1.0 / (2.0 * static_cast<double>(s)));
    out.emplace_back(ComplexVector((scale / gn) * g));
  }
  return out;
}

}  // namespace pseudospec
