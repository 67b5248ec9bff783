#include "pseudospec/polynomials.hpp"

#include <algorithm>
#include <string>

#include "pseudospec/core_linalg.hpp"

namespace pseudospec {

Complex MonicPolynomial::eval(Complex lambda) const {
  Complex acc{1.0, 0.0};
  for (Index i = 0; i < coeffs.size(); ++i) acc = acc * lambda + coeffs(i);
  return acc;
}

GeneralPolynomial GeneralPolynomial::from(ComplexVector c) {
  if (c.size() == 0) {
    ComplexVector zero(1);
    zero(0) = Complex{0, 0};
    return GeneralPolynomial{std::move(zero)};
  }
  Index lead = 0;
  while (lead < c.size() - 1 && c(lead) == Complex{0, 0}) ++lead;
  if (lead == 0) return GeneralPolynomial{std::move(c)};
  return GeneralPolynomial{c.segment(lead, c.size() - lead).eval()};
}

bool GeneralPolynomial::is_zero() const {
  return coeffs.size() == 1 && coeffs(0) == Complex{0, 0};
}

Complex GeneralPolynomial::eval(Complex lambda) const {
  Complex acc{0.0, 0.0};
  for (Index i = 0; i < coeffs.size(); ++i) acc = acc * lambda + coeffs(i);
  return acc;
}

MonicPolynomial monic_from_roots(const ComplexVector& roots) {
  const Index n = roots.size();
  ComplexVector full = ComplexVector::Zero(n + 1);
  full(0) = Complex{1, 0};
  for (Index r = 0; r < n; ++r)
    for (Index j = r + 1; j >= 1; --j) full(j) -= roots(r) * full(j - 1);
  return MonicPolynomial{full.segment(1, n).eval()};
}

MonicPolynomial char_poly(const ComplexMatrix& a) {
  require_square(a, "char_poly");
  return monic_from_roots(eigenvalues(a));
}

GeneralPolynomial to_general(const MonicPolynomial& p) {
  ComplexVector c(p.degree() + 1);
  c(0) = Complex{1, 0};
  c.segment(1, p.degree()) = p.coeffs;
  return GeneralPolynomial{std::move(c)};
}

GeneralPolynomial derivative(const GeneralPolynomial& p) {
  const Index d = p.degree();
  if (d == 0) {
    ComplexVector zero(1);
    zero(0) = Complex{0, 0};
    return GeneralPolynomial{std::move(zero)};
  }
  ComplexVector c(d);
  for (Index i = 0; i < d; ++i) c(i) = static_cast<double>(d - i) * p.coeffs(i);
  return GeneralPolynomial::from(std::move(c));
}

ResultantMatrix generalized_resultant(const MonicPolynomial& a,
                                      const std::vector<GeneralPolynomial>& bs) {
  if (bs.empty()) throw PreconditionError("generalized_resultant: need at least one b polynomial");
  const Index n = a.degree();
  if (n < 1) throw StructureError("generalized_resultant: a must have degree >= 1");
  Index p = 0;
  bool any_nonzero_at_p = false;
  for (const auto& b : bs) p = std::max(p, b.is_zero() ? Index{0} : b.degree());
  for (const auto& b : bs)
    if (!b.is_zero() && b.degree() == p) any_nonzero_at_p = true;
  if (p < 1 || !any_nonzero_at_p)
    throw HypothesisViolationError(
        "generalized_resultant: some b_i must have degree p with 1 <= p (nonzero leading "
        "coefficient at degree p)");
  if (p > n)
    throw StructureError("generalized_resultant: max degree of the b_i is " + std::to_string(p) +
                         " > n = " + std::to_string(n));

  const Index h = static_cast<Index>(bs.size());
  ResultantMatrix r;
  r.n = n;
  r.h = h;
  r.p = p;
  r.matrix = ComplexMatrix::Zero(n * h + p, n + p);

  // S_0: p shifted copies of (1, a_1, ..., a_n).
  for (Index row = 0; row < p; ++row) {
    r.matrix(row, row) = Complex{1, 0};
    for (Index j = 0; j < n; ++j) r.matrix(row, row + 1 + j) = a.coeffs(j);
  }
  // S_i: n shifted copies of b_i's coefficients padded to length p+1.
  for (Index i = 0; i < h; ++i) {
    ComplexVector band = ComplexVector::Zero(p + 1);
    const Index bd = bs[i].is_zero() ? Index{0} : bs[i].degree();
    band.segment(p - bd, bd + 1) = bs[i].coeffs;
    for (Index row = 0; row < n; ++row)
      for (Index j = 0; j <= p; ++j) r.matrix(p + i * n + row, row + j) = band(j);
  }
  return r;
}

Index resultant_nullity(const ResultantMatrix& r, std::optional<double> tol) {
  if (tol) return nullity(r.matrix, tol);
  const double smax = spectral_norm(r.matrix);
  return nullity(r.matrix, 2.0 * static_cast<double>(r.n) * smax * 1e-9);
}

Index count_common_roots(const MonicPolynomial& a, const std::vector<GeneralPolynomial>& bs,
                         std::optional<double> tol) {
  return resultant_nullity(generalized_resultant(a, bs), tol);
}

namespace {

// nu(R(f, f', ..., f^{(j)})) with the paper's conventions:
// j = 0 -> n (R(f) alone has nullity n), j >= n -> 0 (f^{(n)} is a nonzero
// constant, so the gcd is 1).
Index nu_chain(const MonicPolynomial& f, Index j, std::optional<double> tol) {
  const Index n = f.degree();
  if (j == 0) return n;
  if (j >= n) return 0;
  std::vector<GeneralPolynomial> derivs;
  GeneralPolynomial d = to_general(f);
  for (Index q = 1; q <= j; ++q) {
    d = derivative(d);
    derivs.push_back(d);
  }
  return count_common_roots(f, derivs, tol);
}

}  // namespace

Index count_roots_mult_at_least(const MonicPolynomial& f, Index k, std::optional<double> tol) {
  if (k < 1 || k > f.degree())
    throw PreconditionError("count_roots_mult_at_least: k out of range 1..n");
  return nu_chain(f, k - 1, tol) - nu_chain(f, k, tol);
}

Index count_roots_mult_exact(const MonicPolynomial& f, Index k, std::optional<double> tol) {
  if (k < 1 || k > f.degree()) throw PreconditionError("count_roots_mult_exact: k out of range 1..n");
  return nu_chain(f, k - 1, tol) - 2 * nu_chain(f, k, tol) + nu_chain(f, k + 1, tol);
}

Index count_distinct_roots(const MonicPolynomial& f, std::optional<double> tol) {
  if (f.degree() < 1) throw PreconditionError("count_distinct_roots: degree must be >= 1");
  return f.degree() - nu_chain(f, 1, tol);
}

}  // namespace pseudospec
