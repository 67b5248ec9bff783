#pragma once

#include <optional>
#include <vector>

#include "pseudospec/types.hpp"

namespace pseudospec {

/// Monic polynomial lambda^n + a_1 lambda^{n-1} + ... + a_n.
/// Stores a_1..a_n only; the leading 1 is implicit.
struct MonicPolynomial {
  ComplexVector coeffs;

  Index degree() const { return coeffs.size(); }
  Complex eval(Complex lambda) const;
};

/// Polynomial with explicit coefficients, highest degree first.
/// Canonical form: leading zeros trimmed; the zero polynomial is {0}.
struct GeneralPolynomial {
  ComplexVector coeffs;

  static GeneralPolynomial from(ComplexVector c);
  Index degree() const { return coeffs.size() - 1; }
  bool is_zero() const;
  Complex eval(Complex lambda) const;
};

/// Generalized Sylvester resultant R(a, b_1, ..., b_h): the first p rows are
/// shifted copies of (1, a_1, ..., a_n), then one n-row band of shifted copies
/// of each b_i's p+1 coefficients. Shape (n h + p) x (n + p).
struct ResultantMatrix {
  ComplexMatrix matrix;
  Index n = 0;  // degree of a
  Index h = 0;  // number of b polynomials
  Index p = 0;  // max degree among the b_i
};

/// Monic polynomial with the given roots, with repetition.
MonicPolynomial monic_from_roots(const ComplexVector& roots);

/// Characteristic polynomial, expanded from the eigensolver's roots.
/// Coefficient accuracy is documented for n <= 12 at desk scale.
MonicPolynomial char_poly(const ComplexMatrix& a);

GeneralPolynomial to_general(const MonicPolynomial& p);

/// Formal derivative; exact integer factors on the coefficients.
GeneralPolynomial derivative(const GeneralPolynomial& p);

ResultantMatrix generalized_resultant(const MonicPolynomial& a,
                                      const std::vector<GeneralPolynomial>& bs);

/// Default rank tolerance for resultant matrices: (2n) * sigma_max * 1e-9,
/// looser than the core auto rule because resultants of near-multiple roots
/// carry graded small singular values.
Index resultant_nullity(const ResultantMatrix& r, std::optional<double> tol = std::nullopt);

/// deg gcd(a, b_1, ..., b_h), counting multiplicities, via the resultant nullity.
Index count_common_roots(const MonicPolynomial& a, const std::vector<GeneralPolynomial>& bs,
                         std::optional<double> tol = std::nullopt);

/// N_k: number of distinct roots of multiplicity >= k, 1 <= k <= n.
Index count_roots_mult_at_least(const MonicPolynomial& f, Index k,
                                std::optional<double> tol = std::nullopt);

/// rho_k: number of distinct roots of multiplicity exactly k, 1 <= k <= n.
Index count_roots_mult_exact(const MonicPolynomial& f, Index k,
                             std::optional<double> tol = std::nullopt);

/// u: number of distinct roots, n - nullity(R(f, f')).
Index count_distinct_roots(const MonicPolynomial& f, std::optional<double> tol = std::nullopt);

}  // namespace pseudospec
