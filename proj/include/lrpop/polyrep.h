#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lrpop/monomial.h"

namespace lrpop {

enum class Basis { Monomial, Bernstein };

const char* basis_name(Basis b);

/// Univariate polynomial on the reference interval [-1, 1].
///
/// Monomial basis: p(x) = sum_j c_j x^j.
/// Bernstein basis: p(x) = sum_j b_j B_{j,d}(s) with s = (x + 1) / 2 and
/// B_{j,d}(s) = C(d, j) s^j (1 - s)^(d - j).
class UniPoly {
 public:
  UniPoly() : UniPoly(Basis::Monomial, {0.0}) {}
  UniPoly(Basis basis, std::vector<double> coeffs);

  static UniPoly monomial(std::vector<double> coeffs) {
    return UniPoly(Basis::Monomial, std::move(coeffs));
  }
  static UniPoly bernstein(std::vector<double> coeffs) {
    return UniPoly(Basis::Bernstein, std::move(coeffs));
  }

  Basis basis() const { return basis_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  /// Highest index with a nonzero coefficient (monomial basis), or the
  /// nominal degree (Bernstein basis, where every coefficient contributes to
  /// the top power in general).
  int effective_degree() const;

  bool operator==(const UniPoly&) const = default;

 private:
  Basis basis_;
  std::vector<double> coeffs_;
};

/// Rank-r canonical polyadic form f(x) = sum_l prod_i f_{l,i}(x_i).
/// Factors are stored row-major: factor(l, i) for 0 <= l < r, 0 <= i < n.
class CPPoly {
 public:
  CPPoly(int n, int r, std::vector<UniPoly> factors);

  int n() const { return n_; }
  int r() const { return r_; }
  Basis basis() const { return factors_.front().basis(); }
  const UniPoly& factor(int l, int i) const { return factors_[l * n_ + i]; }
  const std::vector<UniPoly>& factors() const { return factors_; }
  int max_degree() const;

  bool operator==(const CPPoly&) const = default;

 private:
  int n_;
  int r_;
  std::vector<UniPoly> factors_;
};

inline constexpr std::size_t kDefaultExpandBudget = 1'000'000;

/// Evaluates p at x. Bernstein coefficients go through de Casteljau, monomial
/// ones through Horner.
double uni_eval(const UniPoly& p, double x);

double cp_eval(const CPPoly& f, std::span<const double> point);

/// Expands f into monomials over x_0..x_{n-1}. Bernstein factors are converted
/// first. Throws BudgetExceeded when sum_l prod_i (deg f_{l,i} + 1) > budget.
DensePoly cp_expand(const CPPoly& f,
                    std::size_t term_budget = kDefaultExpandBudget);

/// Exact change of basis between monomials in x and Bernstein polynomials in
/// s = (x + 1) / 2, at the polynomial's nominal degree.
UniPoly basis_convert(const UniPoly& p, Basis target);
CPPoly basis_convert(const CPPoly& f, Basis target);

/// Random monomial-basis instance: coefficient of x^k ~ N(0, 0.7^(2k)), then
/// each factor scaled to unit l1 norm.
CPPoly gen_monomial_instance(int n, int d, int r, std::uint64_t seed);

/// Random Bernstein instance with b_{l,i,0} = 1 and the remaining
/// coefficients uniform in [1 + delta/n, 1 + 2 delta/n]. Its minimum over the
/// box is exactly r, attained at x = (-1, ..., -1).
CPPoly gen_bernstein_instance(int n, int d, int r, double delta,
                              std::uint64_t seed);

/// Coefficient-to-function Lipschitz bound r * n * M^(n-1), with M the largest
/// Bernstein coefficient magnitude. Throws InvalidInput on monomial input.
double lipschitz_bound(const CPPoly& f);

}  // namespace lrpop
