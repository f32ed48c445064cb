#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lrpop {

/// A monomial stored sparsely as (variable, exponent) pairs sorted by
/// variable index. Exponents are strictly positive; the empty monomial is 1.
class Monomial {
 public:
  struct Factor {
    int var;
    int exp;
    auto operator<=>(const Factor&) const = default;
  };

  Monomial() = default;

  /// Builds from arbitrary (var, exp) pairs; merges repeats and drops zeros.
  static Monomial from_factors(std::vector<Factor> factors);
  /// Builds from a dense exponent vector, variable i having exponent e[i].
  static Monomial from_exponents(std::span<const int> exponents);
  static Monomial variable(int var, int exp = 1);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_constant() const { return factors_.empty(); }
  int degree() const;
  int exponent_of(int var) const;
  std::vector<int> support() const;
  std::vector<int> exponents(int num_vars) const;

  Monomial operator*(const Monomial& other) const;

  double evaluate(std::span<const double> point) const;

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

  std::size_t hash() const;

 private:
  std::vector<Factor> factors_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

/// Expanded polynomial: a finite map from monomials to nonzero coefficients.
/// Used both for expansions of CP forms over x and for constraint
/// polynomials over lifted variables.
class DensePoly {
 public:
  DensePoly() = default;
  explicit DensePoly(int num_vars) : num_vars_(num_vars) {}

  static DensePoly constant(int num_vars, double c);

  int num_vars() const { return num_vars_; }
  const std::map<Monomial, double>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Adds c to the coefficient of m; entries that cancel to exactly zero are
  /// removed.
  void add_term(const Monomial& m, double c);
  double coefficient(const Monomial& m) const;
  double coefficient(std::span<const int> exponents) const;

  int degree() const;
  std::vector<int> variables() const;
  double evaluate(std::span<const double> point) const;

  DensePoly operator+(const DensePoly& other) const;
  DensePoly operator-(const DensePoly& other) const;
  DensePoly operator*(const DensePoly& other) const;
  DensePoly scaled(double c) const;

  std::string to_string(const std::function<std::string(int)>& var_name) const;

 private:
  int num_vars_ = 0;
  std::map<Monomial, double> terms_;
};

}  // namespace lrpop
