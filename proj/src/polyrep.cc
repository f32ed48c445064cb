#include "lrpop/polyrep.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrpop/errors.h"
#include "lrpop/random.h"

namespace lrpop {
namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return std::round(b);
}

// Bernstein coefficients on s in [0, 1] -> power coefficients in s.
std::vector<double> bernstein_to_power_s(const std::vector<double>& b) {
  const int d = static_cast<int>(b.size()) - 1;
  std::vector<double> a(d + 1, 0.0);
  for (int j = 0; j <= d; ++j) {
    const double cj = binomial(d, j);
    for (int k = j; k <= d; ++k) {
      const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
      a[k] += b[j] * cj * binomial(d - j, k - j) * sign;
    }
  }
  return a;
}

// Power coefficients in s -> Bernstein coefficients of degree d.
std::vector<double> power_s_to_bernstein(const std::vector<double>& a) {
  const int d = static_cast<int>(a.size()) - 1;
  std::vector<double> b(d + 1, 0.0);
  for (int j = 0; j <= d; ++j) {
    for (int k = 0; k <= j; ++k) {
      b[j] += a[k] * binomial(j, k) / binomial(d, k);
    }
  }
  return b;
}

// Power coefficients in x -> power coefficients in s, with x = 2s - 1.
std::vector<double> power_x_to_power_s(const std::vector<double>& c) {
  const int d = static_cast<int>(c.size()) - 1;
  std::vector<double> a(d + 1, 0.0);
  for (int m = 0; m <= d; ++m) {
    for (int k = 0; k <= m; ++k) {
      const double sign = ((m - k) % 2 == 0) ? 1.0 : -1.0;
      a[k] += c[m] * binomial(m, k) * std::ldexp(1.0, k) * sign;
    }
  }
  return a;
}

// Power coefficients in s -> power coefficients in x, with s = (x + 1) / 2.
std::vector<double> power_s_to_power_x(const std::vector<double>& a) {
  const int d = static_cast<int>(a.size()) - 1;
  std::vector<double> c(d + 1, 0.0);
  for (int k = 0; k <= d; ++k) {
    const double scale = std::ldexp(a[k], -k);
    for (int m = 0; m <= k; ++m) c[m] += scale * binomial(k, m);
  }
  return c;
}

}  // namespace

const char* basis_name(Basis b) {
  return b == Basis::Monomial ? "monomial" : "bernstein";
}

UniPoly::UniPoly(Basis basis, std::vector<double> coeffs)
    : basis_(basis), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw InvalidInput("univariate polynomial needs at least one coefficient");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw InvalidInput("non-finite coefficient");
  }
}

int UniPoly::effective_degree() const {
  if (basis_ == Basis::Bernstein) return degree();
  for (int j = degree(); j > 0; --j) {
    if (coeffs_[j] != 0.0) return j;
  }
  return 0;
}

CPPoly::CPPoly(int n, int r, std::vector<UniPoly> factors)
    : n_(n), r_(r), factors_(std::move(factors)) {
  if (n < 1 || r < 1) throw InvalidInput("CP form needs n >= 1 and r >= 1");
  if (factors_.size() != static_cast<std::size_t>(n) * r) {
    throw InvalidInput("CP factor grid must have r*n entries, got " +
                       std::to_string(factors_.size()));
  }
  const Basis b = factors_.front().basis();
  for (const UniPoly& p : factors_) {
    if (p.basis() != b) throw InvalidInput("mixed-basis CP factor grid");
  }
}

int CPPoly::max_degree() const {
  int d = 0;
  for (const UniPoly& p : factors_) d = std::max(d, p.degree());
  return d;
}

double uni_eval(const UniPoly& p, double x) {
  const auto& c = p.coeffs();
  if (p.basis() == Basis::Monomial) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
  }
  // de Casteljau on s = (x + 1) / 2.
  const double s = 0.5 * (x + 1.0);
  const double t = 1.0 - s;
  std::vector<double> b = c;
  for (int level = 1; level < static_cast<int>(b.size()); ++level) {
    for (std::size_t j = 0; j + level < b.size(); ++j) {
      b[j] = t * b[j] + s * b[j + 1];
    }
  }
  return b[0];
}

double cp_eval(const CPPoly& f, std::span<const double> point) {
  if (static_cast<int>(point.size()) != f.n()) {
    throw InvalidInput("cp_eval: point has " + std::to_string(point.size()) +
                       " coordinates, polynomial has " + std::to_string(f.n()));
  }
  double total = 0.0;
  for (int l = 0; l < f.r(); ++l) {
    double prod = 1.0;
    for (int i = 0; i < f.n(); ++i) prod *= uni_eval(f.factor(l, i), point[i]);
    total += prod;
  }
  return total;
}

UniPoly basis_convert(const UniPoly& p, Basis target) {
  if (p.basis() == target) return p;
  if (target == Basis::Bernstein) {
    return UniPoly::bernstein(
        power_s_to_bernstein(power_x_to_power_s(p.coeffs())));
  }
  return UniPoly::monomial(
      power_s_to_power_x(bernstein_to_power_s(p.coeffs())));
}

CPPoly basis_convert(const CPPoly& f, Basis target) {
  std::vector<UniPoly> out;
  out.reserve(f.factors().size());
  for (const UniPoly& p : f.factors()) out.push_back(basis_convert(p, target));
  return CPPoly(f.n(), f.r(), std::move(out));
}

DensePoly cp_expand(const CPPoly& f, std::size_t term_budget) {
  double work = 0.0;
  for (int l = 0; l < f.r(); ++l) {
    double row = 1.0;
    for (int i = 0; i < f.n(); ++i) row *= f.factor(l, i).degree() + 1;
    work += row;
  }
  if (work > static_cast<double>(term_budget)) {
    throw BudgetExceeded("cp_expand: " + std::to_string(work) +
                         " product terms exceed budget " +
                         std::to_string(term_budget));
  }
  const CPPoly g = basis_convert(f, Basis::Monomial);
  DensePoly total(f.n());
  for (int l = 0; l < g.r(); ++l) {
    DensePoly term = DensePoly::constant(f.n(), 1.0);
    for (int i = 0; i < g.n(); ++i) {
      DensePoly factor(f.n());
      const auto& c = g.factor(l, i).coeffs();
      for (std::size_t j = 0; j < c.size(); ++j) {
        factor.add_term(Monomial::variable(i, static_cast<int>(j)), c[j]);
      }
      term = term * factor;
    }
    total = total + term;
  }
  return total;
}

CPPoly gen_monomial_instance(int n, int d, int r, std::uint64_t seed) {
  if (n < 1 || d < 1 || r < 1) {
    throw InvalidInput("gen_monomial_instance needs n, d, r >= 1");
  }
  PortableRng rng(seed);
  std::vector<UniPoly> factors;
  factors.reserve(static_cast<std::size_t>(n) * r);
  for (int l = 0; l < r; ++l) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> c(d + 1);
      double l1 = 0.0;
      for (int k = 0; k <= d; ++k) {
        c[k] = rng.normal(0.0, std::pow(0.7, k));
        l1 += std::abs(c[k]);
      }
      for (double& v : c) v /= l1;
      factors.push_back(UniPoly::monomial(std::move(c)));
    }
  }
  return CPPoly(n, r, std::move(factors));
}

CPPoly gen_bernstein_instance(int n, int d, int r, double delta,
                              std::uint64_t seed) {
  if (n < 1 || d < 1 || r < 1 || !(delta > 0.0)) {
    throw InvalidInput("gen_bernstein_instance needs n, d, r >= 1, delta > 0");
  }
  PortableRng rng(seed);
  const double lo = 1.0 + delta / n;
  const double hi = 1.0 + 2.0 * delta / n;
  std::vector<UniPoly> factors;
  factors.reserve(static_cast<std::size_t>(n) * r);
  for (int l = 0; l < r; ++l) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> b(d + 1);
      b[0] = 1.0;
      for (int j = 1; j <= d; ++j) b[j] = rng.uniform(lo, hi);
      factors.push_back(UniPoly::bernstein(std::move(b)));
    }
  }
  return CPPoly(n, r, std::move(factors));
}

double lipschitz_bound(const CPPoly& f) {
  if (f.basis() != Basis::Bernstein) {
    throw InvalidInput("lipschitz_bound requires Bernstein factors");
  }
  double m = 0.0;
  for (const UniPoly& p : f.factors()) {
    for (double b : p.coeffs()) m = std::max(m, std::abs(b));
  }
  return f.r() * f.n() * std::pow(m, f.n() - 1);
}

}  // namespace lrpop
