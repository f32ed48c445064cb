#include "lrpop/monomial.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrpop/errors.h"

namespace lrpop {

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end());
  Monomial m;
  for (const Factor& f : factors) {
    if (f.exp < 0 || f.var < 0) {
      throw InvalidInput("monomial factors need nonnegative var and exponent");
    }
    if (f.exp == 0) continue;
    if (!m.factors_.empty() && m.factors_.back().var == f.var) {
      m.factors_.back().exp += f.exp;
    } else {
      m.factors_.push_back(f);
    }
  }
  return m;
}

Monomial Monomial::from_exponents(std::span<const int> exponents) {
  Monomial m;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0) throw InvalidInput("negative exponent");
    if (exponents[i] > 0) {
      m.factors_.push_back({static_cast<int>(i), exponents[i]});
    }
  }
  return m;
}

Monomial Monomial::variable(int var, int exp) {
  return from_factors({{var, exp}});
}

int Monomial::degree() const {
  int d = 0;
  for (const Factor& f : factors_) d += f.exp;
  return d;
}

int Monomial::exponent_of(int var) const {
  for (const Factor& f : factors_) {
    if (f.var == var) return f.exp;
  }
  return 0;
}

std::vector<int> Monomial::support() const {
  std::vector<int> vars;
  vars.reserve(factors_.size());
  for (const Factor& f : factors_) vars.push_back(f.var);
  return vars;
}

std::vector<int> Monomial::exponents(int num_vars) const {
  std::vector<int> e(num_vars, 0);
  for (const Factor& f : factors_) {
    if (f.var >= num_vars) throw InvalidInput("monomial variable out of range");
    e[f.var] = f.exp;
  }
  return e;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() || (a != factors_.end() && a->var < b->var)) {
      out.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->var < a->var) {
      out.factors_.push_back(*b++);
    } else {
      out.factors_.push_back({a->var, a->exp + b->exp});
      ++a;
      ++b;
    }
  }
  return out;
}

double Monomial::evaluate(std::span<const double> point) const {
  double v = 1.0;
  for (const Factor& f : factors_) {
    if (static_cast<std::size_t>(f.var) >= point.size()) {
      throw InvalidInput("evaluation point too short for monomial");
    }
    for (int e = 0; e < f.exp; ++e) v *= point[f.var];
  }
  return v;
}

std::size_t Monomial::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const Factor& f : factors_) {
    h ^= static_cast<std::size_t>(f.var) * 0x100000001b3ULL + f.exp +
         (h << 6) + (h >> 2);
  }
  return h;
}

DensePoly DensePoly::constant(int num_vars, double c) {
  DensePoly p(num_vars);
  p.add_term(Monomial{}, c);
  return p;
}

void DensePoly::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  if (!m.is_constant() && m.factors().back().var >= num_vars_) {
    throw InvalidInput("term references variable beyond num_vars");
  }
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double DensePoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double DensePoly::coefficient(std::span<const int> exponents) const {
  return coefficient(Monomial::from_exponents(exponents));
}

int DensePoly::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

std::vector<int> DensePoly::variables() const {
  std::vector<int> vars;
  for (const auto& [m, c] : terms_) {
    for (const auto& f : m.factors()) vars.push_back(f.var);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

double DensePoly::evaluate(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != num_vars_) {
    throw InvalidInput("evaluation point has wrong dimension");
  }
  double v = 0.0;
  for (const auto& [m, c] : terms_) v += c * m.evaluate(point);
  return v;
}

DensePoly DensePoly::operator+(const DensePoly& other) const {
  DensePoly out(std::max(num_vars_, other.num_vars_));
  out.terms_ = terms_;
  for (const auto& [m, c] : other.terms_) out.add_term(m, c);
  return out;
}

DensePoly DensePoly::operator-(const DensePoly& other) const {
  return *this + other.scaled(-1.0);
}

DensePoly DensePoly::operator*(const DensePoly& other) const {
  DensePoly out(std::max(num_vars_, other.num_vars_));
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

DensePoly DensePoly::scaled(double c) const {
  DensePoly out(num_vars_);
  if (c == 0.0) return out;
  for (const auto& [m, v] : terms_) out.terms_.emplace(m, v * c);
  return out;
}

std::string DensePoly::to_string(
    const std::function<std::string(int)>& var_name) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  // Graded order for readability: low degree first.
  std::vector<std::pair<Monomial, double>> sorted(terms_.begin(), terms_.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.first.degree() < b.first.degree();
  });
  for (const auto& [m, c] : sorted) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const double a = std::abs(c);
    if (m.is_constant() || a != 1.0) {
      os << a;
      if (!m.is_constant()) os << "*";
    }
    bool first_factor = true;
    for (const auto& f : m.factors()) {
      if (!first_factor) os << "*";
      first_factor = false;
      os << var_name(f.var);
      if (f.exp > 1) os << "^" << f.exp;
    }
  }
  return os.str();
}

}  // namespace lrpop
