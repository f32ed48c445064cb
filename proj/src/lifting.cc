#include "lrpop/lifting.h"

#include <algorithm>
#include <cmath>

#include "lrpop/errors.h"

namespace lrpop {
namespace {

DensePoly univariate_in(const UniPoly& p, int var, int num_vars) {
  DensePoly out(num_vars);
  const auto& c = p.coeffs();
  for (std::size_t j = 0; j < c.size(); ++j) {
    out.add_term(Monomial::variable(var, static_cast<int>(j)), c[j]);
  }
  return out;
}

double eval_derivative(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) v = v * x + j * c[j];
  return v;
}

}  // namespace

double univariate_abs_max(const UniPoly& p, double radius) {
  const UniPoly m = basis_convert(p, Basis::Monomial);
  const auto& c = m.coeffs();
  constexpr int kSegments = 1024;
  double best = 0.0;
  double prev_x = -radius;
  double prev_d = eval_derivative(c, prev_x);
  best = std::abs(uni_eval(m, prev_x));
  for (int k = 1; k <= kSegments; ++k) {
    const double x = -radius + 2.0 * radius * k / kSegments;
    const double d = eval_derivative(c, x);
    best = std::max(best, std::abs(uni_eval(m, x)));
    if ((prev_d < 0.0 && d > 0.0) || (prev_d > 0.0 && d < 0.0)) {
      double lo = prev_x;
      double hi = x;
      double dlo = prev_d;
      for (int it = 0; it < 100 && hi - lo > 1e-15 * (1.0 + radius); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double dm = eval_derivative(c, mid);
        if ((dm < 0.0) == (dlo < 0.0)) {
          lo = mid;
          dlo = dm;
        } else {
          hi = mid;
        }
      }
      best = std::max(best, std::abs(uni_eval(m, 0.5 * (lo + hi))));
    }
    prev_x = x;
    prev_d = d;
  }
  return best;
}

LiftedPOP build_lifted_pop(const CPPoly& f_in, double box_radius,
                           bool with_t_bounds) {
  if (!(box_radius > 0.0)) throw InvalidInput("box radius must be positive");
  const CPPoly f = basis_convert(f_in, Basis::Monomial);
  LiftedPOP p;
  p.n = f.n();
  p.r = f.r();
  p.box_radius = box_radius;
  const int nv = p.num_vars();
  const int n = p.n;

  p.objective = DensePoly(nv);
  for (int l = 1; l <= p.r; ++l) {
    p.objective.add_term(Monomial::variable(lifted_index(n, LiftedVar::t(l, n))), 1.0);
  }

  for (int l = 1; l <= p.r; ++l) {
    for (int i = 1; i <= n; ++i) {
      const int x = lifted_index(n, LiftedVar::x(i));
      const int t = lifted_index(n, LiftedVar::t(l, i));
      DensePoly fi = univariate_in(f.factor(l - 1, i - 1), x, nv);
      DensePoly rhs = fi;
      if (i > 1) {
        DensePoly prev(nv);
        prev.add_term(Monomial::variable(lifted_index(n, LiftedVar::t(l, i - 1))), 1.0);
        rhs = prev * fi;
      }
      DensePoly h(nv);
      h.add_term(Monomial::variable(t), 1.0);
      p.equalities.push_back({l, i, h - rhs});
    }
  }

  for (int i = 1; i <= n; ++i) {
    DensePoly g = DensePoly::constant(nv, box_radius * box_radius);
    g.add_term(Monomial::variable(lifted_index(n, LiftedVar::x(i)), 2), -1.0);
    p.inequalities.push_back(std::move(g));
  }

  if (with_t_bounds) {
    for (int l = 1; l <= p.r; ++l) {
      double prod = 1.0;
      for (int i = 1; i <= n; ++i) {
        prod *= univariate_abs_max(f.factor(l - 1, i - 1), box_radius);
        const double bound = prod * (1.0 + kTBoundInflation);
        p.t_bounds.push_back(bound);
        DensePoly g = DensePoly::constant(nv, bound * bound);
        g.add_term(Monomial::variable(lifted_index(n, LiftedVar::t(l, i)), 2), -1.0);
        p.inequalities.push_back(std::move(g));
      }
    }
  }
  return p;
}

std::vector<double> natural_scales(const CPPoly& f_in, double box_radius) {
  const CPPoly f = basis_convert(f_in, Basis::Monomial);
  const int n = f.n();
  std::vector<double> scale(n * (f.r() + 1), 1.0);
  for (int l = 1; l <= f.r(); ++l) {
    double prod = 1.0;
    for (int i = 1; i <= n; ++i) {
      const double m = univariate_abs_max(f.factor(l - 1, i - 1), box_radius);
      if (m > 0.0 && std::isfinite(m)) prod *= m;
      scale[lifted_index(n, LiftedVar::t(l, i))] = prod;
    }
  }
  return scale;
}

namespace {

DensePoly substitute_scale(const DensePoly& poly, std::span<const double> scale, double divisor) {
  DensePoly out(poly.num_vars());
  for (const auto& [m, c] : poly.terms()) {
    double coeff = c / divisor;
    for (const auto& [var, e] : m.factors()) coeff *= std::pow(scale[var], e);
    out.add_term(m, coeff);
  }
  return out;
}

}  // namespace

LiftedPOP rescale_lifted_pop(const LiftedPOP& p, std::span<const double> scale) {
  if (static_cast<int>(scale.size()) != p.num_vars()) {
    throw InvalidInput("rescale_lifted_pop: one scale per lifted variable expected");
  }
  for (double s : scale) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("variable scales must be positive");
  }
  LiftedPOP q = p;
  q.objective = substitute_scale(p.objective, scale, 1.0);
  for (LiftingEquality& h : q.equalities) {
    const double lead = scale[lifted_index(p.n, LiftedVar::t(h.l, h.i))];
    h.poly = substitute_scale(h.poly, scale, lead);
  }
  for (DensePoly& g : q.inequalities) {
    double big = 0.0;
    for (const auto& [m, c] : g.terms()) {
      double coeff = std::abs(c);
      for (const auto& [var, e] : m.factors()) coeff *= std::pow(scale[var], e);
      big = std::max(big, coeff);
    }
    g = substitute_scale(g, scale, big > 0.0 ? big : 1.0);
  }
  q.var_scale.resize(scale.size());
  for (std::size_t v = 0; v < scale.size(); ++v) {
    q.var_scale[v] = (p.var_scale.empty() ? 1.0 : p.var_scale[v]) * scale[v];
  }
  return q;
}

std::vector<double> lift_point(const CPPoly& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.n()) {
    throw InvalidInput("lift_point: dimension mismatch");
  }
  const int n = f.n();
  std::vector<double> out(n * (f.r() + 1));
  std::copy(x.begin(), x.end(), out.begin());
  for (int l = 1; l <= f.r(); ++l) {
    double t = 1.0;
    for (int i = 1; i <= n; ++i) {
      t *= uni_eval(f.factor(l - 1, i - 1), x[i - 1]);
      out[lifted_index(n, LiftedVar::t(l, i))] = t;
    }
  }
  return out;
}

CliqueAssignment assign_to_cliques(const LiftedPOP& p, const CliqueTree& t) {
  const int nc = static_cast<int>(t.cliques.size());
  const int nv = p.num_vars();
  std::vector<std::vector<int>> cliques_of(nv);
  for (int a = 0; a < nc; ++a) {
    for (int v : t.cliques[a]) {
      if (v >= nv) throw StructuralError("clique tree has more vertices than the problem");
      cliques_of[v].push_back(a);
    }
  }
  auto owner = [&](const DensePoly& poly, const std::string& what) {
    const auto vars = poly.variables();
    if (vars.empty()) {
      if (nc == 0) throw StructuralError("no cliques to hold " + what);
      return 0;
    }
    for (int a : cliques_of[vars.front()]) {
      const auto& c = t.cliques[a];
      if (std::includes(c.begin(), c.end(), vars.begin(), vars.end())) return a;
    }
    throw StructuralError(what + " is not covered by any clique");
  };

  CliqueAssignment asg;
  asg.inequalities.resize(nc);
  asg.equalities.resize(nc);
  for (std::size_t j = 0; j < p.inequalities.size(); ++j) {
    const int a = owner(p.inequalities[j], "inequality " + std::to_string(j));
    asg.inequalities[a].push_back(static_cast<int>(j));
    asg.inequality_owner.push_back(a);
  }
  for (std::size_t e = 0; e < p.equalities.size(); ++e) {
    const auto& h = p.equalities[e];
    const int a = owner(h.poly, "equality h_" + std::to_string(h.l) + "," +
                                    std::to_string(h.i));
    asg.equalities[a].push_back(static_cast<int>(e));
    asg.equality_owner.push_back(a);
  }
  return asg;
}

}  // namespace lrpop
