#pragma once

#include <span>
#include <string>
#include <vector>

#include "lrpop/monomial.h"
#include "lrpop/polyrep.h"
#include "lrpop/sparsity.h"

namespace lrpop {

/// h_{l,i} = t_{l,i} - t_{l,i-1} f_{l,i}(x_i)  (h_{l,1} = t_{l,1} - f_{l,1}(x_1)).
struct LiftingEquality {
  int l = 1;  // 1-based
  int i = 1;  // 1-based
  DensePoly poly;
};

/// Lifted polynomial problem over the n(r+1) variables of `lifted_index`:
///   min sum_l t_{l,n}  s.t.  h_{l,i} = 0,  g_j >= 0.
struct LiftedPOP {
  int n = 0;
  int r = 0;
  double box_radius = 1.0;
  DensePoly objective;
  std::vector<LiftingEquality> equalities;  // ordered l-major, then i
  std::vector<DensePoly> inequalities;      // box constraints first
  std::vector<double> t_bounds;             // B_{l,i}, row-major; empty if off
  /// Lifted variable v stands for var_scale[v] times the original variable;
  /// empty when no rescaling was applied.
  std::vector<double> var_scale;

  int num_vars() const { return n * (r + 1); }
  std::string var_name(int index) const { return lifted_var(n, index).label(); }
  const LiftingEquality& equality(int l, int i) const {
    return equalities[(l - 1) * n + (i - 1)];
  }
};

inline constexpr double kTBoundInflation = 1e-6;

/// Builds the lifted problem with box constraints radius^2 - x_i^2 >= 0 and,
/// optionally, B_{l,i}^2 - t_{l,i}^2 >= 0. Bernstein factors are converted to
/// the monomial basis first.
LiftedPOP build_lifted_pop(const CPPoly& f, double box_radius = 1.0,
                           bool with_t_bounds = false);

/// Natural magnitudes of the lifted variables: 1 for x_i and
/// prod_{k<=i} max|f_{l,k}| for t_{l,i} (factors that vanish on the box count
/// as 1).
std::vector<double> natural_scales(const CPPoly& f, double box_radius = 1.0);

/// Substitutes v -> scale[v] * v in every polynomial and divides each
/// equality by the scale of its t_{l,i} and each inequality by its largest
/// coefficient magnitude. The moment relaxation of the result has
/// the same optimal value; only its numerical scaling changes.
LiftedPOP rescale_lifted_pop(const LiftedPOP& p, std::span<const double> scale);

/// max_{|x| <= radius} |p(x)|: 1025 uniform samples including both endpoints,
/// refined by bisection on sign changes of p'.
double univariate_abs_max(const UniPoly& p, double radius);

/// Full lifted point (x, t) with t given by the partial-product recursion.
std::vector<double> lift_point(const CPPoly& f, std::span<const double> x);

/// J_a and H_a: each constraint goes to the lowest-index clique containing all
/// of its variables.
struct CliqueAssignment {
  std::vector<std::vector<int>> inequalities;  // per clique, indices into pop
  std::vector<std::vector<int>> equalities;    // per clique, indices into pop
  std::vector<int> inequality_owner;
  std::vector<int> equality_owner;
};

/// Throws StructuralError if some constraint has no covering clique.
CliqueAssignment assign_to_cliques(const LiftedPOP& p, const CliqueTree& t);

}  // namespace lrpop
