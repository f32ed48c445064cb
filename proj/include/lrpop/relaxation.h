#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrpop/block_sdp.h"
#include "lrpop/lifting.h"
#include "lrpop/monomial.h"
#include "lrpop/sparsity.h"

namespace lrpop {

/// All monomials of total degree <= k in the given variables, graded-lex
/// ordered (by degree, then lexicographically with the first variable most
/// significant). exponents[p][j] is the power of variables[j].
struct MonomialBasis {
  std::vector<int> variables;
  std::vector<std::vector<int>> exponents;
  std::vector<Monomial> monomials;

  int size() const { return static_cast<int>(monomials.size()); }
};

MonomialBasis clique_monomials(std::span<const int> clique, int k);

double binomial_coefficient(int n, int k);

/// Clique-wise moment relaxation of the lifted problem at order k.
///
/// One moment block per clique, one localizing block per assigned inequality,
/// rows L(q h_{l,i}) = 0 for clique monomials q with deg(q h) <= 2k (< 2k when
/// strict_degree), and L(1) = 1. Moments supported on a separator are shared
/// between the cliques that contain them, so overlap consistency holds by
/// construction. Throws OrderTooSmall or StructuralError.
///
/// With facial_reduction, each block is restricted to the orthogonal
/// complement of the vectors q*h_{l,i} (deg(q h) within the block order) that
/// the lifting rows force into its kernel. The feasible set is unchanged, but
/// the moment side gains interior points.
BlockSDP assemble_lr_moment_sdp(const LiftedPOP& p, const CliqueTree& t,
                                const CliqueAssignment& asg, int k,
                                bool strict_degree = false,
                                bool facial_reduction = false);

/// Dense moment relaxation of min f over the box [-radius, radius]^n: one
/// moment block over all x, one localizing block per box constraint.
BlockSDP assemble_dense_moment_sdp(const DensePoly& f, double box_radius, int k);

/// Smallest order accepted for the lifted problem: ceil((max deg f_{l,i} + 1)/2).
int minimal_lr_order(const LiftedPOP& p);

struct ComplexityReport {
  int n_blocks = 0;             // moment blocks (one per clique)
  int n_localizing_blocks = 0;
  int max_block_size = 0;
  std::int64_t n_separator_equalities = 0;
  std::int64_t n_lifting_equalities = 0;

  int predicted_max_blocks = 0;
  int predicted_max_block_size = 0;
  std::int64_t predicted_separator_equalities = 0;
  std::int64_t predicted_lifting_equalities = 0;

  bool within_bounds() const {
    return n_blocks <= predicted_max_blocks &&
           max_block_size <= predicted_max_block_size &&
           n_separator_equalities <= predicted_separator_equalities &&
           n_lifting_equalities <= predicted_lifting_equalities;
  }
  bool operator==(const ComplexityReport&) const = default;
};

/// Counters of the assembled LR SDP next to their a priori bounds.
///
/// Separator equalities are reported as the number of moment identities the
/// shared variables stand in for: binom(|S| + 2k, 2k) per tree edge. The bound
/// is (N - 1) s_h (s_h + 1) / 2 with s_h = binom(w + k, k), w = min(n, r + 1).
/// Throws StructuralError if an actual counter exceeds its bound.
ComplexityReport complexity_report(const CliqueTree& t, const LiftedPOP& p,
                                   int k, bool strict_degree = false);
ComplexityReport complexity_report(const BlockSDP& sdp, const CliqueTree& t,
                                   const LiftedPOP& p, int k,
                                   bool strict_degree = false);

}  // namespace lrpop
