#include "lrpop/relaxation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

#include "lrpop/errors.h"

namespace lrpop {
namespace {

void append_exponents(int num_vars, int degree, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
  const int pos = static_cast<int>(current.size());
  if (pos == num_vars - 1) {
    current.push_back(degree);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current.push_back(e);
    append_exponents(num_vars, degree - e, current, out);
    current.pop_back();
  }
}

int half_degree(const DensePoly& g) { return (g.degree() + 1) / 2; }

struct CliqueSpec {
  std::vector<int> vars;
  std::vector<int> inequalities;  // indices into the inequality list
  std::vector<int> equalities;    // indices into the equality list
};

class Assembler {
 public:
  Assembler(int k, bool strict, bool reduce) : k_(k), strict_(strict), reduce_(reduce) {}

  BlockSDP run(const std::vector<CliqueSpec>& cliques,
               const std::vector<DensePoly>& inequalities,
               const std::vector<LiftingEquality>& equalities,
               const DensePoly& objective) {
    // Moment blocks first so that every y variable is created by one of them.
    std::vector<MonomialBasis> bases;
    bases.reserve(cliques.size());
    for (std::size_t a = 0; a < cliques.size(); ++a) {
      bases.push_back(clique_monomials(cliques[a].vars, k_));
      add_moment_block(static_cast<int>(a), bases.back());
    }
    for (std::size_t a = 0; a < cliques.size(); ++a) {
      for (int j : cliques[a].inequalities) {
        add_localizing_block(static_cast<int>(a), j, cliques[a].vars, inequalities[j]);
      }
    }
    if (reduce_) {
      for (SdpBlock& block : sdp_.blocks) {
        const CliqueSpec& spec = cliques[block.clique];
        const int kk = block.kind == BlockKind::Moment
                           ? k_
                           : k_ - half_degree(inequalities[block_ineq_[&block - sdp_.blocks.data()]]);
        std::vector<const DensePoly*> polys;
        for (int e : spec.equalities) polys.push_back(&equalities[e].poly);
        reduce_block(block, clique_monomials(spec.vars, kk), polys);
      }
    }
    sdp_.equalities.add_row({{intern(Monomial{}), 1.0}}, 1.0);
    sdp_.row_origins.push_back({RowKind::Normalization, -1, 0, 0});
    for (std::size_t a = 0; a < cliques.size(); ++a) {
      for (int e : cliques[a].equalities) {
        add_lifting_rows(static_cast<int>(a), cliques[a].vars, equalities[e]);
      }
    }
    for (const auto& [m, c] : objective.terms()) {
      auto it = index_.find(m);
      if (it == index_.end()) {
        throw StructuralError("objective monomial is not supported on any clique");
      }
      sdp_.objective.vars.push_back(it->second);
      sdp_.objective.coeffs.push_back(c);
    }
    sdp_.y_count = static_cast<int>(sdp_.y_monomials.size());
    return std::move(sdp_);
  }

 private:
  int intern(const Monomial& m) {
    auto [it, inserted] = index_.try_emplace(m, static_cast<int>(sdp_.y_monomials.size()));
    if (inserted) sdp_.y_monomials.push_back(m);
    return it->second;
  }

  int lookup(const Monomial& m) const {
    auto it = index_.find(m);
    if (it == index_.end()) {
      throw StructuralError("constraint monomial outside its clique's moment block");
    }
    return it->second;
  }

  void add_moment_block(int a, const MonomialBasis& basis) {
    SdpBlock block;
    block.label = "moment[" + std::to_string(a) + "]";
    block.size = basis.size();
    block.kind = BlockKind::Moment;
    block.clique = a;
    for (int p = 0; p < basis.size(); ++p) {
      for (int q = p; q < basis.size(); ++q) {
        block.terms.push_back({p, q, intern(basis.monomials[p] * basis.monomials[q]), 1.0});
      }
    }
    sdp_.blocks.push_back(std::move(block));
    block_ineq_.push_back(-1);
  }

  void add_localizing_block(int a, int j, const std::vector<int>& vars,
                            const DensePoly& g) {
    const int dj = half_degree(g);
    if (dj > k_) {
      throw OrderTooSmall("inequality " + std::to_string(j) + " has degree " +
                          std::to_string(g.degree()) + ", needs order >= " +
                          std::to_string(dj));
    }
    const MonomialBasis basis = clique_monomials(vars, k_ - dj);
    SdpBlock block;
    block.label = "localizing[" + std::to_string(a) + "," + std::to_string(j) + "]";
    block.size = basis.size();
    block.kind = BlockKind::Localizing;
    block.clique = a;
    for (int p = 0; p < basis.size(); ++p) {
      for (int q = p; q < basis.size(); ++q) {
        const Monomial pq = basis.monomials[p] * basis.monomials[q];
        for (const auto& [alpha, coeff] : g.terms()) {
          block.terms.push_back({p, q, lookup(pq * alpha), coeff});
        }
      }
    }
    sdp_.blocks.push_back(std::move(block));
    block_ineq_.push_back(j);
  }

  // Restricts a block to the orthogonal complement of the vectors q*h that
  // the lifting rows force into its kernel (deg(q h) within the block order).
  void reduce_block(SdpBlock& block, const MonomialBasis& basis,
                    const std::vector<const DensePoly*>& polys) {
    const int kk = basis.size() == 0 ? 0 : basis.monomials.back().degree();
    std::unordered_map<Monomial, int, MonomialHash> pos;
    for (int p = 0; p < basis.size(); ++p) pos.emplace(basis.monomials[p], p);
    std::vector<Eigen::VectorXd> kernel;
    for (const DensePoly* h : polys) {
      const int budget = kk - h->degree() - (strict_ ? 1 : 0);
      if (budget < 0) continue;
      for (const Monomial& q : clique_monomials(basis.variables, budget).monomials) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.size());
        for (const auto& [alpha, coeff] : h->terms()) v[pos.at(q * alpha)] += coeff;
        kernel.push_back(std::move(v));
      }
    }
    if (kernel.empty()) return;
    const int s = basis.size();
    Eigen::MatrixXd N(s, static_cast<int>(kernel.size()));
    for (int c = 0; c < N.cols(); ++c) N.col(c) = kernel[c];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(N);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    if (rank == 0) return;
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(s, s);
    const Eigen::MatrixXd U = Q.rightCols(s - rank);
    std::map<int, Eigen::MatrixXd> by_var;
    for (const BlockTerm& t : block.terms) {
      auto [it, fresh] = by_var.try_emplace(t.var, Eigen::MatrixXd::Zero(s, s));
      it->second(t.row, t.col) += t.coeff;
      if (t.row != t.col) it->second(t.col, t.row) += t.coeff;
    }
    block.terms.clear();
    block.size = s - rank;
    for (const auto& [var, A] : by_var) {
      const Eigen::MatrixXd R = U.transpose() * A * U;
      const double cut = 1e-13 * std::max(1.0, R.cwiseAbs().maxCoeff());
      for (int j = 0; j < R.cols(); ++j) {
        for (int i = 0; i <= j; ++i) {
          if (std::abs(R(i, j)) > cut) block.terms.push_back({i, j, var, R(i, j)});
        }
      }
    }
  }

  void add_lifting_rows(int a, const std::vector<int>& vars, const LiftingEquality& h) {
    const int budget = 2 * k_ - h.poly.degree() - (strict_ ? 1 : 0);
    if (budget < 0) {
      throw OrderTooSmall("lifting equality h_" + std::to_string(h.l) + "," +
                          std::to_string(h.i) + " has degree " +
                          std::to_string(h.poly.degree()) + ", order " +
                          std::to_string(k_) + " cannot impose it");
    }
    const MonomialBasis basis = clique_monomials(vars, budget);
    std::vector<std::pair<int, double>> row;
    for (const Monomial& q : basis.monomials) {
      row.clear();
      for (const auto& [alpha, coeff] : h.poly.terms()) {
        row.emplace_back(lookup(q * alpha), coeff);
      }
      sdp_.equalities.add_row(row, 0.0);
      sdp_.row_origins.push_back({RowKind::Lifting, a, h.l, h.i});
    }
  }

  int k_;
  bool strict_;
  bool reduce_;
  std::vector<int> block_ineq_;  // inequality index per block, -1 for moment blocks
  BlockSDP sdp_;
  std::unordered_map<Monomial, int, MonomialHash> index_;
};

}  // namespace

double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return std::round(b);
}

MonomialBasis clique_monomials(std::span<const int> clique, int k) {
  if (k < 0) throw InvalidInput("monomial basis degree must be >= 0");
  MonomialBasis basis;
  basis.variables.assign(clique.begin(), clique.end());
  const int nv = static_cast<int>(clique.size());
  if (nv == 0) {
    basis.exponents.push_back({});
  } else {
    std::vector<int> current;
    for (int deg = 0; deg <= k; ++deg) append_exponents(nv, deg, current, basis.exponents);
  }
  basis.monomials.reserve(basis.exponents.size());
  for (const auto& e : basis.exponents) {
    std::vector<Monomial::Factor> factors;
    for (int j = 0; j < nv; ++j) {
      if (e[j] > 0) factors.push_back({clique[j], e[j]});
    }
    basis.monomials.push_back(Monomial::from_factors(std::move(factors)));
  }
  return basis;
}

int minimal_lr_order(const LiftedPOP& p) {
  int max_deg = 1;
  for (const auto& h : p.equalities) max_deg = std::max(max_deg, h.poly.degree());
  for (const auto& g : p.inequalities) max_deg = std::max(max_deg, g.degree());
  return std::max(1, (max_deg + 1) / 2);
}

BlockSDP assemble_lr_moment_sdp(const LiftedPOP& p, const CliqueTree& t,
                                const CliqueAssignment& asg, int k,
                                bool strict_degree, bool facial_reduction) {
  if (k < 1) throw OrderTooSmall("relaxation order must be >= 1");
  const std::size_t nc = t.cliques.size();
  if (asg.inequalities.size() != nc || asg.equalities.size() != nc ||
      asg.inequality_owner.size() != p.inequalities.size() ||
      asg.equality_owner.size() != p.equalities.size()) {
    throw StructuralError("clique assignment does not match the clique tree");
  }
  std::vector<CliqueSpec> specs(nc);
  for (std::size_t a = 0; a < nc; ++a) {
    specs[a].vars = t.cliques[a];
    specs[a].inequalities = asg.inequalities[a];
    specs[a].equalities = asg.equalities[a];
    auto covers = [&](const DensePoly& poly) {
      const auto vars = poly.variables();
      return std::includes(specs[a].vars.begin(), specs[a].vars.end(),
                           vars.begin(), vars.end());
    };
    for (int j : specs[a].inequalities) {
      if (!covers(p.inequalities.at(j))) {
        throw StructuralError("inequality assigned to a clique that misses its variables");
      }
    }
    for (int e : specs[a].equalities) {
      if (!covers(p.equalities.at(e).poly)) {
        throw StructuralError("equality assigned to a clique that misses its variables");
      }
    }
  }
  return Assembler(k, strict_degree, facial_reduction).run(specs, p.inequalities, p.equalities, p.objective);
}

BlockSDP assemble_dense_moment_sdp(const DensePoly& f, double box_radius, int k) {
  if (k < 1) throw OrderTooSmall("relaxation order must be >= 1");
  if (2 * k < f.degree()) {
    throw OrderTooSmall("dense relaxation needs 2k >= deg f = " +
                        std::to_string(f.degree()));
  }
  const int n = f.num_vars();
  std::vector<DensePoly> box;
  CliqueSpec all;
  for (int i = 0; i < n; ++i) {
    all.vars.push_back(i);
    DensePoly g = DensePoly::constant(n, box_radius * box_radius);
    g.add_term(Monomial::variable(i, 2), -1.0);
    box.push_back(std::move(g));
    all.inequalities.push_back(i);
  }
  return Assembler(k, false, false).run({all}, box, {}, f);
}

ComplexityReport complexity_report(const BlockSDP& sdp, const CliqueTree& t,
                                   const LiftedPOP& p, int k, bool strict_degree) {
  ComplexityReport rep;
  for (const SdpBlock& b : sdp.blocks) {
    if (b.kind == BlockKind::Moment) {
      ++rep.n_blocks;
      rep.max_block_size = std::max(rep.max_block_size, b.size);
    } else {
      ++rep.n_localizing_blocks;
    }
  }
  for (const RowOrigin& o : sdp.row_origins) {
    if (o.kind == RowKind::Lifting) ++rep.n_lifting_equalities;
  }
  for (const auto& s : t.separators) {
    const int sz = static_cast<int>(s.size());
    rep.n_separator_equalities +=
        static_cast<std::int64_t>(binomial_coefficient(sz + 2 * k, 2 * k));
  }

  const int width = std::min(p.n, p.r + 1);
  rep.predicted_max_blocks = p.n * (p.r + 1);
  rep.predicted_max_block_size =
      static_cast<int>(binomial_coefficient(width + 1 + k, k));
  const double s_h = binomial_coefficient(width + k, k);
  const std::int64_t edges = t.cliques.empty() ? 0 : static_cast<std::int64_t>(t.cliques.size()) - 1;
  rep.predicted_separator_equalities =
      edges * static_cast<std::int64_t>(s_h * (s_h + 1) / 2);
  for (const auto& h : p.equalities) {
    const int budget = 2 * k - h.poly.degree() - (strict_degree ? 1 : 0);
    if (budget >= 0) {
      rep.predicted_lifting_equalities +=
          static_cast<std::int64_t>(binomial_coefficient(width + 1 + budget, budget));
    }
  }
  if (!rep.within_bounds()) {
    throw StructuralError("assembled SDP exceeds its complexity bounds");
  }
  return rep;
}

ComplexityReport complexity_report(const CliqueTree& t, const LiftedPOP& p,
                                   int k, bool strict_degree) {
  const CliqueAssignment asg = assign_to_cliques(p, t);
  const BlockSDP sdp = assemble_lr_moment_sdp(p, t, asg, k, strict_degree);
  return complexity_report(sdp, t, p, k, strict_degree);
}

}  // namespace lrpop
