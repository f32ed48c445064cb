#include "lrpop/relaxation.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "lrpop/block_sdp.h"
#include "lrpop/cp_json.h"
#include "lrpop/errors.h"
#include "lrpop/lifting.h"
#include "lrpop/sparsity.h"
#include "test_util.h"

namespace lrpop {
namespace {

struct Assembled {
  LiftedPOP pop;
  CliqueTree tree;
  CliqueAssignment asg;
  BlockSDP sdp;
};

Assembled Assemble(const CPPoly& f, int k, bool strict = false, bool t_bounds = false) {
  Assembled a;
  a.pop = build_lifted_pop(f, 1.0, t_bounds);
  a.tree = lr_clique_tree(f.r(), f.n());
  a.asg = assign_to_cliques(a.pop, a.tree);
  a.sdp = assemble_lr_moment_sdp(a.pop, a.tree, a.asg, k, strict);
  return a;
}

int CountKind(const BlockSDP& sdp, BlockKind kind) {
  return static_cast<int>(std::count_if(sdp.blocks.begin(), sdp.blocks.end(),
                                        [&](const SdpBlock& b) { return b.kind == kind; }));
}

TEST(CliqueMonomialsTest, SizesAndOrder) {
  EXPECT_EQ(clique_monomials(std::vector<int>{0, 1, 2, 3}, 2).size(), 15);
  const MonomialBasis one = clique_monomials(std::vector<int>{7}, 1);
  ASSERT_EQ(one.size(), 2);
  EXPECT_TRUE(one.monomials[0].is_constant());
  EXPECT_EQ(one.monomials[1], Monomial::variable(7));
  EXPECT_EQ(clique_monomials(std::vector<int>{1, 4, 5}, 3).size(), 20);
  // Graded-lex: degree first, then the first variable most significant.
  const MonomialBasis b = clique_monomials(std::vector<int>{2, 5}, 2);
  const std::vector<std::vector<int>> want{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(b.exponents, want);
  for (int size = 1; size <= 6; ++size) {
    for (int k = 0; k <= 4; ++k) {
      std::vector<int> vars(size);
      for (int i = 0; i < size; ++i) vars[i] = i;
      EXPECT_EQ(clique_monomials(vars, k).size(), binomial_coefficient(size + k, k));
    }
  }
}

TEST(LrSdpTest, ExampleShape) {
  const Assembled a = Assemble(read_cp_file(test::data_path("five_var_r2.json")), 2);
  EXPECT_EQ(CountKind(a.sdp, BlockKind::Moment), 10);
  EXPECT_EQ(CountKind(a.sdp, BlockKind::Localizing), 5);
  for (const SdpBlock& b : a.sdp.blocks) {
    EXPECT_LE(b.size, 15);
    if (b.kind == BlockKind::Localizing) {
      // Box constraints have degree 2: order k - 1 over the clique.
      const int s = static_cast<int>(a.tree.cliques[b.clique].size());
      EXPECT_EQ(b.size, binomial_coefficient(s + 1, 1));
    }
  }
  EXPECT_NO_THROW(validate(a.sdp));
}

TEST(LrSdpTest, TrivialInstance) {
  const CPPoly f(1, 1, {UniPoly::monomial({0.0, 1.0})});
  const Assembled a = Assemble(f, 1);
  ASSERT_EQ(CountKind(a.sdp, BlockKind::Moment), 1);
  EXPECT_EQ(a.sdp.blocks[0].size, 3);
  const int yx = a.sdp.find_moment(Monomial::variable(0));
  const int yt = a.sdp.find_moment(Monomial::variable(1));
  ASSERT_GE(yx, 0);
  ASSERT_GE(yt, 0);
  // Some equality row reads y_t - y_x = 0.
  bool found = false;
  const auto& eq = a.sdp.equalities;
  for (int row = 0; row < eq.num_rows(); ++row) {
    std::map<int, double> coeffs;
    for (std::size_t e = 0; e < eq.rows.size(); ++e) {
      if (eq.rows[e] == row) coeffs[eq.cols[e]] += eq.vals[e];
    }
    if (coeffs.size() == 2 && coeffs[yt] == 1.0 && coeffs[yx] == -1.0 && eq.rhs[row] == 0.0) {
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

// Entry (row, col) of every moment block must be the single moment of the
// product of its basis monomials, so shared monomials share one variable.
TEST(LrSdpTest, MomentBlocksAreStructural) {
  for (auto [r, n, d, k] : {std::tuple{2, 5, 1, 2}, std::tuple{1, 3, 3, 2}, std::tuple{3, 4, 2, 3}}) {
    const Assembled a = Assemble(gen_monomial_instance(n, d, r, 7), k);
    std::map<Monomial, int> seen;
    for (const SdpBlock& b : a.sdp.blocks) {
      if (b.kind != BlockKind::Moment) continue;
      const MonomialBasis basis = clique_monomials(a.tree.cliques[b.clique], k);
      ASSERT_EQ(b.size, basis.size());
      std::set<std::pair<int, int>> entries;
      for (const BlockTerm& t : b.terms) {
        EXPECT_LE(t.row, t.col);
        EXPECT_DOUBLE_EQ(t.coeff, 1.0);
        EXPECT_TRUE(entries.insert({t.row, t.col}).second);
        const Monomial m = basis.monomials[t.row] * basis.monomials[t.col];
        EXPECT_EQ(a.sdp.y_monomials[t.var], m);
        auto [it, fresh] = seen.emplace(m, t.var);
        EXPECT_EQ(it->second, t.var);
      }
      EXPECT_EQ(static_cast<int>(entries.size()), b.size * (b.size + 1) / 2);
    }
  }
}

TEST(LrSdpTest, LiftingRowCounts) {
  const CPPoly f = gen_monomial_instance(4, 2, 2, 3);
  for (bool strict : {false, true}) {
    const int k = 3;
    const Assembled a = Assemble(f, k, strict);
    std::map<std::tuple<int, int, int>, int> rows;
    for (std::size_t row = 0; row < a.sdp.row_origins.size(); ++row) {
      const RowOrigin& o = a.sdp.row_origins[row];
      if (o.kind == RowKind::Lifting) ++rows[{o.clique, o.l, o.i}];
    }
    for (std::size_t e = 0; e < a.pop.equalities.size(); ++e) {
      const LiftingEquality& h = a.pop.equalities[e];
      const int owner = a.asg.equality_owner[e];
      const MonomialBasis basis = clique_monomials(a.tree.cliques[owner], 2 * k);
      int want = 0;
      for (const Monomial& q : basis.monomials) {
        const int deg = q.degree() + h.poly.degree();
        if (strict ? deg < 2 * k : deg <= 2 * k) ++want;
      }
      EXPECT_EQ((rows[{owner, h.l, h.i}]), want);
    }
  }
  EXPECT_LT(Assemble(f, 3, true).sdp.equalities.num_rows(),
            Assemble(f, 3, false).sdp.equalities.num_rows());
}

TEST(LrSdpTest, LiftingRowsStayInOneClique) {
  const Assembled a = Assemble(gen_monomial_instance(5, 2, 2, 1), 2);
  const auto& eq = a.sdp.equalities;
  for (std::size_t e = 0; e < eq.rows.size(); ++e) {
    const RowOrigin& o = a.sdp.row_origins[eq.rows[e]];
    if (o.kind != RowKind::Lifting) continue;
    const auto& clique = a.tree.cliques[o.clique];
    for (int v : a.sdp.y_monomials[eq.cols[e]].support()) {
      EXPECT_TRUE(std::binary_search(clique.begin(), clique.end(), v));
    }
  }
}

TEST(LrSdpTest, OrderTooSmall) {
  const CPPoly f = gen_monomial_instance(3, 3, 1, 1);
  EXPECT_THROW(Assemble(f, 1), OrderTooSmall);
  EXPECT_NO_THROW(Assemble(f, 2));
  EXPECT_EQ(minimal_lr_order(build_lifted_pop(f)), 2);
  // Strict filter at the minimal order leaves degree-4 equalities unused.
  EXPECT_THROW(Assemble(f, 2, true), OrderTooSmall);
}

TEST(LrSdpTest, TBoundLocalizingBlocks) {
  const CPPoly f = gen_monomial_instance(3, 2, 2, 1);
  const Assembled a = Assemble(f, 2, false, true);
  EXPECT_EQ(CountKind(a.sdp, BlockKind::Localizing), 3 + 6);
}

TEST(LrSdpTest, NormalizationRow) {
  const Assembled a = Assemble(gen_monomial_instance(3, 2, 2, 1), 2);
  int count = 0;
  for (std::size_t row = 0; row < a.sdp.row_origins.size(); ++row) {
    if (a.sdp.row_origins[row].kind == RowKind::Normalization) {
      ++count;
      EXPECT_EQ(a.sdp.equalities.rhs[row], 1.0);
    }
  }
  EXPECT_EQ(count, 1);
  EXPECT_EQ(a.sdp.find_moment(Monomial()), 0);
}

TEST(DenseSdpTest, Shapes) {
  DensePoly f(2);
  f.add_term(Monomial::variable(0, 2), 1.0);
  const BlockSDP s = assemble_dense_moment_sdp(f, 1.0, 2);
  EXPECT_EQ(s.blocks[0].size, 6);
  EXPECT_EQ(CountKind(s, BlockKind::Localizing), 2);
  const BlockSDP big = assemble_dense_moment_sdp(cp_expand(gen_monomial_instance(4, 3, 1, 1)), 1.0, 6);
  EXPECT_EQ(big.blocks[0].size, 210);
  EXPECT_THROW(assemble_dense_moment_sdp(cp_expand(gen_monomial_instance(2, 3, 1, 1)), 1.0, 2),
               OrderTooSmall);
}

TEST(ComplexityTest, Bounds) {
  {
    const CPPoly f = gen_monomial_instance(5, 1, 2, 1);
    const Assembled a = Assemble(f, 2);
    const ComplexityReport c = complexity_report(a.sdp, a.tree, a.pop, 2);
    EXPECT_LE(c.max_block_size, 15);
    EXPECT_EQ(c.predicted_max_block_size, 15);
    EXPECT_LE(c.n_blocks, 5 * 3);
    EXPECT_TRUE(c.within_bounds());
    const int sh = static_cast<int>(binomial_coefficient(2 + 1 + 2, 2));
    EXPECT_LE(c.n_separator_equalities,
              static_cast<std::int64_t>(c.n_blocks - 1) * sh * (sh + 1) / 2);
    EXPECT_EQ(c, complexity_report(a.tree, a.pop, 2));
  }
  {
    const CPPoly f(1, 1, {UniPoly::monomial({0.0, 1.0})});
    const Assembled a = Assemble(f, 1);
    const ComplexityReport c = complexity_report(a.sdp, a.tree, a.pop, 1);
    EXPECT_EQ(c.n_blocks, 1);
    EXPECT_EQ(c.n_separator_equalities, 0);
  }
}

TEST(ComplexityTest, Sweep) {
  for (int r = 1; r <= 3; ++r) {
    for (int n = 1; n <= 7; ++n) {
      for (int d = 1; d <= 3; ++d) {
        const CPPoly f = gen_monomial_instance(n, d, r, 31 * n + d);
        const int k = (d + 2) / 2 + (n % 2);
        const Assembled a = Assemble(f, k);
        const ComplexityReport c = complexity_report(a.sdp, a.tree, a.pop, k);
        EXPECT_TRUE(c.within_bounds());
        EXPECT_LE(c.n_blocks, n * (r + 1));
        if (r + 1 <= n) {
          EXPECT_LE(c.max_block_size, binomial_coefficient(r + 2 + k, k));
        }
      }
    }
  }
}

TEST(BlockSdpJsonTest, RoundTrip) {
  const Assembled a = Assemble(gen_monomial_instance(3, 2, 2, 4), 2, false, true);
  const nlohmann::json doc = sdp_to_json(a.sdp);
  const BlockSDP back = sdp_from_json(doc);
  EXPECT_EQ(sdp_to_json(back), doc);
  EXPECT_EQ(back.y_count, a.sdp.y_count);
  EXPECT_EQ(back.blocks.size(), a.sdp.blocks.size());
}

TEST(BlockSdpJsonTest, Rejects) {
  const Assembled a = Assemble(gen_monomial_instance(2, 1, 1, 4), 1);
  nlohmann::json doc = sdp_to_json(a.sdp);
  doc["bogus"] = 1;
  EXPECT_THROW(sdp_from_json(doc), InvalidInput);
  BlockSDP bad = a.sdp;
  bad.blocks[0].terms[0].var = bad.y_count;
  EXPECT_THROW(validate(bad), InvalidInput);
  bad = a.sdp;
  bad.blocks[0].terms[0].row = bad.blocks[0].size;
  EXPECT_THROW(validate(bad), InvalidInput);
}

}  // namespace
}  // namespace lrpop
