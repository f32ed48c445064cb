#include "lrpop/sparsity.h"

#include <algorithm>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "lrpop/errors.h"
#include "lrpop/random.h"

namespace lrpop {
namespace {

int Index(int n, LiftedVar v) { return lifted_index(n, v); }

std::set<std::string> Labels(const SparsityGraph& g, const std::vector<int>& vs) {
  std::set<std::string> out;
  for (int v : vs) out.insert(g.vertices()[v].label());
  return out;
}

bool Contains(const std::vector<int>& sorted, int v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

TEST(LiftedVarTest, IndexBijection) {
  for (int n = 1; n <= 6; ++n) {
    for (int idx = 0; idx < n * 4; ++idx) EXPECT_EQ(lifted_index(n, lifted_var(n, idx)), idx);
  }
  EXPECT_EQ(lifted_index(5, LiftedVar::x(1)), 0);
  EXPECT_EQ(lifted_index(5, LiftedVar::t(1, 1)), 5);
  EXPECT_EQ(lifted_index(5, LiftedVar::t(2, 1)), 10);
  EXPECT_EQ(LiftedVar::t(2, 3).label(), "t_2_3");
  EXPECT_EQ(LiftedVar::x(4).label(), "x_4");
}

TEST(LrGraphTest, TwoByFive) {
  const SparsityGraph g = build_lr_graph(2, 5);
  EXPECT_EQ(g.num_vertices(), 15);
  for (int l = 1; l <= 2; ++l) {
    EXPECT_TRUE(g.has_edge(Index(5, LiftedVar::t(l, 1)), Index(5, LiftedVar::x(1))));
    for (int i = 2; i <= 5; ++i) {
      const int t = Index(5, LiftedVar::t(l, i));
      EXPECT_TRUE(g.has_edge(t, Index(5, LiftedVar::t(l, i - 1))));
      EXPECT_TRUE(g.has_edge(t, Index(5, LiftedVar::x(i))));
      EXPECT_TRUE(g.has_edge(Index(5, LiftedVar::t(l, i - 1)), Index(5, LiftedVar::x(i))));
    }
  }
  // r chains of length n-1, r spokes at i=1, 2r(n-1) spokes beyond.
  EXPECT_EQ(g.num_edges(), 2u * 4 + 2 + 2u * 2 * 4);
  EXPECT_FALSE(g.has_edge(Index(5, LiftedVar::t(1, 3)), Index(5, LiftedVar::t(2, 3))));
  EXPECT_FALSE(g.has_edge(Index(5, LiftedVar::x(1)), Index(5, LiftedVar::x(2))));
}

TEST(LrGraphTest, SmallCases) {
  const SparsityGraph g = build_lr_graph(1, 1);
  EXPECT_EQ(g.num_vertices(), 2);
  EXPECT_EQ(g.num_edges(), 1u);
  const SparsityGraph h = build_lr_graph(3, 4);
  EXPECT_EQ(h.num_vertices(), 16);
  for (int i = 2; i <= 4; ++i) EXPECT_EQ(h.neighbors(Index(4, LiftedVar::x(i))).size(), 6u);
  EXPECT_EQ(h.neighbors(Index(4, LiftedVar::x(1))).size(), 3u);
}

TEST(PeoOrderTest, ColumnMajorBranch) {
  const SparsityGraph g = build_lr_graph(2, 5);
  const std::vector<int> order = peo_order(2, 5);
  ASSERT_EQ(order.size(), 15u);
  const std::vector<std::string> expect{"t_1_5", "t_2_5", "x_5", "t_1_4", "t_2_4", "x_4"};
  for (std::size_t j = 0; j < expect.size(); ++j) {
    EXPECT_EQ(g.vertices()[order[j]].label(), expect[j]);
  }
  EXPECT_EQ(g.vertices()[order.back()].label(), "x_1");
}

TEST(PeoOrderTest, RowMajorBranch) {
  const SparsityGraph g = build_lr_graph(4, 2);
  const std::vector<int> order = peo_order(4, 2);
  ASSERT_EQ(order.size(), 10u);
  EXPECT_EQ(g.vertices()[order[0]].label(), "t_1_2");
  EXPECT_EQ(g.vertices()[order[1]].label(), "t_1_1");
  EXPECT_EQ(g.vertices()[order[2]].label(), "t_2_2");
  EXPECT_EQ(g.vertices()[order[8]].kind, LiftedVar::Kind::X);
  EXPECT_EQ(g.vertices()[order[9]].kind, LiftedVar::Kind::X);
  const std::vector<int> one = peo_order(1, 1);
  EXPECT_EQ(build_lr_graph(1, 1).vertices()[one[0]].label(), "t_1_1");
}

TEST(ChordalExtendTest, AppendixFill) {
  const SparsityGraph g = build_lr_graph(2, 5);
  const std::vector<int> order = peo_order(2, 5);
  const SparsityGraph c = chordal_extend(g, order);
  EXPECT_TRUE(c.has_edge(Index(5, LiftedVar::t(1, 4)), Index(5, LiftedVar::t(2, 4))));
  EXPECT_FALSE(g.has_edge(Index(5, LiftedVar::t(1, 4)), Index(5, LiftedVar::t(2, 4))));
  // Eliminating again adds nothing.
  EXPECT_EQ(chordal_extend(c, order).num_edges(), c.num_edges());
  for (const auto& e : g.edges()) EXPECT_TRUE(c.has_edge(e.first, e.second));
}

TEST(ChordalExtendTest, TriangleHasNoFill) {
  const std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {0, 2}};
  const SparsityGraph g = SparsityGraph::from_edges(3, edges);
  for (const std::vector<int>& order :
       {std::vector<int>{0, 1, 2}, std::vector<int>{2, 0, 1}, std::vector<int>{1, 2, 0}}) {
    EXPECT_EQ(chordal_extend(g, order).num_edges(), 3u);
  }
  EXPECT_THROW(chordal_extend(g, std::vector<int>{0, 1}), InvalidInput);
}

TEST(CliqueTreeTest, TwoByFiveTree) {
  const SparsityGraph g = build_lr_graph(2, 5);
  const CliqueTree t = lr_clique_tree(2, 5);
  EXPECT_EQ(t.cliques.size(), 10u);
  EXPECT_EQ(t.max_clique_size(), 4);
  EXPECT_TRUE(verify_rip(t));
  std::vector<std::set<std::string>> bags;
  for (const auto& c : t.cliques) bags.push_back(Labels(g, c));
  const std::set<std::string> big{"x_3", "t_1_2", "t_2_2", "t_2_3"};
  EXPECT_NE(std::find(bags.begin(), bags.end(), big), bags.end());
  const std::set<std::string> first{"x_1", "t_1_1", "t_2_1"};
  EXPECT_NE(std::find(bags.begin(), bags.end(), first), bags.end());
  ASSERT_EQ(t.tree_edges.size(), 9u);
  for (std::size_t e = 0; e < t.tree_edges.size(); ++e) {
    const auto [a, b] = t.tree_edges[e];
    std::vector<int> inter;
    std::set_intersection(t.cliques[a].begin(), t.cliques[a].end(), t.cliques[b].begin(),
                          t.cliques[b].end(), std::back_inserter(inter));
    EXPECT_EQ(inter, t.separators[e]);
  }
}

TEST(CliqueTreeTest, SingleClique) {
  const std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {0, 2}};
  const SparsityGraph g = SparsityGraph::from_edges(3, edges);
  const std::vector<int> order{0, 1, 2};
  const CliqueTree t = clique_tree(g, order);
  EXPECT_EQ(t.cliques.size(), 1u);
  EXPECT_TRUE(t.tree_edges.empty());
  EXPECT_TRUE(verify_rip(t));
}

TEST(CliqueTreeTest, RejectsNonPeo) {
  // 4-cycle without a chord is not chordal under any order.
  const std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  const SparsityGraph g = SparsityGraph::from_edges(4, edges);
  EXPECT_THROW(clique_tree(g, std::vector<int>{0, 1, 2, 3}), StructuralError);
}

TEST(CliqueTreeTest, TwoByFourRowBranch) {
  const CliqueTree t = lr_clique_tree(4, 3);
  EXPECT_EQ(t.max_clique_size(), 4);
  EXPECT_TRUE(verify_rip(t));
}

TEST(VerifyRipTest, DisconnectedOccurrencesFail) {
  CliqueTree t;
  t.num_vertices = 3;
  t.cliques = {{0, 1}, {1, 2}};
  EXPECT_FALSE(verify_rip(t));
  t.tree_edges = {{0, 1}};
  t.separators = {{1}};
  EXPECT_TRUE(verify_rip(t));
  // Vertex 0 in bags 0 and 2, which are joined only through bag 1.
  t.cliques = {{0, 1}, {1, 2}, {0, 2}};
  t.tree_edges = {{0, 1}, {1, 2}};
  t.separators = {{1}, {2}};
  EXPECT_FALSE(verify_rip(t));
}

TEST(CliqueTreeTest, TreewidthAndInvariantsSweep) {
  for (int r = 1; r <= 8; ++r) {
    for (int n = 1; n <= 12; ++n) {
      SCOPED_TRACE("r=" + std::to_string(r) + " n=" + std::to_string(n));
      const SparsityGraph g = build_lr_graph(r, n);
      const CliqueTree t = lr_clique_tree(r, n);
      EXPECT_EQ(t.max_clique_size(), std::min(n, r + 1) + 1);
      EXPECT_TRUE(verify_rip(t));
      EXPECT_LE(static_cast<int>(t.cliques.size()), n * (r + 1));
      EXPECT_LE(t.max_separator_size(), std::min(n, r + 1));
      for (const auto& [a, b] : g.edges()) {
        bool covered = false;
        for (const auto& c : t.cliques) covered = covered || (Contains(c, a) && Contains(c, b));
        EXPECT_TRUE(covered);
      }
      for (std::size_t i = 0; i < t.cliques.size(); ++i) {
        for (std::size_t j = 0; j < t.cliques.size(); ++j) {
          if (i == j) continue;
          EXPECT_FALSE(std::includes(t.cliques[j].begin(), t.cliques[j].end(),
                                     t.cliques[i].begin(), t.cliques[i].end()));
        }
      }
    }
  }
}

TEST(MinDegreeTest, RandomGraphsGiveValidTrees) {
  PortableRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int nv = 4 + trial % 12;
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < nv; ++a) {
      for (int b = a + 1; b < nv; ++b) {
        if (rng.uniform() < 0.25) edges.emplace_back(a, b);
      }
    }
    const SparsityGraph g = SparsityGraph::from_edges(nv, edges);
    const std::vector<int> order = min_degree_order(g);
    const SparsityGraph c = chordal_extend(g, order);
    const CliqueTree t = clique_tree(c, order);
    EXPECT_TRUE(verify_rip(t));
  }
}

TEST(DotTest, ContainsLabels) {
  const SparsityGraph g = build_lr_graph(1, 2);
  const std::string dot = to_dot(g);
  EXPECT_NE(dot.find("graph"), std::string::npos);
  EXPECT_NE(dot.find("t_1_2"), std::string::npos);
  const std::string tree = to_dot(lr_clique_tree(1, 2), g);
  EXPECT_NE(tree.find("x_2"), std::string::npos);
}

}  // namespace
}  // namespace lrpop
