#pragma once

#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lrpop {

/// Variable of the lifted problem: an original x_i or a partial product
/// t_{l,i}. Indices l and i are 1-based, matching the usual notation; l is 0
/// for x variables.
struct LiftedVar {
  enum class Kind { X, T };
  Kind kind = Kind::X;
  int l = 0;
  int i = 1;

  static LiftedVar x(int i) { return {Kind::X, 0, i}; }
  static LiftedVar t(int l, int i) { return {Kind::T, l, i}; }

  /// "x_i" or "t_l_i".
  std::string label() const;
  auto operator<=>(const LiftedVar&) const = default;
};

/// Canonical vertex numbering: x_1 < ... < x_n < t_{1,1} < ... < t_{r,n}
/// (row-major over t).
int lifted_index(int n, const LiftedVar& v);
LiftedVar lifted_var(int n, int index);

/// Undirected simple graph over a fixed vertex list.
class SparsityGraph {
 public:
  SparsityGraph() = default;
  explicit SparsityGraph(std::vector<LiftedVar> vertices);
  /// Generic graph on num_vertices vertices; labels default to x_1..x_N.
  static SparsityGraph from_edges(int num_vertices,
                                  std::span<const std::pair<int, int>> edges);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  const std::vector<LiftedVar>& vertices() const { return vertices_; }
  const std::set<int>& neighbors(int v) const { return adj_.at(v); }
  /// Edges as (a, b) with a < b, sorted.
  std::vector<std::pair<int, int>> edges() const;
  std::size_t num_edges() const;

  void add_edge(int a, int b);
  bool has_edge(int a, int b) const;

 private:
  std::vector<LiftedVar> vertices_;
  std::vector<std::set<int>> adj_;
};

/// Tree decomposition over maximal cliques of a chordal graph. Clique vertex
/// lists are sorted by vertex index; tree edges are (a, b) with a < b and
/// separators[e] = cliques[a] ∩ cliques[b] for tree edge e.
struct CliqueTree {
  int num_vertices = 0;
  std::vector<std::vector<int>> cliques;
  std::vector<std::pair<int, int>> tree_edges;
  std::vector<std::vector<int>> separators;

  int max_clique_size() const;
  int max_separator_size() const;
};

/// Correlative sparsity graph of the lifted problem: t_{l,1} - x_1, and the
/// triangle {t_{l,i}, t_{l,i-1}, x_i} for i >= 2.
SparsityGraph build_lr_graph(int r, int n);

/// Explicit elimination ordering achieving width min(n, r+1). Column-major
/// (t_{1,n}, ..., t_{r,n}, x_n, t_{1,n-1}, ...) when r + 1 <= n, otherwise
/// row by row right to left with the x variables last.
std::vector<int> peo_order(int r, int n);

/// Greedy minimum-degree elimination ordering. Heuristic; used for graphs
/// that are not of the lifted-CP shape.
std::vector<int> min_degree_order(const SparsityGraph& g);

/// Elimination game: adds the fill edges produced by eliminating vertices in
/// the given order. The result is chordal with `order` as a PEO.
SparsityGraph chordal_extend(const SparsityGraph& g, std::span<const int> order);

/// Maximal cliques of a chordal graph read off its PEO, joined by a maximum
/// separator-weight spanning tree. Throws StructuralError if `order` is not a
/// perfect elimination ordering of `chordal`.
CliqueTree clique_tree(const SparsityGraph& chordal, std::span<const int> order);

/// True iff tree_edges form a tree over the cliques and, for every vertex,
/// the cliques containing it induce a connected subtree.
bool verify_rip(const CliqueTree& t);

/// build_lr_graph -> peo_order -> chordal_extend -> clique_tree.
CliqueTree lr_clique_tree(int r, int n);

std::string to_dot(const SparsityGraph& g);
std::string to_dot(const CliqueTree& t, const SparsityGraph& g);

}  // namespace lrpop
