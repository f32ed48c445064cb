#include "lrpop/sparsity.h"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <tuple>

#include "lrpop/errors.h"

namespace lrpop {

std::string LiftedVar::label() const {
  if (kind == Kind::X) return "x_" + std::to_string(i);
  return "t_" + std::to_string(l) + "_" + std::to_string(i);
}

int lifted_index(int n, const LiftedVar& v) {
  if (v.kind == LiftedVar::Kind::X) return v.i - 1;
  return n + (v.l - 1) * n + (v.i - 1);
}

LiftedVar lifted_var(int n, int index) {
  if (index < n) return LiftedVar::x(index + 1);
  const int k = index - n;
  return LiftedVar::t(k / n + 1, k % n + 1);
}

SparsityGraph::SparsityGraph(std::vector<LiftedVar> vertices)
    : vertices_(std::move(vertices)), adj_(vertices_.size()) {}

SparsityGraph SparsityGraph::from_edges(
    int num_vertices, std::span<const std::pair<int, int>> edges) {
  std::vector<LiftedVar> vertices;
  for (int v = 0; v < num_vertices; ++v) vertices.push_back(LiftedVar::x(v + 1));
  SparsityGraph g(std::move(vertices));
  for (const auto& [a, b] : edges) g.add_edge(a, b);
  return g;
}

std::vector<std::pair<int, int>> SparsityGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < num_vertices(); ++a) {
    for (int b : adj_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

std::size_t SparsityGraph::num_edges() const {
  std::size_t twice = 0;
  for (const auto& s : adj_) twice += s.size();
  return twice / 2;
}

void SparsityGraph::add_edge(int a, int b) {
  if (a == b) throw InvalidInput("self-loops are not allowed");
  if (a < 0 || b < 0 || a >= num_vertices() || b >= num_vertices()) {
    throw InvalidInput("edge references a missing vertex");
  }
  adj_[a].insert(b);
  adj_[b].insert(a);
}

bool SparsityGraph::has_edge(int a, int b) const {
  return adj_.at(a).contains(b);
}

int CliqueTree::max_clique_size() const {
  std::size_t m = 0;
  for (const auto& c : cliques) m = std::max(m, c.size());
  return static_cast<int>(m);
}

int CliqueTree::max_separator_size() const {
  std::size_t m = 0;
  for (const auto& s : separators) m = std::max(m, s.size());
  return static_cast<int>(m);
}

SparsityGraph build_lr_graph(int r, int n) {
  if (r < 1 || n < 1) throw InvalidInput("build_lr_graph needs r, n >= 1");
  std::vector<LiftedVar> vertices;
  const int total = n * (r + 1);
  vertices.reserve(total);
  for (int v = 0; v < total; ++v) vertices.push_back(lifted_var(n, v));
  SparsityGraph g(std::move(vertices));
  for (int l = 1; l <= r; ++l) {
    g.add_edge(lifted_index(n, LiftedVar::t(l, 1)),
               lifted_index(n, LiftedVar::x(1)));
    for (int i = 2; i <= n; ++i) {
      const int t = lifted_index(n, LiftedVar::t(l, i));
      const int prev = lifted_index(n, LiftedVar::t(l, i - 1));
      const int x = lifted_index(n, LiftedVar::x(i));
      g.add_edge(t, prev);
      g.add_edge(t, x);
      g.add_edge(prev, x);
    }
  }
  return g;
}

std::vector<int> peo_order(int r, int n) {
  if (r < 1 || n < 1) throw InvalidInput("peo_order needs r, n >= 1");
  std::vector<int> order;
  order.reserve(n * (r + 1));
  if (r + 1 <= n) {
    for (int i = n; i >= 1; --i) {
      for (int l = 1; l <= r; ++l) order.push_back(lifted_index(n, LiftedVar::t(l, i)));
      order.push_back(lifted_index(n, LiftedVar::x(i)));
    }
  } else {
    for (int l = 1; l <= r; ++l) {
      for (int i = n; i >= 1; --i) order.push_back(lifted_index(n, LiftedVar::t(l, i)));
    }
    for (int i = n; i >= 1; --i) order.push_back(lifted_index(n, LiftedVar::x(i)));
  }
  return order;
}

std::vector<int> min_degree_order(const SparsityGraph& g) {
  const int nv = g.num_vertices();
  std::vector<std::set<int>> adj(nv);
  for (int v = 0; v < nv; ++v) adj[v] = g.neighbors(v);
  std::vector<bool> gone(nv, false);
  std::vector<int> order;
  order.reserve(nv);
  for (int step = 0; step < nv; ++step) {
    int best = -1;
    for (int v = 0; v < nv; ++v) {
      if (gone[v]) continue;
      if (best < 0 || adj[v].size() < adj[best].size()) best = v;
    }
    order.push_back(best);
    gone[best] = true;
    std::vector<int> nb(adj[best].begin(), adj[best].end());
    for (int a : nb) {
      adj[a].erase(best);
      for (int b : nb) {
        if (a != b) adj[a].insert(b);
      }
    }
  }
  return order;
}

namespace {

std::vector<int> positions_of(std::span<const int> order, int num_vertices) {
  if (static_cast<int>(order.size()) != num_vertices) {
    throw InvalidInput("elimination order is not a permutation of the vertices");
  }
  std::vector<int> pos(num_vertices, -1);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int v = order[k];
    if (v < 0 || v >= num_vertices || pos[v] >= 0) {
      throw InvalidInput("elimination order is not a permutation of the vertices");
    }
    pos[v] = static_cast<int>(k);
  }
  return pos;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

std::vector<int> intersect_sorted(const std::vector<int>& a,
                                  const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace

SparsityGraph chordal_extend(const SparsityGraph& g, std::span<const int> order) {
  const auto pos = positions_of(order, g.num_vertices());
  SparsityGraph out = g;
  for (int v : order) {
    std::vector<int> later;
    for (int u : out.neighbors(v)) {
      if (pos[u] > pos[v]) later.push_back(u);
    }
    for (std::size_t a = 0; a < later.size(); ++a) {
      for (std::size_t b = a + 1; b < later.size(); ++b) {
        out.add_edge(later[a], later[b]);
      }
    }
  }
  return out;
}

CliqueTree clique_tree(const SparsityGraph& chordal, std::span<const int> order) {
  const int nv = chordal.num_vertices();
  const auto pos = positions_of(order, nv);

  std::vector<std::vector<int>> later(nv);
  std::vector<int> parent(nv, -1);
  for (int v = 0; v < nv; ++v) {
    for (int u : chordal.neighbors(v)) {
      if (pos[u] > pos[v]) later[v].push_back(u);
    }
    const auto& lv = later[v];
    for (std::size_t a = 0; a < lv.size(); ++a) {
      for (std::size_t b = a + 1; b < lv.size(); ++b) {
        if (!chordal.has_edge(lv[a], lv[b])) {
          throw StructuralError("order is not a perfect elimination ordering: "
                                "later neighbors of vertex " +
                                std::to_string(v) + " are not a clique");
        }
      }
    }
    for (int u : lv) {
      if (parent[v] < 0 || pos[u] < pos[parent[v]]) parent[v] = u;
    }
  }

  // {v} ∪ later(v) is non-maximal iff some child u with parent(u) = v has
  // exactly one more later neighbor.
  std::vector<bool> maximal(nv, true);
  for (int u = 0; u < nv; ++u) {
    const int v = parent[u];
    if (v >= 0 && later[u].size() == later[v].size() + 1) maximal[v] = false;
  }

  CliqueTree tree;
  tree.num_vertices = nv;
  for (int v : order) {
    if (!maximal[v]) continue;
    std::vector<int> c = later[v];
    c.push_back(v);
    std::sort(c.begin(), c.end());
    tree.cliques.push_back(std::move(c));
  }

  const int nc = static_cast<int>(tree.cliques.size());
  std::vector<std::vector<int>> cliques_of(nv);
  for (int a = 0; a < nc; ++a) {
    for (int v : tree.cliques[a]) cliques_of[v].push_back(a);
  }
  std::set<std::pair<int, int>> candidate_pairs;
  for (const auto& list : cliques_of) {
    for (std::size_t p = 0; p < list.size(); ++p) {
      for (std::size_t q = p + 1; q < list.size(); ++q) {
        candidate_pairs.emplace(list[p], list[q]);
      }
    }
  }
  std::vector<std::tuple<int, int, int>> weighted;
  weighted.reserve(candidate_pairs.size());
  for (const auto& [a, b] : candidate_pairs) {
    const int w = static_cast<int>(
        intersect_sorted(tree.cliques[a], tree.cliques[b]).size());
    weighted.emplace_back(-w, a, b);
  }
  std::sort(weighted.begin(), weighted.end());
  DisjointSets sets(nc);
  for (const auto& [neg_w, a, b] : weighted) {
    if (sets.unite(a, b)) tree.tree_edges.emplace_back(a, b);
  }
  // Disconnected input graphs give a forest; join it with empty separators.
  for (int a = 1; a < nc; ++a) {
    if (sets.unite(0, a)) tree.tree_edges.emplace_back(0, a);
  }
  std::sort(tree.tree_edges.begin(), tree.tree_edges.end());
  for (const auto& [a, b] : tree.tree_edges) {
    tree.separators.push_back(intersect_sorted(tree.cliques[a], tree.cliques[b]));
  }
  return tree;
}

bool verify_rip(const CliqueTree& t) {
  const int nc = static_cast<int>(t.cliques.size());
  if (nc == 0) return t.tree_edges.empty();
  if (static_cast<int>(t.tree_edges.size()) != nc - 1) return false;
  std::vector<std::vector<int>> adj(nc);
  DisjointSets sets(nc);
  for (const auto& [a, b] : t.tree_edges) {
    if (a < 0 || b < 0 || a >= nc || b >= nc) return false;
    if (!sets.unite(a, b)) return false;  // cycle
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  int nv = t.num_vertices;
  for (const auto& c : t.cliques) {
    for (int v : c) nv = std::max(nv, v + 1);
  }
  std::vector<std::vector<int>> cliques_of(nv);
  for (int a = 0; a < nc; ++a) {
    for (int v : t.cliques[a]) cliques_of[v].push_back(a);
  }
  std::vector<int> mark(nc, -1);
  for (int v = 0; v < nv; ++v) {
    const auto& holders = cliques_of[v];
    if (holders.size() <= 1) continue;
    for (int a : holders) mark[a] = v;
    // Walk the tree restricted to bags containing v.
    std::vector<int> stack = {holders.front()};
    std::vector<bool> seen(nc, false);
    seen[holders.front()] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : adj[a]) {
        if (!seen[b] && mark[b] == v) {
          seen[b] = true;
          ++reached;
          stack.push_back(b);
        }
      }
    }
    if (reached != holders.size()) return false;
  }
  return true;
}

CliqueTree lr_clique_tree(int r, int n) {
  const SparsityGraph g = build_lr_graph(r, n);
  const auto order = peo_order(r, n);
  return clique_tree(chordal_extend(g, order), order);
}

std::string to_dot(const SparsityGraph& g) {
  std::ostringstream os;
  os << "graph G {\n";
  for (const auto& v : g.vertices()) os << "  \"" << v.label() << "\";\n";
  for (const auto& [a, b] : g.edges()) {
    os << "  \"" << g.vertices()[a].label() << "\" -- \""
       << g.vertices()[b].label() << "\";\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_dot(const CliqueTree& t, const SparsityGraph& g) {
  std::ostringstream os;
  os << "graph T {\n  node [shape=box];\n";
  for (std::size_t a = 0; a < t.cliques.size(); ++a) {
    os << "  c" << a << " [label=\"{";
    for (std::size_t k = 0; k < t.cliques[a].size(); ++k) {
      if (k) os << ", ";
      os << g.vertices().at(t.cliques[a][k]).label();
    }
    os << "}\"];\n";
  }
  for (const auto& [a, b] : t.tree_edges) os << "  c" << a << " -- c" << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace lrpop
