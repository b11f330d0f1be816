// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_GRAPH_HPP_
#define MPST_GRAPH_HPP_

#include <vector>

#include "mpst/core.hpp"

namespace mpst {

// Finite cyclic-graph form of a recursive type. Recursion binders are
// resolved into back-edges; no Rec/Var nodes remain. Equality of the
// represented infinite trees is bisimilarity.

struct LocalGraph {
  struct Edge {
    Label label;
    Sort sort = Sort::Unit;
    int target = -1;
  };
  struct Node {
    enum class Kind { End, Branch, Select };
    Kind kind = Kind::End;
    Role peer;
    std::vector<Edge> edges;
  };

  std::vector<Node> nodes;
  int root = 0;
};

struct GlobalGraph {
  struct Edge {
    Label label;
    Sort sort = Sort::Unit;
    int target = -1;
  };
  struct Node {
    enum class Kind { End, Comm, EnRoute };
    Kind kind = Kind::End;
    Role from, to;
    std::vector<Edge> edges;  // Comm: choice; EnRoute: single edge
  };

  std::vector<Node> nodes;
  int root = 0;
};

// Deterministic construction (DFS pre-order) from a closed, guarded AST.
LocalGraph graph_of(const LocalPtr& t);
GlobalGraph graph_of(const GlobalPtr& g);

bool bisimilar(const LocalGraph& a, int ra, const LocalGraph& b, int rb);
bool bisimilar(const GlobalGraph& a, int ra, const GlobalGraph& b, int rb);
inline bool bisimilar(const LocalGraph& a, const LocalGraph& b) {
  return bisimilar(a, a.root, b, b.root);
}
inline bool bisimilar(const GlobalGraph& a, const GlobalGraph& b) {
  return bisimilar(a, a.root, b, b.root);
}

// Bisimulation quotient with only root-reachable nodes, in canonical order.
LocalGraph minimize(const LocalGraph& g);
GlobalGraph minimize(const GlobalGraph& g);

// Reintroduces recursion binders at back-edge targets.
LocalPtr local_ast_of(const LocalGraph& g, int root);
inline LocalPtr local_ast_of(const LocalGraph& g) { return local_ast_of(g, g.root); }
GlobalPtr global_ast_of(const GlobalGraph& g, int root);
inline GlobalPtr global_ast_of(const GlobalGraph& g) { return global_ast_of(g, g.root); }

// Stable textual key of the tree rooted at a node (minimized canonical form);
// equal keys iff bisimilar. Useful for deduplication.
std::string canonical_key(const LocalGraph& g, int root);
std::string canonical_key(const GlobalGraph& g, int root);

bool bisimilar(const LocalPtr& a, const LocalPtr& b);
bool bisimilar(const GlobalPtr& a, const GlobalPtr& b);

}  // namespace mpst

#endif  // MPST_GRAPH_HPP_
