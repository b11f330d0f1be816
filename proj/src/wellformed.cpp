// SPDX-License-Identifier: Apache-2.0

#include "mpst/wellformed.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace mpst {

namespace {

// Depth over the graph form. A node's value is absent when a path from it can
// avoid the target forever (a cycle) or terminate without meeting it.
struct DepthSolver {
  const GlobalGraph& g;
  // -1: unknown, -2: in progress (treated as undefined when revisited)
  std::vector<int> memo;
  std::vector<bool> undef;

  DepthSolver(const GlobalGraph& gr) : g(gr), memo(gr.nodes.size(), -1), undef(gr.nodes.size(), false) {}

  // hit(node) == true: the node itself satisfies the target at cost 1.
  template <typename Hit>
  DepthResult solve(int node, const Hit& hit) {
    if (undef[node]) return std::nullopt;
    if (memo[node] >= 0) return memo[node];
    if (memo[node] == -2) return std::nullopt;  // cycle avoiding the target
    const auto& nd = g.nodes[node];
    if (hit(nd)) {
      memo[node] = 1;
      return 1;
    }
    if (nd.kind == GlobalGraph::Node::Kind::End) {
      undef[node] = true;
      return std::nullopt;
    }
    memo[node] = -2;
    int best = 0;
    bool ok = true;
    for (const auto& e : nd.edges) {
      auto d = solve(e.target, hit);
      if (!d) {
        ok = false;
        break;
      }
      best = std::max(best, *d);
    }
    if (!ok) {
      memo[node] = -1;
      undef[node] = true;
      return std::nullopt;
    }
    memo[node] = 1 + best;
    return memo[node];
  }
};

std::set<Role> subtree_aroles(const GlobalGraph& g, int node) {
  std::set<Role> out;
  std::vector<bool> seen(g.nodes.size(), false);
  std::deque<int> work{node};
  seen[node] = true;
  while (!work.empty()) {
    int n = work.front();
    work.pop_front();
    const auto& nd = g.nodes[n];
    if (nd.kind == GlobalGraph::Node::Kind::Comm) {
      out.insert(nd.from);
      out.insert(nd.to);
    } else if (nd.kind == GlobalGraph::Node::Kind::EnRoute) {
      out.insert(nd.to);
    }
    for (const auto& e : nd.edges)
      if (!seen[e.target]) {
        seen[e.target] = true;
        work.push_back(e.target);
      }
  }
  return out;
}

void free_vars(const GlobalPtr& g, std::set<std::string>& bound,
               std::set<std::string>& out) {
  switch (g->kind) {
    case GlobalType::Kind::End:
      return;
    case GlobalType::Kind::Var:
      if (!bound.count(g->var)) out.insert(g->var);
      return;
    case GlobalType::Kind::Rec: {
      bool fresh = bound.insert(g->var).second;
      free_vars(g->body, bound, out);
      if (fresh) bound.erase(g->var);
      return;
    }
    case GlobalType::Kind::Comm:
    case GlobalType::Kind::EnRoute:
      for (const auto& b : g->branches) free_vars(b.cont, bound, out);
      return;
  }
}

bool has_free_var(const GlobalPtr& g, const std::string& var) {
  std::set<std::string> bound, fv;
  free_vars(g, bound, fv);
  return fv.count(var) > 0;
}

std::optional<int> mcount_rec(const GlobalPtr& g, const Role& p, const Role& q) {
  switch (g->kind) {
    case GlobalType::Kind::End:
    case GlobalType::Kind::Var:
      return 0;
    case GlobalType::Kind::Rec: {
      auto inner = mcount_rec(g->body, p, q);
      if (!inner) return std::nullopt;
      if (!has_free_var(g->body, g->var) || *inner == 0) return inner;
      return std::nullopt;
    }
    case GlobalType::Kind::Comm: {
      std::optional<int> common;
      bool agree = true;
      for (const auto& b : g->branches) {
        auto c = mcount_rec(b.cont, p, q);
        if (!c) return std::nullopt;
        if (!common)
          common = c;
        else if (*common != *c)
          agree = false;
      }
      if (g->from == p && g->to == q) {
        // A pending p->q transmission may not be preceded by this one.
        for (const auto& b : g->branches)
          if (role_sets(b.cont).mroles.count({p, q})) return std::nullopt;
        return 0;
      }
      if (!agree) return std::nullopt;
      return common;
    }
    case GlobalType::Kind::EnRoute: {
      auto c = mcount_rec(g->branches[0].cont, p, q);
      if (!c) return std::nullopt;
      if (g->from == p && g->to == q) return *c + 1;
      return c;
    }
  }
  return std::nullopt;
}

// Branch-label path from the root to each node, for failure witnesses.
std::vector<std::vector<Label>> witness_paths(const GlobalGraph& g) {
  std::vector<std::vector<Label>> path(g.nodes.size());
  std::vector<bool> seen(g.nodes.size(), false);
  std::deque<int> work{g.root};
  seen[g.root] = true;
  while (!work.empty()) {
    int n = work.front();
    work.pop_front();
    for (const auto& e : g.nodes[n].edges)
      if (!seen[e.target]) {
        seen[e.target] = true;
        path[e.target] = path[n];
        path[e.target].push_back(e.label);
        work.push_back(e.target);
      }
  }
  return path;
}

// All AST subterm suffixes (each itself a type, free variables read as 0 by
// the counting function).
void subterms(const GlobalPtr& g, std::vector<GlobalPtr>& out) {
  out.push_back(g);
  switch (g->kind) {
    case GlobalType::Kind::End:
    case GlobalType::Kind::Var:
      return;
    case GlobalType::Kind::Rec:
      subterms(g->body, out);
      return;
    case GlobalType::Kind::Comm:
    case GlobalType::Kind::EnRoute:
      for (const auto& b : g->branches) subterms(b.cont, out);
      return;
  }
}

}  // namespace

DepthResult depth(const GlobalPtr& g, const Role& r) {
  GlobalGraph gr = graph_of(g);
  DepthSolver solver(gr);
  return solver.solve(gr.root, [&](const GlobalGraph::Node& nd) {
    if (nd.kind == GlobalGraph::Node::Kind::Comm) return nd.from == r || nd.to == r;
    if (nd.kind == GlobalGraph::Node::Kind::EnRoute) return nd.to == r;
    return false;
  });
}

DepthResult mdepth(const GlobalPtr& g, const Role& p, const Role& q) {
  GlobalGraph gr = graph_of(g);
  DepthSolver solver(gr);
  return solver.solve(gr.root, [&](const GlobalGraph::Node& nd) {
    return nd.kind == GlobalGraph::Node::Kind::EnRoute && nd.from == p && nd.to == q;
  });
}

std::optional<int> mcount(const GlobalPtr& g, const Role& p, const Role& q) {
  return mcount_rec(g, p, q);
}

BalanceReport check_balanced_plus(const GlobalPtr& g) {
  BalanceReport report;
  report.balanced = true;
  GlobalGraph gr = graph_of(g);
  auto paths = witness_paths(gr);

  // Balancedness on the graph closure: at every node, every role with a
  // pending action in the subtree has a defined depth.
  for (int n = 0; n < static_cast<int>(gr.nodes.size()); ++n) {
    for (const Role& r : subtree_aroles(gr, n)) {
      DepthSolver solver(gr);
      auto d = solver.solve(n, [&](const GlobalGraph::Node& nd) {
        if (nd.kind == GlobalGraph::Node::Kind::Comm)
          return nd.from == r || nd.to == r;
        if (nd.kind == GlobalGraph::Node::Kind::EnRoute) return nd.to == r;
        return false;
      });
      if (!d) {
        report.balanced = false;
        report.failures.push_back(BalanceFailure{
            r.name, "depth undefined: a path avoids the role", paths[n]});
      }
    }
  }

  // En-route counting on the syntactic closure (all subterm suffixes of the
  // type and of its one-step unfolding).
  bool counts_ok = true;
  std::vector<GlobalPtr> terms;
  subterms(g, terms);
  subterms(unfold_global(g), terms);
  auto all_roles = role_sets(g).roles;
  for (size_t i = 0; i < terms.size(); ++i) {
    for (const Role& p : all_roles) {
      for (const Role& q : all_roles) {
        if (p == q) continue;
        if (!mcount(terms[i], p, q)) {
          counts_ok = false;
          report.failures.push_back(BalanceFailure{
              p.name + "~>" + q.name,
              "en-route count undefined at a reachable subterm", {}});
        }
      }
    }
  }
  report.balanced_plus = report.balanced && counts_ok;
  return report;
}

}  // namespace mpst
