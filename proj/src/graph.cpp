// SPDX-License-Identifier: Apache-2.0

#include "mpst/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>

namespace mpst {

namespace {

// Peels rec-binder chains: every variable in the chain maps to the node index
// of the first concrete constructor underneath (guardedness makes one exist).

struct LocalBuilder {
  LocalGraph g;

  int build(const LocalPtr& t, std::map<std::string, int> env) {
    LocalPtr cur = t;
    std::vector<std::string> vars;
    while (cur->kind == LocalType::Kind::Rec) {
      vars.push_back(cur->var);
      cur = cur->body;
    }
    if (cur->kind == LocalType::Kind::Var) return env.at(cur->var);

    int idx = static_cast<int>(g.nodes.size());
    g.nodes.emplace_back();
    for (const auto& v : vars) env[v] = idx;

    if (cur->kind == LocalType::Kind::End) {
      g.nodes[idx].kind = LocalGraph::Node::Kind::End;
      return idx;
    }
    g.nodes[idx].kind = cur->kind == LocalType::Kind::Branch
                            ? LocalGraph::Node::Kind::Branch
                            : LocalGraph::Node::Kind::Select;
    g.nodes[idx].peer = cur->peer;
    for (const auto& b : cur->branches) {
      int tgt = build(b.cont, env);
      g.nodes[idx].edges.push_back(LocalGraph::Edge{b.label, b.sort, tgt});
    }
    return idx;
  }
};

struct GlobalBuilder {
  GlobalGraph g;

  int build(const GlobalPtr& t, std::map<std::string, int> env) {
    GlobalPtr cur = t;
    std::vector<std::string> vars;
    while (cur->kind == GlobalType::Kind::Rec) {
      vars.push_back(cur->var);
      cur = cur->body;
    }
    if (cur->kind == GlobalType::Kind::Var) return env.at(cur->var);

    int idx = static_cast<int>(g.nodes.size());
    g.nodes.emplace_back();
    for (const auto& v : vars) env[v] = idx;

    if (cur->kind == GlobalType::Kind::End) {
      g.nodes[idx].kind = GlobalGraph::Node::Kind::End;
      return idx;
    }
    g.nodes[idx].kind = cur->kind == GlobalType::Kind::Comm
                            ? GlobalGraph::Node::Kind::Comm
                            : GlobalGraph::Node::Kind::EnRoute;
    g.nodes[idx].from = cur->from;
    g.nodes[idx].to = cur->to;
    for (const auto& b : cur->branches) {
      int tgt = build(b.cont, env);
      g.nodes[idx].edges.push_back(GlobalGraph::Edge{b.label, b.sort, tgt});
    }
    return idx;
  }
};

// Generic partition refinement. `stat` gives the static part of a node's
// signature; edges are listed as (text, target) pairs.
struct RefinableNode {
  std::string stat;
  std::vector<std::pair<std::string, int>> edges;
};

std::vector<int> refine(const std::vector<RefinableNode>& nodes) {
  size_t n = nodes.size();
  std::vector<int> block(n, 0);
  {
    std::map<std::string, int> ids;
    for (size_t i = 0; i < n; ++i) {
      auto [it, _] = ids.try_emplace(nodes[i].stat, static_cast<int>(ids.size()));
      block[i] = it->second;
    }
  }
  for (;;) {
    std::map<std::string, int> ids;
    std::vector<int> next(n);
    for (size_t i = 0; i < n; ++i) {
      std::ostringstream sig;
      sig << block[i] << '|';
      std::vector<std::string> es;
      for (const auto& [txt, tgt] : nodes[i].edges)
        es.push_back(txt + "->" + std::to_string(block[tgt]));
      std::sort(es.begin(), es.end());
      for (const auto& e : es) sig << e << ';';
      auto [it, _] = ids.try_emplace(sig.str(), static_cast<int>(ids.size()));
      next[i] = it->second;
    }
    if (next == block) return block;
    block = std::move(next);
  }
}

std::vector<RefinableNode> refinable(const LocalGraph& g) {
  std::vector<RefinableNode> out(g.nodes.size());
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& nd = g.nodes[i];
    std::ostringstream s;
    switch (nd.kind) {
      case LocalGraph::Node::Kind::End: s << "end"; break;
      case LocalGraph::Node::Kind::Branch: s << "&" << nd.peer.name; break;
      case LocalGraph::Node::Kind::Select: s << "+" << nd.peer.name; break;
    }
    out[i].stat = s.str();
    for (const auto& e : nd.edges)
      out[i].edges.push_back({e.label.name + "(" + sort_name(e.sort) + ")", e.target});
  }
  return out;
}

std::vector<RefinableNode> refinable(const GlobalGraph& g) {
  std::vector<RefinableNode> out(g.nodes.size());
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& nd = g.nodes[i];
    std::ostringstream s;
    switch (nd.kind) {
      case GlobalGraph::Node::Kind::End: s << "end"; break;
      case GlobalGraph::Node::Kind::Comm: s << nd.from.name << "->" << nd.to.name; break;
      case GlobalGraph::Node::Kind::EnRoute: s << nd.from.name << "~>" << nd.to.name; break;
    }
    out[i].stat = s.str();
    for (const auto& e : nd.edges)
      out[i].edges.push_back({e.label.name + "(" + sort_name(e.sort) + ")", e.target});
  }
  return out;
}

template <typename Graph>
bool bisim_impl(const Graph& a, int ra, const Graph& b, int rb) {
  auto na = refinable(a);
  auto nb = refinable(b);
  std::vector<RefinableNode> all = na;
  int off = static_cast<int>(na.size());
  for (auto& nd : nb) {
    for (auto& e : nd.edges) e.second += off;
    all.push_back(nd);
  }
  auto block = refine(all);
  return block[ra] == block[off + rb];
}

template <typename Graph>
Graph minimize_impl(const Graph& g) {
  auto block = refine(refinable(g));
  // BFS over blocks from the root, edges in source order, for a canonical
  // node numbering.
  std::map<int, int> renum;
  std::vector<int> reps;
  std::deque<int> work;
  auto visit = [&](int node) {
    int blk = block[node];
    if (renum.count(blk)) return renum[blk];
    int id = static_cast<int>(reps.size());
    renum[blk] = id;
    reps.push_back(node);
    work.push_back(node);
    return id;
  };
  Graph out;
  out.root = 0;
  visit(g.root);
  while (!work.empty()) {
    int node = work.front();
    work.pop_front();
    typename Graph::Node nd = g.nodes[node];
    std::sort(nd.edges.begin(), nd.edges.end(),
              [](const auto& x, const auto& y) { return x.label < y.label; });
    for (auto& e : nd.edges) e.target = visit(e.target);
    out.nodes.push_back(std::move(nd));
  }
  return out;
}

}  // namespace

LocalGraph graph_of(const LocalPtr& t) {
  LocalBuilder b;
  b.g.root = 0;
  int r = b.build(t, {});
  b.g.root = r;
  return std::move(b.g);
}

GlobalGraph graph_of(const GlobalPtr& g) {
  GlobalBuilder b;
  b.g.root = 0;
  int r = b.build(g, {});
  b.g.root = r;
  return std::move(b.g);
}

bool bisimilar(const LocalGraph& a, int ra, const LocalGraph& b, int rb) {
  return bisim_impl(a, ra, b, rb);
}
bool bisimilar(const GlobalGraph& a, int ra, const GlobalGraph& b, int rb) {
  return bisim_impl(a, ra, b, rb);
}

LocalGraph minimize(const LocalGraph& g) { return minimize_impl(g); }
GlobalGraph minimize(const GlobalGraph& g) { return minimize_impl(g); }

// ---------------------------------------------------------------------------
// Graph -> AST

namespace {

struct LocalUnroller {
  const LocalGraph& g;
  std::vector<int> on_path;          // node -> 1 when on the DFS path
  std::vector<std::string> rec_name;  // assigned when a back-edge hits a node
  int fresh = 0;

  explicit LocalUnroller(const LocalGraph& gr)
      : g(gr), on_path(gr.nodes.size(), 0), rec_name(gr.nodes.size()) {}

  LocalPtr expand(int node) {
    if (on_path[node]) {
      if (rec_name[node].empty()) rec_name[node] = "t" + std::to_string(fresh++);
      return l_var(rec_name[node]);
    }
    on_path[node] = 1;
    std::string saved = rec_name[node];
    rec_name[node].clear();
    const auto& nd = g.nodes[node];
    LocalPtr out;
    if (nd.kind == LocalGraph::Node::Kind::End) {
      out = l_end();
    } else {
      std::vector<LBranch> bs;
      for (const auto& e : nd.edges)
        bs.push_back(LBranch{e.label, e.sort, expand(e.target)});
      out = nd.kind == LocalGraph::Node::Kind::Branch ? l_branch(nd.peer, std::move(bs))
                                                      : l_select(nd.peer, std::move(bs));
    }
    if (!rec_name[node].empty()) out = l_rec(rec_name[node], out);
    rec_name[node] = saved;
    on_path[node] = 0;
    return out;
  }
};

struct GlobalUnroller {
  const GlobalGraph& g;
  std::vector<int> on_path;
  std::vector<std::string> rec_name;
  int fresh = 0;

  explicit GlobalUnroller(const GlobalGraph& gr)
      : g(gr), on_path(gr.nodes.size(), 0), rec_name(gr.nodes.size()) {}

  GlobalPtr expand(int node) {
    if (on_path[node]) {
      if (rec_name[node].empty()) rec_name[node] = "t" + std::to_string(fresh++);
      return g_var(rec_name[node]);
    }
    on_path[node] = 1;
    std::string saved = rec_name[node];
    rec_name[node].clear();
    const auto& nd = g.nodes[node];
    GlobalPtr out;
    if (nd.kind == GlobalGraph::Node::Kind::End) {
      out = g_end();
    } else if (nd.kind == GlobalGraph::Node::Kind::EnRoute) {
      const auto& e = nd.edges[0];
      out = g_enroute(nd.from, nd.to, e.label, e.sort, expand(e.target));
    } else {
      std::vector<GBranch> bs;
      for (const auto& e : nd.edges)
        bs.push_back(GBranch{e.label, e.sort, expand(e.target)});
      out = g_comm(nd.from, nd.to, std::move(bs));
    }
    if (!rec_name[node].empty()) out = g_rec(rec_name[node], out);
    rec_name[node] = saved;
    on_path[node] = 0;
    return out;
  }
};

template <typename Graph>
std::string key_impl(const Graph& g, int root) {
  Graph rooted = g;
  rooted.root = root;
  Graph m = minimize_impl(rooted);
  auto rn = refinable(m);
  std::ostringstream out;
  out << m.root << '#';
  for (size_t i = 0; i < rn.size(); ++i) {
    out << i << ':' << rn[i].stat << '[';
    for (const auto& [txt, tgt] : rn[i].edges) out << txt << '>' << tgt << ',';
    out << ']';
  }
  return out.str();
}

}  // namespace

LocalPtr local_ast_of(const LocalGraph& g, int root) {
  LocalUnroller u(g);
  return u.expand(root);
}

GlobalPtr global_ast_of(const GlobalGraph& g, int root) {
  GlobalUnroller u(g);
  return u.expand(root);
}

std::string canonical_key(const LocalGraph& g, int root) { return key_impl(g, root); }
std::string canonical_key(const GlobalGraph& g, int root) { return key_impl(g, root); }

bool bisimilar(const LocalPtr& a, const LocalPtr& b) {
  return bisimilar(graph_of(a), graph_of(b));
}

bool bisimilar(const GlobalPtr& a, const GlobalPtr& b) {
  return bisimilar(graph_of(a), graph_of(b));
}

}  // namespace mpst
