// SPDX-License-Identifier: Apache-2.0

#include "mpst/projection.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "mpst/wellformed.hpp"

namespace mpst {

namespace {

// ---------------------------------------------------------------------------
// Full coinductive merge on graphs. The merge of a node set is computed as a
// greatest fixpoint: a state is a set of nodes, its head is forced by the
// merge rules, cycles resolve to back-edges.

struct MergeBuilder {
  const LocalGraph& g;
  LocalGraph out;
  std::map<std::vector<int>, int> memo;
  std::string failure;

  explicit MergeBuilder(const LocalGraph& gr) : g(gr) {}

  static std::vector<int> key_of(std::vector<int> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
  }

  // Returns the output node for the merge of `nodes`, or -1 on failure.
  int build(std::vector<int> nodes) {
    auto key = key_of(std::move(nodes));
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    int id = static_cast<int>(out.nodes.size());
    out.nodes.emplace_back();
    memo[key] = id;

    auto kind = g.nodes[key[0]].kind;
    for (int n : key) {
      if (g.nodes[n].kind != kind) {
        failure = "merge of input, output or terminated heads";
        return -1;
      }
    }
    if (kind == LocalGraph::Node::Kind::End) {
      out.nodes[id].kind = LocalGraph::Node::Kind::End;
      return id;
    }
    Role peer = g.nodes[key[0]].peer;
    for (int n : key) {
      if (g.nodes[n].peer != peer) {
        failure = "merge across different peers";
        return -1;
      }
    }
    if (kind == LocalGraph::Node::Kind::Select) {
      // Identical label/sort sets required; continuations merge per label.
      std::map<Label, Sort> labels;
      for (const auto& e : g.nodes[key[0]].edges) labels[e.label] = e.sort;
      for (int n : key) {
        std::map<Label, Sort> other;
        for (const auto& e : g.nodes[n].edges) other[e.label] = e.sort;
        if (other != labels) {
          failure = "selections with different label or payload sets";
          return -1;
        }
      }
      out.nodes[id].kind = LocalGraph::Node::Kind::Select;
      out.nodes[id].peer = peer;
      for (const auto& [lbl, sort] : labels) {
        std::vector<int> succ;
        for (int n : key)
          for (const auto& e : g.nodes[n].edges)
            if (e.label == lbl) succ.push_back(e.target);
        int child = build(std::move(succ));
        if (child < 0) return -1;
        out.nodes[id].edges.push_back(LocalGraph::Edge{lbl, sort, child});
      }
      return id;
    }
    // Branchings: union of labels, sorts must agree on shared labels.
    std::map<Label, Sort> labels;
    for (int n : key) {
      for (const auto& e : g.nodes[n].edges) {
        auto [it, fresh] = labels.try_emplace(e.label, e.sort);
        if (!fresh && it->second != e.sort) {
          failure = "branchings with conflicting payload sorts";
          return -1;
        }
      }
    }
    out.nodes[id].kind = LocalGraph::Node::Kind::Branch;
    out.nodes[id].peer = peer;
    for (const auto& [lbl, sort] : labels) {
      std::vector<int> succ;
      for (int n : key)
        for (const auto& e : g.nodes[n].edges)
          if (e.label == lbl) succ.push_back(e.target);
      int child = build(std::move(succ));
      if (child < 0) return -1;
      out.nodes[id].edges.push_back(LocalGraph::Edge{lbl, sort, child});
    }
    return id;
  }
};

// One shared graph holding every input type, so node ids can mix.
LocalGraph combined_graph(const std::vector<LocalPtr>& ts, std::vector<int>& roots) {
  LocalGraph all;
  for (const auto& t : ts) {
    LocalGraph g = graph_of(t);
    int off = static_cast<int>(all.nodes.size());
    for (auto nd : g.nodes) {
      for (auto& e : nd.edges) e.target += off;
      all.nodes.push_back(std::move(nd));
    }
    roots.push_back(off + g.root);
  }
  return all;
}

std::optional<LocalGraph> merge_graph(const LocalGraph& g, const std::vector<int>& roots,
                                      std::string* why) {
  MergeBuilder mb(g);
  int root = mb.build(roots);
  if (root < 0) {
    if (why) *why = mb.failure;
    return std::nullopt;
  }
  mb.out.root = root;
  return minimize(mb.out);
}

// ---------------------------------------------------------------------------
// Projection

struct Projector {
  const GlobalGraph& g;
  Role role;
  std::vector<std::set<Role>> aroles;  // per node, over its subtree
  LocalGraph out;
  std::map<std::vector<int>, int> memo;
  std::string failure;

  Projector(const GlobalGraph& gr, Role r) : g(gr), role(std::move(r)) {
    aroles.resize(g.nodes.size());
    for (size_t n = 0; n < g.nodes.size(); ++n) aroles[n] = subtree_aroles(n);
  }

  std::set<Role> subtree_aroles(int node) const {
    std::set<Role> res;
    std::vector<bool> seen(g.nodes.size(), false);
    std::deque<int> work{node};
    seen[node] = true;
    while (!work.empty()) {
      int n = work.front();
      work.pop_front();
      const auto& nd = g.nodes[n];
      if (nd.kind == GlobalGraph::Node::Kind::Comm) {
        res.insert(nd.from);
        res.insert(nd.to);
      } else if (nd.kind == GlobalGraph::Node::Kind::EnRoute) {
        res.insert(nd.to);
      }
      for (const auto& e : nd.edges)
        if (!seen[e.target]) {
          seen[e.target] = true;
          work.push_back(e.target);
        }
    }
    return res;
  }

  // Closes a node set under the skipping rules: communications not involving
  // the role expand into their continuations, en-route transmissions the role
  // does not receive are skipped. Nodes whose subtree gives the role nothing
  // to do stay as terminated members.
  bool close(int node, std::set<int>& visiting, std::vector<int>& closed) {
    if (!visiting.insert(node).second) {
      failure = "unguarded projection cycle (type not balanced)";
      return false;
    }
    const auto& nd = g.nodes[node];
    bool involved = aroles[node].count(role) > 0;
    if (!involved) {
      closed.push_back(node);  // projects to end
    } else if (nd.kind == GlobalGraph::Node::Kind::Comm && nd.from != role &&
               nd.to != role) {
      for (const auto& e : nd.edges)
        if (!close(e.target, visiting, closed)) return false;
    } else if (nd.kind == GlobalGraph::Node::Kind::EnRoute && nd.to != role) {
      if (!close(nd.edges[0].target, visiting, closed)) return false;
    } else {
      closed.push_back(node);
    }
    visiting.erase(node);
    return true;
  }

  int build(const std::vector<int>& raw) {
    std::vector<int> closed;
    for (int n : raw) {
      std::set<int> visiting;
      if (!close(n, visiting, closed)) return -1;
    }
    std::sort(closed.begin(), closed.end());
    closed.erase(std::unique(closed.begin(), closed.end()), closed.end());
    if (auto it = memo.find(closed); it != memo.end()) return it->second;

    int id = static_cast<int>(out.nodes.size());
    out.nodes.emplace_back();
    memo[closed] = id;

    // Each closed member contributes a head: end, a selection (the role
    // sends), or a branching (the role receives a transmission or an
    // en-route message).
    bool any_end = false, any_select = false, any_branch = false;
    for (int n : closed) {
      const auto& nd = g.nodes[n];
      if (!aroles[n].count(role)) {
        any_end = true;
      } else if (nd.kind == GlobalGraph::Node::Kind::Comm && nd.from == role) {
        any_select = true;
      } else {
        any_branch = true;
      }
    }
    if (any_end && (any_select || any_branch)) {
      failure = "merge of terminated and active behaviour";
      return -1;
    }
    if (any_select && any_branch) {
      failure = "merge of input and output heads";
      return -1;
    }
    if (any_end) {
      out.nodes[id].kind = LocalGraph::Node::Kind::End;
      return id;
    }

    Role peer = [&] {
      const auto& nd = g.nodes[closed[0]];
      return nd.from == role ? nd.to : nd.from;
    }();
    for (int n : closed) {
      const auto& nd = g.nodes[n];
      Role other = nd.from == role ? nd.to : nd.from;
      if (other != peer) {
        failure = any_select ? "merge across different selection peers"
                             : "merge across different branching peers";
        return -1;
      }
    }

    if (any_select) {
      // Identical label/sort sets across members.
      std::map<Label, Sort> labels;
      for (const auto& e : g.nodes[closed[0]].edges) labels[e.label] = e.sort;
      for (int n : closed) {
        std::map<Label, Sort> other;
        for (const auto& e : g.nodes[n].edges) other[e.label] = e.sort;
        if (other != labels) {
          failure = "selections with different label or payload sets";
          return -1;
        }
      }
      out.nodes[id].kind = LocalGraph::Node::Kind::Select;
      out.nodes[id].peer = peer;
      for (const auto& [lbl, sort] : labels) {
        std::vector<int> succ;
        for (int n : closed)
          for (const auto& e : g.nodes[n].edges)
            if (e.label == lbl) succ.push_back(e.target);
        int child = build(succ);
        if (child < 0) return -1;
        out.nodes[id].edges.push_back(LocalGraph::Edge{lbl, sort, child});
      }
      return id;
    }

    // Branchings; en-route receptions contribute singleton branchings.
    std::map<Label, Sort> labels;
    for (int n : closed) {
      for (const auto& e : g.nodes[n].edges) {
        auto [it, fresh] = labels.try_emplace(e.label, e.sort);
        if (!fresh && it->second != e.sort) {
          failure = "branchings with conflicting payload sorts";
          return -1;
        }
      }
    }
    out.nodes[id].kind = LocalGraph::Node::Kind::Branch;
    out.nodes[id].peer = peer;
    for (const auto& [lbl, sort] : labels) {
      std::vector<int> succ;
      for (int n : closed)
        for (const auto& e : g.nodes[n].edges)
          if (e.label == lbl) succ.push_back(e.target);
      int child = build(succ);
      if (child < 0) return -1;
      out.nodes[id].edges.push_back(LocalGraph::Edge{lbl, sort, child});
    }
    return id;
  }

  // Queue of en-route messages sent by the role, in path order. Branches must
  // agree up to commutation; cycles contribute nothing for balanced types.
  bool queue_from(int node, std::set<int>& on_path, std::map<int, QueueType>& memo_q,
                  QueueType& result) {
    if (auto it = memo_q.find(node); it != memo_q.end()) {
      result = it->second;
      return true;
    }
    if (on_path.count(node)) {
      result.clear();
      return true;
    }
    on_path.insert(node);
    const auto& nd = g.nodes[node];
    bool ok = true;
    QueueType q;
    switch (nd.kind) {
      case GlobalGraph::Node::Kind::End:
        break;
      case GlobalGraph::Node::Kind::EnRoute: {
        QueueType tail;
        ok = queue_from(nd.edges[0].target, on_path, memo_q, tail);
        if (ok) {
          if (nd.from == role)
            q.push_back(QueueEntry{nd.to, nd.edges[0].label, nd.edges[0].sort});
          q.insert(q.end(), tail.begin(), tail.end());
        }
        break;
      }
      case GlobalGraph::Node::Kind::Comm: {
        bool first = true;
        for (const auto& e : nd.edges) {
          QueueType branch_q;
          if (!queue_from(e.target, on_path, memo_q, branch_q)) {
            ok = false;
            break;
          }
          if (first) {
            q = branch_q;
            first = false;
          } else if (!queue_equiv(q, branch_q)) {
            failure = "queue disagreement across branches";
            ok = false;
            break;
          }
        }
        break;
      }
    }
    on_path.erase(node);
    if (!ok) return false;
    memo_q[node] = q;
    result = std::move(q);
    return true;
  }
};

std::optional<Projection> project_unchecked(const GlobalPtr& g, const Role& r,
                                            ProjectionFailure* why) {
  GlobalGraph gr = graph_of(g);
  Projector pj(gr, r);

  QueueType queue;
  std::set<int> on_path;
  std::map<int, QueueType> memo_q;
  if (!pj.queue_from(gr.root, on_path, memo_q, queue)) {
    if (why) *why = ProjectionFailure{pj.failure};
    return std::nullopt;
  }
  int root = pj.build({gr.root});
  if (root < 0) {
    if (why) *why = ProjectionFailure{pj.failure};
    return std::nullopt;
  }
  pj.out.root = root;
  LocalGraph minimized = minimize(pj.out);
  return Projection{std::move(queue), local_ast_of(minimized)};
}

}  // namespace

std::optional<LocalPtr> merge(const std::vector<LocalPtr>& ts) {
  if (ts.empty()) return std::nullopt;
  std::vector<int> roots;
  LocalGraph all = combined_graph(ts, roots);
  auto merged = merge_graph(all, roots, nullptr);
  if (!merged) return std::nullopt;
  return local_ast_of(*merged);
}

bool check_merge(const std::vector<LocalPtr>& ts, const LocalPtr& t) {
  if (ts.empty()) return false;
  std::vector<int> roots;
  LocalGraph all = combined_graph(ts, roots);
  auto merged = merge_graph(all, roots, nullptr);
  if (!merged) return false;
  return bisimilar(*merged, graph_of(t));
}

std::optional<Projection> project(const GlobalPtr& g, const Role& r,
                                  ProjectionFailure* why) {
  auto report = check_balanced_plus(g);
  if (!report.balanced_plus)
    throw WellformednessError("global type is not balanced-plus", g->span);
  return project_unchecked(g, r, why);
}

std::optional<Projection> project_trusted(const GlobalPtr& g, const Role& r,
                                          ProjectionFailure* why) {
  return project_unchecked(g, r, why);
}

bool check_projection(const GlobalPtr& g, const Role& r, const QueueType& h,
                      const LocalPtr& t) {
  auto canonical = project_unchecked(g, r, nullptr);
  if (!canonical) return false;
  return queue_equiv(h, canonical->queue) && bisimilar(t, canonical->local);
}

}  // namespace mpst
