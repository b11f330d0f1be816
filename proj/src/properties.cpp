// SPDX-License-Identifier: Apache-2.0

#include "mpst/properties.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace mpst {

namespace {

struct StateGraph {
  ContextUniverse universe;
  std::vector<ContextUniverse::State> states;
  std::map<std::string, int> index;
  struct Edge {
    int from;
    int to;
    ActionLabel label;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out_edges;  // state -> edge ids
  std::vector<int> parent_edge;             // BFS tree, -1 at the root
  std::vector<char> truncated;              // state had a cut successor
  std::vector<std::vector<ActionLabel>> cut_labels;  // the cut sends per state
  bool bound_hit = false;
  // Every cut was a send appending one more copy of a label already filling
  // that pair's queue; such floods never change any head observation, so
  // head-based verdicts carry over.
  bool homogeneous_cuts = true;

  std::vector<ActionLabel> path_to(int state) const {
    std::vector<ActionLabel> labels;
    int cur = state;
    while (parent_edge[cur] >= 0) {
      const Edge& e = edges[parent_edge[cur]];
      labels.push_back(e.label);
      cur = e.from;
    }
    std::reverse(labels.begin(), labels.end());
    return labels;
  }
};

bool within_queue_bound(const ContextUniverse::State& s, int bound) {
  for (const auto& q : s.queues) {
    std::map<std::string, int> per_dest;
    for (const auto& m : q)
      if (++per_dest[m.dest.name] > bound) return false;
  }
  return true;
}

// True when the send behind `label` appends to a queue holding only
// identical messages for that destination.
bool homogeneous_append(const ContextUniverse& u, const ContextUniverse::State& from,
                        const ActionLabel& label) {
  if (label.kind != ActionLabel::Kind::Send) return false;
  auto it = std::find(u.roles.begin(), u.roles.end(), label.subject);
  if (it == u.roles.end()) return false;
  const QueueType& q = from.queues[static_cast<size_t>(it - u.roles.begin())];
  for (const auto& m : q) {
    if (m.dest != label.peer) continue;
    if (m.label != label.label || m.sort != label.sort) return false;
  }
  return true;
}

StateGraph explore(const TypingContext& ctx, int queue_bound) {
  StateGraph g;
  g.universe = ContextUniverse::of(ctx);
  auto add_state = [&](const ContextUniverse::State& s) {
    std::string key = g.universe.key(s);
    auto it = g.index.find(key);
    if (it != g.index.end()) return std::make_pair(it->second, false);
    int id = static_cast<int>(g.states.size());
    g.index.emplace(std::move(key), id);
    g.states.push_back(s);
    g.out_edges.emplace_back();
    g.parent_edge.push_back(-1);
    g.truncated.push_back(0);
    g.cut_labels.emplace_back();
    return std::make_pair(id, true);
  };
  auto [root, _] = add_state(g.universe.initial);
  std::deque<int> work{root};
  while (!work.empty()) {
    int cur = work.front();
    work.pop_front();
    for (auto& [label, next] : g.universe.step(g.states[cur])) {
      if (!within_queue_bound(next, queue_bound)) {
        g.bound_hit = true;
        g.truncated[cur] = 1;
        g.cut_labels[cur].push_back(label);
        if (!homogeneous_append(g.universe, g.states[cur], label))
          g.homogeneous_cuts = false;
        continue;
      }
      auto [id, fresh] = add_state(next);
      int eid = static_cast<int>(g.edges.size());
      g.edges.push_back(StateGraph::Edge{cur, id, label});
      g.out_edges[cur].push_back(eid);
      if (fresh) {
        g.parent_edge[id] = eid;
        work.push_back(id);
      }
    }
  }
  return g;
}

// First message per destination in each sender's queue, with the receiver's
// branch head, when the receiver expects this sender.
struct HeadMessage {
  size_t sender;
  size_t receiver;
  Label label;
  Sort sort;
};

std::vector<HeadMessage> head_messages(const ContextUniverse& u,
                                       const ContextUniverse::State& s) {
  std::vector<HeadMessage> out;
  for (size_t i = 0; i < u.roles.size(); ++i) {
    std::set<std::string> seen_dest;
    for (const auto& m : s.queues[i]) {
      if (!seen_dest.insert(m.dest.name).second) continue;
      auto it = std::find(u.roles.begin(), u.roles.end(), m.dest);
      if (it == u.roles.end()) continue;
      out.push_back(HeadMessage{i, static_cast<size_t>(it - u.roles.begin()),
                                m.label, m.sort});
    }
  }
  return out;
}

std::optional<std::string> safety_violation(const ContextUniverse& u,
                                            const ContextUniverse::State& s) {
  for (const auto& hm : head_messages(u, s)) {
    const auto& node = u.graphs[hm.receiver].nodes[s.nodes[hm.receiver]];
    if (node.kind != LocalGraph::Node::Kind::Branch) continue;
    if (node.peer != u.roles[hm.sender]) continue;
    bool ok = false;
    for (const auto& e : node.edges)
      if (e.label == hm.label && ground_subtype(hm.sort, e.sort)) ok = true;
    if (!ok)
      return "message " + u.roles[hm.sender].name + "->" +
             u.roles[hm.receiver].name + ":" + hm.label.name +
             " does not match the receiver's branching";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Liveness machinery

struct Obligation {
  enum class Kind { PendingMessage, PendingReceive } kind;
  size_t p, q;  // PendingMessage: sender p, destination q; PendingReceive:
                // receiver p waiting on q
  Label label;  // PendingMessage only

  friend auto operator<=>(const Obligation&, const Obligation&) = default;
};

std::set<Obligation> obligations_at(const ContextUniverse& u,
                                    const ContextUniverse::State& s) {
  std::set<Obligation> out;
  for (const auto& hm : head_messages(u, s))
    out.insert(Obligation{Obligation::Kind::PendingMessage, hm.sender, hm.receiver,
                          hm.label});
  for (size_t i = 0; i < u.roles.size(); ++i) {
    const auto& node = u.graphs[i].nodes[s.nodes[i]];
    if (node.kind != LocalGraph::Node::Kind::Branch) continue;
    auto it = std::find(u.roles.begin(), u.roles.end(), node.peer);
    if (it == u.roles.end()) {
      out.insert(Obligation{Obligation::Kind::PendingReceive, i,
                            static_cast<size_t>(-1), Label{}});
      continue;
    }
    out.insert(Obligation{Obligation::Kind::PendingReceive, i,
                          static_cast<size_t>(it - u.roles.begin()), Label{}});
  }
  return out;
}

bool discharges(const ContextUniverse& u, const ActionLabel& label,
                const Obligation& ob) {
  if (ob.kind == Obligation::Kind::PendingMessage)
    return label.kind == ActionLabel::Kind::Receive &&
           label.subject == u.roles[ob.q] && label.peer == u.roles[ob.p] &&
           label.label == ob.label;
  if (ob.q == static_cast<size_t>(-1)) return false;
  return label.kind == ActionLabel::Kind::Receive &&
         label.subject == u.roles[ob.p] && label.peer == u.roles[ob.q];
}

// Fairness classes: one obligation per enabled send pair (any label
// discharges), one per enabled receive action (that action discharges).
struct FairnessObligation {
  bool is_send;
  Role subject, peer;
  ActionLabel exact;  // receives only

  friend auto operator<=>(const FairnessObligation&, const FairnessObligation&) = default;
};

std::set<FairnessObligation> fairness_at(const StateGraph& g, int state) {
  std::set<FairnessObligation> out;
  for (int eid : g.out_edges[state]) {
    const auto& label = g.edges[eid].label;
    if (label.kind == ActionLabel::Kind::Send)
      out.insert(FairnessObligation{true, label.subject, label.peer, {}});
    else
      out.insert(FairnessObligation{false, label.subject, label.peer, label});
  }
  return out;
}

bool fair_discharges(const ActionLabel& label, const FairnessObligation& ob) {
  if (ob.is_send)
    return label.kind == ActionLabel::Kind::Send && label.subject == ob.subject &&
           label.peer == ob.peer;
  return label == ob.exact;
}

struct LassoFinder {
  const StateGraph& g;

  // Within `states`, using only `allowed` edges, find a fairness-closed SCC
  // containing a state satisfying `target`; the closed walk over its edges is
  // then a fair cycle.
  struct Found {
    int entry_state;
    std::vector<int> cycle_edges;
  };

  std::optional<Found> search(std::vector<int> states, std::vector<char> allowed,
                              const std::function<bool(int)>& target) {
    auto sccs = compute_sccs(states, allowed);
    for (auto& scc : sccs) {
      std::set<int> members(scc.begin(), scc.end());
      std::vector<int> internal;
      for (int s : scc)
        for (int eid : g.out_edges[s])
          if (allowed[eid] && members.count(g.edges[eid].to)) internal.push_back(eid);
      if (internal.empty()) continue;  // trivial SCC, no cycle

      // Fairness closure: every obligation enabled at a member must be
      // dischargeable inside; otherwise drop the state and retry.
      std::vector<int> unfair;
      for (int s : scc) {
        for (const auto& ob : fairness_at(g, s)) {
          bool ok = false;
          for (int eid : internal)
            if (fair_discharges(g.edges[eid].label, ob)) {
              ok = true;
              break;
            }
          if (!ok) {
            unfair.push_back(s);
            break;
          }
        }
      }
      if (!unfair.empty()) {
        std::set<int> drop(unfair.begin(), unfair.end());
        std::vector<int> rest;
        for (int s : scc)
          if (!drop.count(s)) rest.push_back(s);
        if (rest.empty()) continue;
        if (auto found = search(rest, allowed, target)) return found;
        continue;
      }

      for (int s : scc) {
        if (!target(s)) continue;
        return Found{s, cover_walk(s, internal)};
      }
    }
    return std::nullopt;
  }

  // Closed walk from `start` visiting every internal edge at least once.
  std::vector<int> cover_walk(int start, const std::vector<int>& internal) {
    std::set<int> members;
    for (int eid : internal) {
      members.insert(g.edges[eid].from);
      members.insert(g.edges[eid].to);
    }
    std::set<int> allowed(internal.begin(), internal.end());
    std::vector<int> walk;
    int cur = start;
    std::set<int> pending(internal.begin(), internal.end());
    auto shortest = [&](int from, const std::function<bool(int)>& goal) {
      std::map<int, int> via;  // state -> edge id used to reach it
      std::deque<int> work{from};
      std::set<int> seen{from};
      if (goal(from)) return std::vector<int>{};
      while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        for (int eid : g.out_edges[s]) {
          if (!allowed.count(eid)) continue;
          int to = g.edges[eid].to;
          if (seen.count(to)) continue;
          seen.insert(to);
          via[to] = eid;
          if (goal(to)) {
            std::vector<int> path;
            int back = to;
            while (back != from) {
              path.push_back(via[back]);
              back = g.edges[via[back]].from;
            }
            std::reverse(path.begin(), path.end());
            return path;
          }
          work.push_back(to);
        }
      }
      return std::vector<int>{};
    };
    while (!pending.empty()) {
      int want = *pending.begin();
      auto path = shortest(cur, [&](int s) { return s == g.edges[want].from; });
      for (int eid : path) {
        walk.push_back(eid);
        pending.erase(eid);
      }
      walk.push_back(want);
      pending.erase(want);
      cur = g.edges[want].to;
    }
    if (cur != start) {
      auto path = shortest(cur, [&](int s) { return s == start; });
      for (int eid : path) walk.push_back(eid);
    }
    return walk;
  }

  std::vector<std::vector<int>> compute_sccs(const std::vector<int>& states,
                                             const std::vector<char>& allowed) {
    // Tarjan over the induced subgraph.
    std::set<int> in_set(states.begin(), states.end());
    std::map<int, int> index, low;
    std::vector<int> stack;
    std::set<int> on_stack;
    std::vector<std::vector<int>> sccs;
    int counter = 0;

    struct Frame {
      int state;
      size_t edge_pos = 0;
    };
    for (int root : states) {
      if (index.count(root)) continue;
      std::vector<Frame> frames{{root}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack.insert(root);
      while (!frames.empty()) {
        Frame& f = frames.back();
        const auto& outs = g.out_edges[f.state];
        bool descended = false;
        while (f.edge_pos < outs.size()) {
          int eid = outs[f.edge_pos++];
          if (!allowed[eid]) continue;
          int to = g.edges[eid].to;
          if (!in_set.count(to)) continue;
          if (!index.count(to)) {
            index[to] = low[to] = counter++;
            stack.push_back(to);
            on_stack.insert(to);
            frames.push_back(Frame{to});
            descended = true;
            break;
          }
          if (on_stack.count(to)) low[f.state] = std::min(low[f.state], index[to]);
        }
        if (descended) continue;
        if (low[f.state] == index[f.state]) {
          std::vector<int> scc;
          for (;;) {
            int s = stack.back();
            stack.pop_back();
            on_stack.erase(s);
            scc.push_back(s);
            if (s == f.state) break;
          }
          sccs.push_back(std::move(scc));
        }
        int done = f.state;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().state] = std::min(low[frames.back().state], low[done]);
      }
    }
    return sccs;
  }
};

std::string describe(const ContextUniverse& u, const Obligation& ob) {
  if (ob.kind == Obligation::Kind::PendingMessage)
    return "queued message " + u.roles[ob.p].name + "->" + u.roles[ob.q].name + ":" +
           ob.label.name + " is never dequeued";
  return "role " + u.roles[ob.p].name + " waits on a branching that never fires";
}

}  // namespace

PropertyVerdict check_safety(const TypingContext& ctx, int queue_bound) {
  StateGraph g = explore(ctx, queue_bound);
  PropertyVerdict v;
  v.bound_hit = g.bound_hit;
  for (int s = 0; s < static_cast<int>(g.states.size()); ++s) {
    if (auto why = safety_violation(g.universe, g.states[s])) {
      v.holds = false;
      v.reason = *why;
      v.trace = g.path_to(s);
      return v;
    }
  }
  if (g.bound_hit && !g.homogeneous_cuts) return v;  // unknown
  v.holds = true;
  return v;
}

PropertyVerdict check_deadlock_freedom(const TypingContext& ctx, int queue_bound) {
  StateGraph g = explore(ctx, queue_bound);
  PropertyVerdict v;
  v.bound_hit = g.bound_hit;
  for (int s = 0; s < static_cast<int>(g.states.size()); ++s) {
    if (!g.out_edges[s].empty()) continue;
    if (g.truncated[s]) continue;  // a real transition was cut, not stuck
    const auto& st = g.states[s];
    bool finished = true;
    for (size_t i = 0; i < g.universe.roles.size(); ++i) {
      if (!g.universe.role_ended(st, i) || !st.queues[i].empty()) finished = false;
    }
    if (!finished) {
      v.holds = false;
      v.reason = "stuck context with live types or queued messages";
      v.trace = g.path_to(s);
      return v;
    }
  }
  if (g.bound_hit && !g.homogeneous_cuts) return v;
  v.holds = true;
  return v;
}

PropertyVerdict check_liveness(const TypingContext& ctx, int queue_bound) {
  StateGraph g = explore(ctx, queue_bound);
  PropertyVerdict v;
  v.bound_hit = g.bound_hit;

  // Finite fair runs: a stuck state with leftovers violates liveness. States
  // whose only successors were cut by the bound are not genuinely stuck, but
  // when nothing except the cut sends is enabled, flooding them forever is a
  // fair run that discharges nothing else.
  for (int s = 0; s < static_cast<int>(g.states.size()); ++s) {
    if (!g.out_edges[s].empty()) continue;
    auto obs = obligations_at(g.universe, g.states[s]);
    if (obs.empty()) continue;
    v.holds = false;
    v.reason = describe(g.universe, *obs.begin());
    v.trace = g.path_to(s);
    if (g.truncated[s]) {
      v.cycle_start = v.trace.size();
      for (const auto& label : g.cut_labels[s]) v.trace.push_back(label);
    }
    return v;
  }

  // Infinite fair runs: a fairness-closed cycle along which an obligation is
  // never discharged.
  std::set<Obligation> all_obs;
  for (int s = 0; s < static_cast<int>(g.states.size()); ++s)
    for (const auto& ob : obligations_at(g.universe, g.states[s])) all_obs.insert(ob);

  std::vector<int> all_states(g.states.size());
  for (size_t i = 0; i < g.states.size(); ++i) all_states[i] = static_cast<int>(i);

  LassoFinder finder{g};
  for (const auto& ob : all_obs) {
    std::vector<char> allowed(g.edges.size(), 1);
    for (size_t e = 0; e < g.edges.size(); ++e)
      if (discharges(g.universe, g.edges[e].label, ob)) allowed[e] = 0;
    auto found = finder.search(all_states, allowed, [&](int s) {
      return obligations_at(g.universe, g.states[s]).count(ob) > 0;
    });
    if (found) {
      v.holds = false;
      v.reason = describe(g.universe, ob);
      v.trace = g.path_to(found->entry_state);
      v.cycle_start = v.trace.size();
      for (int eid : found->cycle_edges) v.trace.push_back(g.edges[eid].label);
      return v;
    }
  }

  if (g.bound_hit) return v;
  v.holds = true;
  return v;
}

}  // namespace mpst
