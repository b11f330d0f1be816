// SPDX-License-Identifier: Apache-2.0

#include "mpst/semantics.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mpst {

Role label_subject(const ActionLabel& l) { return l.subject; }

bool label_leq(const ActionLabel& l1, const ActionLabel& l2) {
  if (l1.kind != l2.kind || l1.subject != l2.subject || l1.peer != l2.peer ||
      l1.label != l2.label)
    return false;
  return l1.kind == ActionLabel::Kind::Send ? ground_subtype(l1.sort, l2.sort)
                                            : ground_subtype(l2.sort, l1.sort);
}

std::string show(const ActionLabel& l) {
  std::ostringstream out;
  out << l.subject.name << (l.kind == ActionLabel::Kind::Send ? "!" : "?")
      << l.peer.name << ":" << l.label.name << "(" << sort_name(l.sort) << ")";
  return out.str();
}

// ---------------------------------------------------------------------------
// Global type transitions

namespace {

GlobalPtr unfold_one(const GlobalPtr& g) {
  // A single substitution step of the top binder.
  struct Subst {
    static GlobalPtr run(const GlobalPtr& t, const std::string& var,
                         const GlobalPtr& repl) {
      switch (t->kind) {
        case GlobalType::Kind::End:
          return t;
        case GlobalType::Kind::Var:
          return t->var == var ? repl : t;
        case GlobalType::Kind::Rec:
          if (t->var == var) return t;
          return g_rec(t->var, run(t->body, var, repl));
        case GlobalType::Kind::Comm: {
          std::vector<GBranch> bs;
          for (const auto& b : t->branches)
            bs.push_back(GBranch{b.label, b.sort, run(b.cont, var, repl)});
          return g_comm(t->from, t->to, std::move(bs));
        }
        case GlobalType::Kind::EnRoute: {
          const auto& b = t->branches[0];
          return g_enroute(t->from, t->to, b.label, b.sort, run(b.cont, var, repl));
        }
      }
      return t;
    }
  };
  return Subst::run(g->body, g->var, g);
}

constexpr size_t kComboCap = 64;

struct GlobalEnumerator {
  GlobalStepOptions opts;

  std::vector<GlobalStep> enumerate(const GlobalPtr& g, int depth) {
    std::vector<GlobalStep> out;
    switch (g->kind) {
      case GlobalType::Kind::End:
      case GlobalType::Kind::Var:
        return out;
      case GlobalType::Kind::Rec: {
        if (depth <= 0) return out;
        return enumerate(unfold_one(g), depth - 1);
      }
      case GlobalType::Kind::EnRoute: {
        const auto& b = g->branches[0];
        out.push_back(
            GlobalStep{ActionLabel{ActionLabel::Kind::Receive, g->to, g->from,
                                   b.label, b.sort},
                       b.cont});
        for (auto& [label, next] : labelled_successors(b.cont, depth)) {
          // The head message stays first in the sender's stream.
          if (label.kind == ActionLabel::Kind::Receive && label.subject == g->to &&
              label.peer == g->from)
            continue;
          for (const auto& succ : next)
            out.push_back(GlobalStep{
                label, g_enroute(g->from, g->to, b.label, b.sort, succ)});
        }
        return out;
      }
      case GlobalType::Kind::Comm: {
        for (const auto& b : g->branches)
          out.push_back(GlobalStep{
              ActionLabel{ActionLabel::Kind::Send, g->from, g->to, b.label, b.sort},
              g_enroute(g->from, g->to, b.label, b.sort, b.cont)});

        // Successor sets per branch, keyed by label.
        std::vector<std::map<ActionLabel, std::vector<GlobalPtr>>> per_branch;
        for (const auto& b : g->branches) per_branch.push_back(labelled_successors(b.cont, depth));

        // Anticipation by other participants: the label must be available in
        // every branch and the choice is preserved.
        std::map<ActionLabel, bool> candidates;
        for (const auto& m : per_branch)
          for (const auto& [label, _] : m) candidates[label];
        for (const auto& [label, _] : candidates) {
          if (label_subject(label) == g->from) continue;
          bool everywhere = true;
          for (const auto& m : per_branch)
            if (!m.count(label)) {
              everywhere = false;
              break;
            }
          if (!everywhere) continue;
          std::vector<std::vector<GlobalPtr>> pools;
          for (auto& m : per_branch) pools.push_back(m.at(label));
          for (auto& combo : combinations(pools)) {
            std::vector<GBranch> bs;
            for (size_t i = 0; i < g->branches.size(); ++i)
              bs.push_back(GBranch{g->branches[i].label, g->branches[i].sort, combo[i]});
            out.push_back(GlobalStep{label, g_comm(g->from, g->to, std::move(bs))});
          }
        }

        // The sender anticipating a send to a third party may narrow the
        // choice to the branches that support it.
        std::map<ActionLabel, std::vector<size_t>> available;
        for (size_t i = 0; i < per_branch.size(); ++i)
          for (const auto& [label, _] : per_branch[i])
            if (label.kind == ActionLabel::Kind::Send && label.subject == g->from &&
                label.peer != g->to)
              available[label].push_back(i);
        for (const auto& [label, idxs] : available) {
          std::vector<std::vector<size_t>> subsets;
          if (opts.all_subsets) {
            size_t n = idxs.size();
            for (size_t mask = 1; mask < (size_t{1} << n); ++mask) {
              std::vector<size_t> sub;
              for (size_t i = 0; i < n; ++i)
                if (mask & (size_t{1} << i)) sub.push_back(idxs[i]);
              subsets.push_back(std::move(sub));
            }
          } else {
            subsets.push_back(idxs);  // maximal
          }
          for (const auto& sub : subsets) {
            std::vector<std::vector<GlobalPtr>> pools;
            for (size_t i : sub) pools.push_back(per_branch[i].at(label));
            for (auto& combo : combinations(pools)) {
              std::vector<GBranch> bs;
              for (size_t c = 0; c < sub.size(); ++c)
                bs.push_back(GBranch{g->branches[sub[c]].label,
                                     g->branches[sub[c]].sort, combo[c]});
              out.push_back(GlobalStep{label, g_comm(g->from, g->to, std::move(bs))});
            }
          }
        }
        return out;
      }
    }
    return out;
  }

  std::map<ActionLabel, std::vector<GlobalPtr>> labelled_successors(const GlobalPtr& g,
                                                                    int depth) {
    std::map<ActionLabel, std::vector<GlobalPtr>> out;
    for (auto& step : enumerate(g, depth)) out[step.label].push_back(step.next);
    return out;
  }

  static std::vector<std::vector<GlobalPtr>> combinations(
      const std::vector<std::vector<GlobalPtr>>& pools) {
    std::vector<std::vector<GlobalPtr>> out{{}};
    for (const auto& pool : pools) {
      std::vector<std::vector<GlobalPtr>> next;
      for (const auto& partial : out) {
        for (const auto& item : pool) {
          next.push_back(partial);
          next.back().push_back(item);
          if (next.size() >= kComboCap) break;
        }
        if (next.size() >= kComboCap) break;
      }
      out = std::move(next);
    }
    return out;
  }
};

}  // namespace

std::vector<GlobalStep> global_transitions(const GlobalPtr& g,
                                           const GlobalStepOptions& opts) {
  GlobalEnumerator en{opts};
  auto raw = en.enumerate(g, opts.depth_bound);
  // Deduplicate up to bisimilarity of the successor.
  std::vector<GlobalStep> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& step : raw) {
    GlobalGraph gg = graph_of(step.next);
    auto key = std::make_pair(show(step.label), canonical_key(gg, gg.root));
    if (seen.insert(key).second) out.push_back(std::move(step));
  }
  return out;
}

std::vector<GlobalPtr> global_step_matching(const GlobalPtr& g, const ActionLabel& l,
                                            const GlobalStepOptions& opts) {
  std::vector<GlobalPtr> out;
  for (auto& step : global_transitions(g, opts))
    if (label_leq(l, step.label)) out.push_back(step.next);
  return out;
}

// ---------------------------------------------------------------------------
// Typing context transitions

ContextUniverse ContextUniverse::of(const TypingContext& ctx) {
  ContextUniverse u;
  for (const auto& [role, entry] : ctx.entries) {
    u.roles.push_back(role);
    u.graphs.push_back(graph_of(entry.type));
    u.initial.queues.push_back(normalize_queue(entry.queue));
    u.initial.nodes.push_back(u.graphs.back().root);
  }
  return u;
}

TypingContext ContextUniverse::to_context(const State& s) const {
  TypingContext ctx;
  for (size_t i = 0; i < roles.size(); ++i)
    ctx.entries[roles[i]] =
        TypingContext::Entry{s.queues[i], local_ast_of(graphs[i], s.nodes[i])};
  return ctx;
}

bool ContextUniverse::role_ended(const State& s, size_t i) const {
  return graphs[i].nodes[s.nodes[i]].kind == LocalGraph::Node::Kind::End;
}

std::vector<std::pair<ActionLabel, ContextUniverse::State>> ContextUniverse::step(
    const State& s) const {
  std::vector<std::pair<ActionLabel, State>> out;
  for (size_t i = 0; i < roles.size(); ++i) {
    const auto& node = graphs[i].nodes[s.nodes[i]];
    if (node.kind == LocalGraph::Node::Kind::Select) {
      for (const auto& e : node.edges) {
        State next = s;
        next.queues[i].push_back(QueueEntry{node.peer, e.label, e.sort});
        next.queues[i] = normalize_queue(next.queues[i]);
        next.nodes[i] = e.target;
        out.push_back({ActionLabel{ActionLabel::Kind::Send, roles[i], node.peer,
                                   e.label, e.sort},
                       std::move(next)});
      }
    } else if (node.kind == LocalGraph::Node::Kind::Branch) {
      // Receiving from the peer's queue: the first message destined here.
      auto peer_it = std::find(roles.begin(), roles.end(), node.peer);
      if (peer_it == roles.end()) continue;
      size_t p = static_cast<size_t>(peer_it - roles.begin());
      const QueueType& pq = s.queues[p];
      auto msg = std::find_if(pq.begin(), pq.end(), [&](const QueueEntry& m) {
        return m.dest == roles[i];
      });
      if (msg == pq.end()) continue;
      for (const auto& e : node.edges) {
        if (e.label != msg->label || !ground_subtype(msg->sort, e.sort)) continue;
        State next = s;
        next.queues[p].erase(next.queues[p].begin() + (msg - pq.begin()));
        next.nodes[i] = e.target;
        out.push_back({ActionLabel{ActionLabel::Kind::Receive, roles[i], node.peer,
                                   e.label, e.sort},
                       std::move(next)});
      }
    }
  }
  return out;
}

std::string ContextUniverse::key(const State& s) const {
  std::ostringstream out;
  for (size_t i = 0; i < roles.size(); ++i) {
    out << roles[i].name << '=' << s.nodes[i] << '[';
    for (const auto& m : s.queues[i])
      out << m.dest.name << ':' << m.label.name << ':' << sort_name(m.sort) << ',';
    out << "];";
  }
  return out.str();
}

std::vector<ContextStep> context_transitions(const TypingContext& ctx) {
  ContextUniverse u = ContextUniverse::of(ctx);
  std::vector<ContextStep> out;
  for (auto& [label, state] : u.step(u.initial))
    out.push_back(ContextStep{label, u.to_context(state)});
  return out;
}

std::string context_key(const TypingContext& ctx) {
  std::ostringstream out;
  for (const auto& [role, entry] : ctx.entries) {
    LocalGraph g = graph_of(entry.type);
    out << role.name << '@' << canonical_key(g, g.root) << '[';
    for (const auto& m : normalize_queue(entry.queue))
      out << m.dest.name << ':' << m.label.name << ':' << sort_name(m.sort) << ',';
    out << "];";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Local type transitions

std::vector<LocalStep> local_transitions(const LocalPtr& t) {
  std::vector<LocalStep> out;
  LocalGraph g = graph_of(t);
  const auto& node = g.nodes[g.root];
  if (node.kind == LocalGraph::Node::Kind::End) return out;
  bool send = node.kind == LocalGraph::Node::Kind::Select;
  for (const auto& e : node.edges)
    out.push_back(LocalStep{LocalAction{node.peer, send, e.label, e.sort},
                            local_ast_of(g, e.target)});
  return out;
}

}  // namespace mpst
