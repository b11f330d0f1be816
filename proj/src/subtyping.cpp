// SPDX-License-Identifier: Apache-2.0

#include "mpst/subtyping.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace mpst {

const char* verdict_name(Verdict3 v) {
  switch (v) {
    case Verdict3::Yes: return "yes";
    case Verdict3::No: return "no";
    case Verdict3::Unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Standard (synchronous) subtyping

namespace {

struct SyncChecker {
  const LocalGraph& a;
  const LocalGraph& b;
  std::set<std::pair<int, int>> on_path;
  std::set<std::pair<int, int>> refuted;

  bool check(int l, int r) {
    auto key = std::make_pair(l, r);
    if (refuted.count(key)) return false;
    if (on_path.count(key)) return true;  // coinductive assumption
    on_path.insert(key);
    bool ok = check_heads(l, r);
    on_path.erase(key);
    if (!ok) refuted.insert(key);
    return ok;
  }

  bool check_heads(int l, int r) {
    const auto& ln = a.nodes[l];
    const auto& rn = b.nodes[r];
    using K = LocalGraph::Node::Kind;
    if (ln.kind == K::End || rn.kind == K::End)
      return ln.kind == K::End && rn.kind == K::End;
    if (ln.kind != rn.kind || ln.peer != rn.peer) return false;
    if (ln.kind == K::Branch) {
      // Subtype offers at least the supertype's labels; payloads are
      // contravariant.
      for (const auto& re : rn.edges) {
        const LocalGraph::Edge* le = find(ln, re.label);
        if (!le) return false;
        if (!ground_subtype(re.sort, le->sort)) return false;
        if (!check(le->target, re.target)) return false;
      }
      return true;
    }
    // Selection: subtype selects from a subset; payloads covariant.
    for (const auto& le : ln.edges) {
      const LocalGraph::Edge* re = find(rn, le.label);
      if (!re) return false;
      if (!ground_subtype(le.sort, re->sort)) return false;
      if (!check(le.target, re->target)) return false;
    }
    return true;
  }

  static const LocalGraph::Edge* find(const LocalGraph::Node& n, const Label& l) {
    for (const auto& e : n.edges)
      if (e.label == l) return &e;
    return nullptr;
  }
};

}  // namespace

bool sync_subtype(const LocalGraph& a, int ra, const LocalGraph& b, int rb) {
  SyncChecker c{a, b, {}, {}};
  return c.check(ra, rb);
}

bool sync_subtype(const LocalPtr& t1, const LocalPtr& t2) {
  LocalGraph a = graph_of(t1), b = graph_of(t2);
  return sync_subtype(a, a.root, b, b.root);
}

// ---------------------------------------------------------------------------
// SISO trees and action sets

std::optional<SisoTree> SisoTree::of(const LocalGraph& g) {
  for (const auto& n : g.nodes) {
    if (n.kind == LocalGraph::Node::Kind::End) {
      if (!n.edges.empty()) return std::nullopt;
    } else if (n.edges.size() != 1) {
      return std::nullopt;
    }
  }
  return SisoTree{g};
}

ActionSet act_set(const SisoTree& w) {
  ActionSet out;
  const auto& g = w.graph;
  std::vector<bool> seen(g.nodes.size(), false);
  std::deque<int> work{g.root};
  seen[g.root] = true;
  while (!work.empty()) {
    int n = work.front();
    work.pop_front();
    const auto& nd = g.nodes[n];
    if (nd.kind != LocalGraph::Node::Kind::End)
      out.insert(ActionAtom{nd.peer, nd.kind == LocalGraph::Node::Kind::Select});
    for (const auto& e : nd.edges)
      if (!seen[e.target]) {
        seen[e.target] = true;
        work.push_back(e.target);
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Refinement search
//
// A state is (left node, buffer of skipped right-hand actions, right node).
// Matching the left head consumes an equal action from the buffer or from
// deeper in the right tree, deferring everything skipped over; prefixes obey
// the permutation shapes (receive-anticipation over receives from other
// peers, send-anticipation over receives and sends to other peers). The
// buffer length is bounded by k. Success is coinductive; a cycle only counts
// when no buffered entry survives it unconsumed, which enforces the
// action-set side conditions.

namespace {

struct PendingAction {
  Role peer;
  bool send = false;
  Label label;
  Sort sort = Sort::Unit;
  int birth = 0;
};

struct EvalResult {
  bool win = false;
  int lowdep = 1 << 30;
};

constexpr int kSelfContained = 1 << 30;

struct Engine {
  const LocalGraph& L;
  const LocalGraph& R;
  int k;
  bool alternating;  // left selections and right branchings are adversarial
  bool aging;        // require buffered entries to be consumed around cycles
  bool bound_hit = false;
  int max_depth = 100000;

  std::map<std::string, int> path;  // state key -> depth of first visit
  std::map<std::string, bool> memo;  // self-contained verdicts only

  Engine(const LocalGraph& l, const LocalGraph& r, int bound, bool alt, bool age)
      : L(l), R(r), k(bound), alternating(alt), aging(age) {}

  static std::string key_of(int l, const std::vector<PendingAction>& sigma, int r,
                            int committed) {
    std::ostringstream out;
    out << l << '|';
    for (const auto& p : sigma)
      out << (p.send ? '!' : '?') << p.peer.name << ':' << p.label.name << ':'
          << sort_name(p.sort) << ';';
    out << '|' << r << '|' << committed;
    return out.str();
  }

  EvalResult eval(int l, std::vector<PendingAction> sigma, int r, int committed,
                  int depth) {
    using K = LocalGraph::Node::Kind;
    if (depth > max_depth) {
      bound_hit = true;
      return {false, kSelfContained};
    }
    std::string key = key_of(l, sigma, r, committed);
    if (auto it = memo.find(key); it != memo.end()) return {it->second, kSelfContained};
    if (auto it = path.find(key); it != path.end()) {
      if (!aging) return {true, it->second};
      for (const auto& p : sigma)
        if (p.birth < it->second) return {false, it->second};
      return {true, it->second};
    }

    if (L.nodes[l].kind == K::End) {
      bool win = sigma.empty() && R.nodes[r].kind == K::End;
      memo[key] = win;
      return {win, kSelfContained};
    }

    path[key] = depth;
    EvalResult res;

    // Adversarial branchings at the right head are resolved before the left
    // side commits to an action.
    if (alternating && committed < 0 && R.nodes[r].kind == K::Branch &&
        R.nodes[r].edges.size() > 1) {
      res.win = true;
      for (size_t e = 0; e < R.nodes[r].edges.size(); ++e) {
        EvalResult sub = eval(l, sigma, r, static_cast<int>(e), depth + 1);
        res.lowdep = std::min(res.lowdep, sub.lowdep);
        if (!sub.win) {
          res.win = false;
          break;
        }
      }
    } else {
      const auto& ln = L.nodes[l];
      bool opponent_left = alternating && ln.kind == K::Select && ln.edges.size() > 1;
      res.win = opponent_left;
      for (const auto& e : ln.edges) {
        PendingAction a{ln.peer, ln.kind == K::Select, e.label, e.sort, depth};
        EvalResult sub = match_action(a, e.target, sigma, r, committed, depth);
        res.lowdep = std::min(res.lowdep, sub.lowdep);
        if (opponent_left) {
          if (!sub.win) {
            res.win = false;
            break;
          }
        } else if (sub.win) {
          res.win = true;
          break;
        }
      }
    }

    path.erase(key);
    if (res.lowdep >= depth) {
      memo[key] = res.win;
      res.lowdep = kSelfContained;
    }
    return res;
  }

  // Shapes of permutable prefixes: receives anticipate over receives from
  // other peers; sends anticipate over sends to other peers and any receive.
  static bool shape_ok(const PendingAction& a, const PendingAction& b) {
    if (!a.send) return !b.send && b.peer != a.peer;
    return b.send ? b.peer != a.peer : true;
  }

  static bool action_matches(const PendingAction& a, const PendingAction& b) {
    if (a.peer != b.peer || a.send != b.send || a.label != b.label) return false;
    return a.send ? ground_subtype(a.sort, b.sort) : ground_subtype(b.sort, a.sort);
  }

  EvalResult match_action(const PendingAction& a, int ltarget,
                          const std::vector<PendingAction>& sigma, int r,
                          int committed, int depth) {
    EvalResult res;
    // Buffered positions first (shortest anticipation first).
    for (size_t j = 0; j < sigma.size(); ++j) {
      bool prefix_ok = true;
      for (size_t i = 0; i < j; ++i)
        if (!shape_ok(a, sigma[i])) {
          prefix_ok = false;
          break;
        }
      if (!prefix_ok) break;
      if (!action_matches(a, sigma[j])) continue;
      std::vector<PendingAction> rest = sigma;
      rest.erase(rest.begin() + static_cast<long>(j));
      EvalResult sub = eval(ltarget, std::move(rest), r, committed, depth + 1);
      res.lowdep = std::min(res.lowdep, sub.lowdep);
      if (sub.win) {
        res.win = true;
        return res;
      }
    }
    // Then the right tree, skipping (and deferring) what the prefix shape
    // allows.
    for (const auto& p : sigma)
      if (!shape_ok(a, p)) return res;
    EvalResult sub = walk(a, ltarget, sigma, r, committed, {}, depth);
    res.lowdep = std::min(res.lowdep, sub.lowdep);
    res.win = sub.win;
    return res;
  }

  EvalResult walk(const PendingAction& a, int ltarget,
                  const std::vector<PendingAction>& sigma, int rn, int only_edge,
                  std::vector<PendingAction> skipped, int depth) {
    using K = LocalGraph::Node::Kind;
    EvalResult res;
    const auto& node = R.nodes[rn];
    if (node.kind == K::End) return res;

    bool opponent = alternating && node.kind == K::Branch && node.edges.size() > 1 &&
                    only_edge < 0;
    if (only_edge >= 0) opponent = false;
    res.win = opponent;

    for (size_t e = 0; e < node.edges.size(); ++e) {
      if (only_edge >= 0 && static_cast<int>(e) != only_edge) continue;
      const auto& edge = node.edges[e];
      PendingAction b{node.peer, node.kind == K::Select, edge.label, edge.sort, depth};
      EvalResult edge_res;

      if (action_matches(a, b)) {
        std::vector<PendingAction> next = sigma;
        next.insert(next.end(), skipped.begin(), skipped.end());
        EvalResult sub = eval(ltarget, std::move(next), edge.target, -1, depth + 1);
        edge_res.lowdep = std::min(edge_res.lowdep, sub.lowdep);
        edge_res.win = sub.win;
      }
      if (!edge_res.win && shape_ok(a, b)) {
        if (sigma.size() + skipped.size() + 1 <= static_cast<size_t>(k)) {
          std::vector<PendingAction> more = skipped;
          more.push_back(b);
          EvalResult sub = walk(a, ltarget, sigma, edge.target, -1, std::move(more),
                                depth + 1);
          edge_res.lowdep = std::min(edge_res.lowdep, sub.lowdep);
          edge_res.win = edge_res.win || sub.win;
        } else {
          bound_hit = true;
        }
      }

      res.lowdep = std::min(res.lowdep, edge_res.lowdep);
      if (opponent) {
        if (!edge_res.win) {
          res.win = false;
          break;
        }
      } else if (edge_res.win) {
        res.win = true;
        break;
      }
    }
    return res;
  }
};

std::string show_action(const PendingAction& a) {
  std::ostringstream out;
  out << a.peer.name << (a.send ? "!" : "?") << a.label.name << "("
      << sort_name(a.sort) << ")";
  return out.str();
}

// Replays one winning play of the game (adversarial choices resolved to their
// first alternative) and renders each matching step.
void extract_witness(const LocalGraph& L, const LocalGraph& R, int k,
                     AsyncWitness* w) {
  using K = LocalGraph::Node::Kind;
  Engine probe(L, R, k, /*alternating=*/true, /*aging=*/true);
  int l = L.root, r = R.root;
  std::vector<PendingAction> sigma;
  std::set<std::string> seen;

  for (int step = 0; step < 64; ++step) {
    if (L.nodes[l].kind == K::End) {
      w->steps.push_back("end matches end");
      return;
    }
    std::string key = Engine::key_of(l, sigma, r, -1);
    if (!seen.insert(key).second) {
      w->steps.push_back("cycle closed; derivation continues forever");
      return;
    }
    int committed = -1;
    if (R.nodes[r].kind == K::Branch && R.nodes[r].edges.size() > 1) {
      committed = 0;
      w->steps.push_back("supertype branches; following label '" +
                         R.nodes[r].edges[0].label.name + "'");
    }

    // Pick a winning left action.
    bool advanced = false;
    const auto& ln = L.nodes[l];
    for (const auto& e : ln.edges) {
      PendingAction a{ln.peer, ln.kind == K::Select, e.label, e.sort, step};

      // Buffered match.
      for (size_t j = 0; j < sigma.size() && !advanced; ++j) {
        bool prefix_ok = true;
        for (size_t i = 0; i < j; ++i)
          if (!Engine::shape_ok(a, sigma[i])) prefix_ok = false;
        if (!prefix_ok || !Engine::action_matches(a, sigma[j])) continue;
        std::vector<PendingAction> rest = sigma;
        rest.erase(rest.begin() + static_cast<long>(j));
        if (probe.eval(e.target, rest, r, committed, step + 1).win) {
          w->steps.push_back(show_action(a) + " consumed from the deferred prefix");
          sigma = rest;
          l = e.target;
          advanced = true;
        }
      }
      if (advanced) break;

      // Tree match with anticipation, breadth-first over skip depth.
      bool all_ok = true;
      for (const auto& p : sigma)
        if (!Engine::shape_ok(a, p)) all_ok = false;
      if (!all_ok) continue;

      struct Frontier {
        int node;
        std::vector<PendingAction> skipped;
      };
      std::vector<Frontier> frontier{{r, {}}};
      for (int depth = 0; depth <= k && !advanced; ++depth) {
        std::vector<Frontier> next_frontier;
        for (const auto& f : frontier) {
          const auto& node = R.nodes[f.node];
          if (node.kind == K::End) continue;
          for (size_t ei = 0; ei < node.edges.size(); ++ei) {
            if (f.node == r && committed >= 0 && static_cast<int>(ei) != committed)
              continue;
            const auto& re = node.edges[ei];
            PendingAction b{node.peer, node.kind == K::Select, re.label, re.sort, step};
            if (Engine::action_matches(a, b)) {
              std::vector<PendingAction> sig = sigma;
              sig.insert(sig.end(), f.skipped.begin(), f.skipped.end());
              if (probe.eval(e.target, sig, re.target, -1, step + 1).win) {
                std::string line = show_action(a) + " matched";
                if (!f.skipped.empty()) {
                  line += " by anticipation past [";
                  for (size_t i = 0; i < f.skipped.size(); ++i)
                    line += (i ? " " : "") + show_action(f.skipped[i]);
                  line += "]";
                }
                w->steps.push_back(line);
                sigma = sig;
                l = e.target;
                r = re.target;
                advanced = true;
                break;
              }
            }
            if (Engine::shape_ok(a, b) &&
                sigma.size() + f.skipped.size() + 1 <= static_cast<size_t>(k)) {
              Frontier deeper{re.target, f.skipped};
              deeper.skipped.push_back(b);
              next_frontier.push_back(std::move(deeper));
            }
          }
          if (advanced) break;
        }
        frontier = std::move(next_frontier);
      }
      if (advanced) break;
    }
    if (!advanced) {
      w->steps.push_back("(trace truncated)");
      return;
    }
  }
}

// Positional strategies: one retained edge per multi-edge node of the given
// kind. Returns false when the strategy space is too large to enumerate.
bool collect_choice_nodes(const LocalGraph& g, LocalGraph::Node::Kind kind,
                          std::vector<int>& nodes, size_t* combinations) {
  nodes.clear();
  *combinations = 1;
  for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
    if (g.nodes[i].kind == kind && g.nodes[i].edges.size() > 1) {
      nodes.push_back(i);
      *combinations *= g.nodes[i].edges.size();
      if (*combinations > 4096) return false;
    }
  }
  return true;
}

LocalGraph prune(const LocalGraph& g, const std::vector<int>& nodes,
                 const std::vector<size_t>& pick) {
  LocalGraph out = g;
  for (size_t i = 0; i < nodes.size(); ++i) {
    auto& nd = out.nodes[nodes[i]];
    LocalGraph::Edge kept = nd.edges[pick[i]];
    nd.edges = {kept};
  }
  return out;
}

}  // namespace

Verdict3 siso_refine_bounded(const SisoTree& w1, const SisoTree& w2, int k) {
  {
    Engine yes(w1.graph, w2.graph, k, /*alternating=*/false, /*aging=*/true);
    if (yes.eval(w1.graph.root, {}, w2.graph.root, -1, 0).win) return Verdict3::Yes;
  }
  Engine no(w1.graph, w2.graph, k, /*alternating=*/false, /*aging=*/false);
  bool found = no.eval(w1.graph.root, {}, w2.graph.root, -1, 0).win;
  if (!found && !no.bound_hit) return Verdict3::No;
  return Verdict3::Unknown;
}

Verdict3 async_subtype_bounded(const LocalGraph& g1, const LocalGraph& g2, int k,
                               AsyncWitness* witness) {
  using K = LocalGraph::Node::Kind;
  bool end1 = g1.nodes[g1.root].kind == K::End;
  bool end2 = g2.nodes[g2.root].kind == K::End;
  if (end1 != end2) return Verdict3::No;  // end refines only end

  {
    Engine yes(g1, g2, k, /*alternating=*/true, /*aging=*/true);
    if (yes.eval(g1.root, {}, g2.root, -1, 0).win) {
      if (witness) extract_witness(g1, g2, k, witness);
      return Verdict3::Yes;
    }
  }

  // Sound refutation: fix a positional resolution of the left selections and
  // the right branchings, then search for any SISO witness pair without the
  // cycle discipline. A fruitless search that never touched the bound rules
  // out derivations of every size for that resolution.
  std::vector<int> lsel, rbra;
  size_t lcomb = 0, rcomb = 0;
  if (collect_choice_nodes(g1, K::Select, lsel, &lcomb) &&
      collect_choice_nodes(g2, K::Branch, rbra, &rcomb)) {
    std::vector<size_t> lpick(lsel.size(), 0), rpick(rbra.size(), 0);
    auto next = [](std::vector<size_t>& pick, const std::vector<int>& nodes,
                   const LocalGraph& g) {
      for (size_t i = 0; i < pick.size(); ++i) {
        if (++pick[i] < g.nodes[nodes[i]].edges.size()) return true;
        pick[i] = 0;
      }
      return false;
    };
    do {
      LocalGraph lp = prune(g1, lsel, lpick);
      do {
        LocalGraph rp = prune(g2, rbra, rpick);
        Engine search(lp, rp, k, /*alternating=*/false, /*aging=*/false);
        bool found = search.eval(lp.root, {}, rp.root, -1, 0).win;
        if (!found && !search.bound_hit) return Verdict3::No;
      } while (next(rpick, rbra, g2));
    } while (next(lpick, lsel, g1));
  }
  return Verdict3::Unknown;
}

Verdict3 async_subtype_bounded(const LocalGraph& g1, const LocalGraph& g2, int k) {
  return async_subtype_bounded(g1, g2, k, nullptr);
}

Verdict3 async_subtype_bounded(const LocalPtr& t1, const LocalPtr& t2, int k) {
  LocalGraph a = graph_of(t1), b = graph_of(t2);
  return async_subtype_bounded(a, b, k, nullptr);
}

}  // namespace mpst
