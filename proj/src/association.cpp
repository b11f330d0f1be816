// SPDX-License-Identifier: Apache-2.0

#include "mpst/association.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "mpst/wellformed.hpp"

namespace mpst {

namespace {

// Matching searches retry with deeper derivations and the full subset
// enumeration before declaring a step unmatched.
const GlobalStepOptions kEscalation[] = {
    {8, false},
    {16, true},
    {32, true},
};

struct GlobalCandidates {
  // Alternatives for the current global state, deduplicated by tree.
  std::vector<GlobalPtr> types;

  void add(const GlobalPtr& g, std::set<std::string>& seen) {
    GlobalGraph gg = graph_of(g);
    if (seen.insert(canonical_key(gg, gg.root)).second) types.push_back(g);
  }
};

}  // namespace

namespace {

Verdict3 associated_impl(const TypingContext& ctx, const GlobalPtr& g, int k) {
  bool unknown = false;
  for (const Role& r : role_sets(g).roles) {
    auto it = ctx.entries.find(r);
    if (it == ctx.entries.end()) return Verdict3::No;
    auto proj = project_trusted(g, r);
    if (!proj) return Verdict3::No;
    if (!queue_subtype(it->second.queue, proj->queue)) return Verdict3::No;
    switch (async_subtype_bounded(it->second.type, proj->local, k)) {
      case Verdict3::Yes:
        break;
      case Verdict3::No:
        return Verdict3::No;
      case Verdict3::Unknown:
        unknown = true;
        break;
    }
  }
  return unknown ? Verdict3::Unknown : Verdict3::Yes;
}

}  // namespace

Verdict3 associated(const TypingContext& ctx, const GlobalPtr& g, int k) {
  auto report = check_balanced_plus(g);
  if (!report.balanced_plus)
    throw WellformednessError("global type is not balanced-plus", g->span);
  return associated_impl(ctx, g, k);
}

namespace {

struct MatchResult {
  std::vector<GlobalPtr> next;  // associated successors
  bool unknown = false;
};

MatchResult match_context_step(const std::vector<GlobalPtr>& candidates,
                               const ActionLabel& label, const TypingContext& next_ctx,
                               int k) {
  MatchResult out;
  std::set<std::string> seen;
  for (const auto& g : candidates) {
    for (const auto& opts : kEscalation) {
      bool found_here = false;
      for (const auto& succ : global_step_matching(g, label, opts)) {
        switch (associated_impl(next_ctx, succ, k)) {
          case Verdict3::Yes: {
            GlobalGraph gg = graph_of(succ);
            if (seen.insert(canonical_key(gg, gg.root)).second)
              out.next.push_back(succ);
            found_here = true;
            break;
          }
          case Verdict3::Unknown:
            out.unknown = true;
            break;
          case Verdict3::No:
            break;
        }
      }
      if (found_here) break;
    }
  }
  return out;
}

}  // namespace

ProbeReport completeness_probe(const TypingContext& ctx, const GlobalPtr& g,
                               const ProbeOptions& opts) {
  ProbeReport report;
  switch (associated(ctx, g, opts.k)) {
    case Verdict3::Yes:
      break;
    case Verdict3::No:
      report.verdict = ProbeReport::Verdict::Fail;
      report.violations.push_back({"initial", "-", "context is not associated"});
      return report;
    case Verdict3::Unknown:
      report.verdict = ProbeReport::Verdict::Inconclusive;
      return report;
  }

  ContextUniverse u = ContextUniverse::of(ctx);
  struct Item {
    ContextUniverse::State state;
    std::vector<GlobalPtr> candidates;
  };
  std::deque<Item> work;
  std::map<std::string, size_t> visited;  // context key -> candidate count seen
  bool unknown = false;

  work.push_back(Item{u.initial, {g}});
  visited[u.key(u.initial)] = 1;

  std::mt19937_64 rng(opts.seed);
  size_t explored_states = 1;

  // Verifies one context step; returns the matched global candidates.
  auto check_step = [&](const Item& item, const ActionLabel& label,
                        const ContextUniverse::State& next_state) {
    ++report.steps_checked;
    TypingContext next_ctx = u.to_context(next_state);
    MatchResult match = match_context_step(item.candidates, label, next_ctx, opts.k);
    if (match.next.empty()) {
      if (match.unknown)
        unknown = true;
      else
        report.violations.push_back({context_key(u.to_context(item.state)), show(label),
                                     "no matching global transition"});
    }
    return match.next;
  };

  // Exhaustive breadth-first phase.
  while (!work.empty() && report.steps_checked < opts.steps &&
         report.violations.empty()) {
    Item item = std::move(work.front());
    work.pop_front();
    for (auto& [label, next_state] : u.step(item.state)) {
      if (report.steps_checked >= opts.steps) break;
      auto matched = check_step(item, label, next_state);
      if (matched.empty()) continue;
      std::string key = u.key(next_state);
      auto [it, fresh] = visited.try_emplace(key, 0);
      if (fresh || it->second < matched.size()) {
        it->second = std::max(it->second, matched.size());
        if (explored_states < opts.state_cap) {
          ++explored_states;
          work.push_back(Item{next_state, matched});
        } else if (rng() % 2 == 0) {
          work.push_back(Item{next_state, matched});
        }
      }
    }
  }

  // Seeded random walks keep checking steps once the frontier is exhausted
  // (small systems run out of fresh states well before the budget).
  Item walker{u.initial, {g}};
  size_t stall = 0;
  while (report.steps_checked < opts.steps && report.violations.empty() &&
         stall < 4) {
    auto steps = u.step(walker.state);
    if (steps.empty()) {
      walker = Item{u.initial, {g}};
      ++stall;
      continue;
    }
    auto& [label, next_state] = steps[rng() % steps.size()];
    auto matched = check_step(walker, label, next_state);
    if (matched.empty()) break;
    walker = Item{next_state, matched};
    stall = 0;
  }

  if (!report.violations.empty())
    report.verdict = ProbeReport::Verdict::Fail;
  else if (unknown)
    report.verdict = ProbeReport::Verdict::Inconclusive;
  else
    report.verdict = ProbeReport::Verdict::Pass;
  return report;
}

ProbeReport soundness_probe(const TypingContext& ctx, const GlobalPtr& g,
                            const ProbeOptions& opts) {
  ProbeReport report;
  switch (associated(ctx, g, opts.k)) {
    case Verdict3::Yes:
      break;
    case Verdict3::No:
      report.verdict = ProbeReport::Verdict::Fail;
      report.violations.push_back({"initial", "-", "context is not associated"});
      return report;
    case Verdict3::Unknown:
      report.verdict = ProbeReport::Verdict::Inconclusive;
      return report;
  }

  std::mt19937_64 rng(opts.seed);
  TypingContext cur_ctx = ctx;
  GlobalPtr cur_g = g;
  bool unknown = false;
  bool fresh_walk = true;
  size_t iterations = 0;

  while (report.steps_checked < opts.steps && ++iterations <= 4 * opts.steps + 8) {
    bool global_moves = false;
    for (const auto& o : kEscalation) {
      if (!global_transitions(cur_g, o).empty()) {
        global_moves = true;
        break;
      }
    }
    if (!global_moves) {
      // Terminated; restart the walk on a fresh path while budget remains.
      if (fresh_walk) break;
      cur_ctx = ctx;
      cur_g = g;
      fresh_walk = true;
      continue;
    }
    fresh_walk = false;

    auto ctx_steps = context_transitions(cur_ctx);
    ++report.steps_checked;
    struct Choice {
      ActionLabel label;
      TypingContext ctx;
      GlobalPtr g;
    };
    std::vector<Choice> choices;
    for (const auto& cs : ctx_steps) {
      MatchResult match = match_context_step({cur_g}, cs.label, cs.next, opts.k);
      unknown = unknown || match.unknown;
      for (const auto& succ : match.next)
        choices.push_back(Choice{cs.label, cs.next, succ});
    }
    if (choices.empty()) {
      if (unknown) {
        report.verdict = ProbeReport::Verdict::Inconclusive;
        return report;
      }
      report.violations.push_back({context_key(cur_ctx), "-",
                                   "global type moves but the context has no "
                                   "matching transition"});
      report.verdict = ProbeReport::Verdict::Fail;
      return report;
    }
    const Choice& pick = choices[rng() % choices.size()];
    cur_ctx = pick.ctx;
    cur_g = pick.g;
  }

  report.verdict = unknown ? ProbeReport::Verdict::Inconclusive
                           : ProbeReport::Verdict::Pass;
  return report;
}

}  // namespace mpst
