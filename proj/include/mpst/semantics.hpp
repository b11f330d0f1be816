// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_SEMANTICS_HPP_
#define MPST_SEMANTICS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpst/core.hpp"
#include "mpst/graph.hpp"

namespace mpst {

// Transition label: subject sends to / receives from peer.
struct ActionLabel {
  enum class Kind { Send, Receive };
  Kind kind = Kind::Send;
  Role subject;
  Role peer;
  Label label;
  Sort sort = Sort::Unit;

  friend auto operator<=>(const ActionLabel&, const ActionLabel&) = default;
};

Role label_subject(const ActionLabel& l);

// Label refinement: same action, payload covariant for sends and
// contravariant for receives.
bool label_leq(const ActionLabel& l1, const ActionLabel& l2);

std::string show(const ActionLabel& l);

// ---------------------------------------------------------------------------
// Global type transitions

struct GlobalStepOptions {
  int depth_bound = 8;      // recursion unfoldings inside one derivation
  bool all_subsets = false;  // enumerate every non-empty branch subset of the
                             // send-anticipation rule, not just the maximal one
};

struct GlobalStep {
  ActionLabel label;
  GlobalPtr next;
};

// All one-step derivatives, deduplicated up to bisimilarity.
std::vector<GlobalStep> global_transitions(const GlobalPtr& g,
                                           const GlobalStepOptions& opts = {});

// Successors whose label refines `l` (same action shape, payload within <:).
std::vector<GlobalPtr> global_step_matching(const GlobalPtr& g, const ActionLabel& l,
                                            const GlobalStepOptions& opts = {});

// ---------------------------------------------------------------------------
// Typing contexts

struct TypingContext {
  struct Entry {
    QueueType queue;
    LocalPtr type;
  };
  std::map<Role, Entry> entries;
};

struct ContextStep {
  ActionLabel label;
  TypingContext next;
};

std::vector<ContextStep> context_transitions(const TypingContext& ctx);

// Normalized queues and bisimulation-canonical types; equal keys iff the
// contexts are identified by the exploration.
std::string context_key(const TypingContext& ctx);

// Shared stepping machinery for explicit-state exploration: local types live
// in per-role graphs whose node ids are stable across transitions.
struct ContextUniverse {
  struct State {
    std::vector<QueueType> queues;  // normalized, indexed like roles
    std::vector<int> nodes;
  };

  std::vector<Role> roles;
  std::vector<LocalGraph> graphs;
  State initial;

  static ContextUniverse of(const TypingContext& ctx);

  TypingContext to_context(const State& s) const;
  std::vector<std::pair<ActionLabel, State>> step(const State& s) const;
  std::string key(const State& s) const;
  bool role_ended(const State& s, size_t i) const;
};

// ---------------------------------------------------------------------------
// Local type transitions

struct LocalAction {
  Role peer;
  bool send = false;
  Label label;
  Sort sort = Sort::Unit;

  friend auto operator<=>(const LocalAction&, const LocalAction&) = default;
};

struct LocalStep {
  LocalAction action;
  LocalPtr next;
};

std::vector<LocalStep> local_transitions(const LocalPtr& t);

}  // namespace mpst

#endif  // MPST_SEMANTICS_HPP_
