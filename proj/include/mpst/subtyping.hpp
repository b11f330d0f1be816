// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_SUBTYPING_HPP_
#define MPST_SUBTYPING_HPP_

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpst/core.hpp"
#include "mpst/graph.hpp"

namespace mpst {

// Three-valued verdicts for the bounded asynchronous checks: Yes and No are
// sound, Unknown reflects the bound (the full relation is undecidable).
enum class Verdict3 { Yes, No, Unknown };

const char* verdict_name(Verdict3 v);

// Standard (synchronous) session subtyping: subtype offers more branchings,
// fewer selections; payloads contravariant on branchings, covariant on
// selections.
bool sync_subtype(const LocalPtr& t1, const LocalPtr& t2);
bool sync_subtype(const LocalGraph& a, int ra, const LocalGraph& b, int rb);

// Single-input-single-output tree: a local graph whose every node has at
// most one edge.
struct SisoTree {
  LocalGraph graph;

  static std::optional<SisoTree> of(const LocalGraph& g);
};

struct ActionAtom {
  Role role;
  bool send = false;  // false: receive

  friend auto operator<=>(const ActionAtom&, const ActionAtom&) = default;
};

using ActionSet = std::set<ActionAtom>;

ActionSet act_set(const SisoTree& w);

// Bounded decision procedure for the SISO refinement relation. `k` bounds the
// anticipation window (the length of receive- and send-permutation prefixes).
Verdict3 siso_refine_bounded(const SisoTree& w1, const SisoTree& w2, int k);

// Bounded sound decision procedure for precise asynchronous subtyping via
// decomposition into single-output / single-input trees and SISO refinement.
Verdict3 async_subtype_bounded(const LocalPtr& t1, const LocalPtr& t2, int k);
Verdict3 async_subtype_bounded(const LocalGraph& g1, const LocalGraph& g2, int k);

// Human-readable refinement trace for Yes verdicts of the last query; empty
// otherwise.
struct AsyncWitness {
  std::vector<std::string> steps;
};
Verdict3 async_subtype_bounded(const LocalGraph& g1, const LocalGraph& g2, int k,
                               AsyncWitness* witness);

}  // namespace mpst

#endif  // MPST_SUBTYPING_HPP_
