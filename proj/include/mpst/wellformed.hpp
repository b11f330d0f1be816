// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_WELLFORMED_HPP_
#define MPST_WELLFORMED_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mpst/core.hpp"
#include "mpst/graph.hpp"

namespace mpst {

// Partial natural number; absent encodes "undefined".
using DepthResult = std::optional<int>;

// Least n such that every length-n path through the unfolding of g performs
// an action of r; absent when some path (or cycle) avoids r.
DepthResult depth(const GlobalPtr& g, const Role& r);

// As depth, but counting until an en-route transmission from p to q.
DepthResult mdepth(const GlobalPtr& g, const Role& p, const Role& q);

// Uniform number of en-route (p,q) messages across all paths; absent when
// branches disagree, when an en-route transmission sits under a live
// recursion binder, or when a p->q transmission precedes a pending one.
std::optional<int> mcount(const GlobalPtr& g, const Role& p, const Role& q);

struct BalanceFailure {
  std::string subject;  // role or "p~>q" pair
  std::string reason;
  std::vector<Label> path;  // branch labels from the root to the witness
};

struct BalanceReport {
  bool balanced = false;
  bool balanced_plus = false;
  std::vector<BalanceFailure> failures;
};

BalanceReport check_balanced_plus(const GlobalPtr& g);

}  // namespace mpst

#endif  // MPST_WELLFORMED_HPP_
