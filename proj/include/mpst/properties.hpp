// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_PROPERTIES_HPP_
#define MPST_PROPERTIES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mpst/semantics.hpp"

namespace mpst {

struct PropertyVerdict {
  std::optional<bool> holds;  // absent: exploration bound was hit first
  bool bound_hit = false;
  std::string reason;
  // Counterexample labels, replayable through context_transitions. For
  // liveness lassos the suffix from `cycle_start` repeats forever.
  std::vector<ActionLabel> trace;
  size_t cycle_start = static_cast<size_t>(-1);
};

// Explores every context reachable within the queue bound (messages per
// (sender, destination) pair).
PropertyVerdict check_safety(const TypingContext& ctx, int queue_bound = 4);
PropertyVerdict check_deadlock_freedom(const TypingContext& ctx, int queue_bound = 4);
PropertyVerdict check_liveness(const TypingContext& ctx, int queue_bound = 4);

}  // namespace mpst

#endif  // MPST_PROPERTIES_HPP_
