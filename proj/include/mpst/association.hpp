// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_ASSOCIATION_HPP_
#define MPST_ASSOCIATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mpst/projection.hpp"
#include "mpst/semantics.hpp"
#include "mpst/subtyping.hpp"

namespace mpst {

// Association: every role of g is covered by the context, refines the
// projected local type under the bounded asynchronous subtyping, and its
// queue refines the projected queue.
Verdict3 associated(const TypingContext& ctx, const GlobalPtr& g, int k);

struct ProbeViolation {
  std::string state;
  std::string step;
  std::string reason;
};

struct ProbeReport {
  size_t steps_checked = 0;
  std::vector<ProbeViolation> violations;
  enum class Verdict { Pass, Fail, Inconclusive } verdict = Verdict::Pass;
};

struct ProbeOptions {
  size_t steps = 200;
  int k = 2;
  uint64_t seed = 1;
  size_t state_cap = 10000;  // exhaustive up to here, seeded random beyond
};

// Walks context transitions and checks every step is matched by a global
// step with a refining label, association preserved.
ProbeReport completeness_probe(const TypingContext& ctx, const GlobalPtr& g,
                               const ProbeOptions& opts);

// Whenever the global type can move, the context can take a matching step
// preserving association.
ProbeReport soundness_probe(const TypingContext& ctx, const GlobalPtr& g,
                            const ProbeOptions& opts);

}  // namespace mpst

#endif  // MPST_ASSOCIATION_HPP_
