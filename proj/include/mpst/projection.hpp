// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_PROJECTION_HPP_
#define MPST_PROJECTION_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mpst/core.hpp"
#include "mpst/graph.hpp"

namespace mpst {

// Queue and local behaviour of one role, as projected from a global type.
struct Projection {
  QueueType queue;
  LocalPtr local;
};

struct ProjectionFailure {
  std::string reason;
};

// Full coinductive merge. Canonical result (bisimulation-minimal graph);
// absent when the set is unmergeable.
std::optional<LocalPtr> merge(const std::vector<LocalPtr>& ts);

// Membership in the coinductive merge relation.
bool check_merge(const std::vector<LocalPtr>& ts, const LocalPtr& t);

// Canonical projection of g onto r. Absent when unprojectable; `why`
// receives the first failure reason when provided. Throws
// WellformednessError when g is not balanced-plus.
std::optional<Projection> project(const GlobalPtr& g, const Role& r,
                                  ProjectionFailure* why = nullptr);

// As project, for callers that have already established balancedness.
std::optional<Projection> project_trusted(const GlobalPtr& g, const Role& r,
                                          ProjectionFailure* why = nullptr);

// Membership in the projection relation (closed under unfolding and queue
// equivalence).
bool check_projection(const GlobalPtr& g, const Role& r, const QueueType& h,
                      const LocalPtr& t);

}  // namespace mpst

#endif  // MPST_PROJECTION_HPP_
