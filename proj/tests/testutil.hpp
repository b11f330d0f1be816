// SPDX-License-Identifier: Apache-2.0

#ifndef MPST_TESTS_TESTUTIL_HPP_
#define MPST_TESTS_TESTUTIL_HPP_

#include <string>

#include "mpst/core.hpp"
#include "mpst/parse.hpp"

namespace mpst::testutil {

// The running ring-choice protocol and its projections.
inline const char* kRingSrc =
    "rec t . p -> q { add(int) . q -> r { add(int) . r -> p { add(int) . t }, "
    "sub(int) . r -> p { sub(int) . t } } }";

inline const char* kTP =
    "rec t . q (+) { add(int) . r & { add(int) . t, sub(int) . t } }";
inline const char* kTQ =
    "rec t . p & { add(int) . r (+) { add(int) . t, sub(int) . t } }";
inline const char* kTR =
    "rec t . q & { add(int) . p (+) { add(int) . t }, sub(int) . p (+) { sub(int) . t } }";
inline const char* kToptQ =
    "rec t . r (+) { add(int) . p & { add(int) . t }, sub(int) . p & { add(int) . t } }";

inline GlobalPtr ring() { return parse_global(kRingSrc); }
inline LocalPtr t_p() { return parse_local(kTP); }
inline LocalPtr t_q() { return parse_local(kTQ); }
inline LocalPtr t_r() { return parse_local(kTR); }
inline LocalPtr topt_q() { return parse_local(kToptQ); }

// The ring state with p ~> q add(int) at the head (after p's send).
inline GlobalPtr ring_after_send() {
  return parse_global(
      "p ~> q { add(int) . q -> r { add(int) . r -> p { add(int) . " +
      std::string(kRingSrc) + " }, sub(int) . r -> p { sub(int) . " + kRingSrc +
      " } } }");
}

// Non-deterministic protocol: q relays p's choice to r; one branch adds a
// final p -> r message.
inline GlobalPtr nondet() {
  return parse_global(
      "rec t . p -> q { l1 . q -> r { l1 . t }, l2 . q -> r { l2 . p -> r { l . end } } }");
}

inline Role R(const std::string& name) { return Role{name}; }
inline Label L(const std::string& name) { return Label{name}; }

}  // namespace mpst::testutil

#endif  // MPST_TESTS_TESTUTIL_HPP_
