// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "mpst/association.hpp"
#include "mpst/print.hpp"
#include "mpst/wellformed.hpp"
#include "testutil.hpp"

using namespace mpst;
using namespace mpst::testutil;

namespace {

TypingContext ring_context() {
  return parse_context("p : (<>, " + std::string(kTP) + "), q : (<>, " + kToptQ +
                       "), r : (<>, " + kTR + ")");
}

// A context whose head action belongs to a different participant than the
// global head's receiver: the en-route message to q hides behind q's
// receive from r.
TypingContext swapped_receives_context() {
  return parse_context(
      "p : (<q, l>, end), "
      "q : (<>, r & { l2 . p & { l . end } }), "
      "r : (<>, q (+) { l2 . end })");
}

GlobalPtr swapped_receives_global() {
  return parse_global("p ~> q { l . r -> q { l2 . end } }");
}

}  // namespace

TEST_CASE("the optimised ring context is associated") {
  CHECK(associated(ring_context(), ring(), 2) == Verdict3::Yes);
}

TEST_CASE("exact projections are associated") {
  for (const auto& g : {ring(), ring_after_send(), nondet()}) {
    TypingContext ctx;
    for (const Role& r : role_sets(g).roles) {
      auto proj = project(g, r);
      REQUIRE(proj.has_value());
      ctx.entries[r] = TypingContext::Entry{proj->queue, proj->local};
    }
    CHECK(associated(ctx, g, 2) == Verdict3::Yes);
  }
}

TEST_CASE("association with permuted receives and a pending message") {
  CHECK(associated(swapped_receives_context(), swapped_receives_global(), 2) ==
        Verdict3::Yes);
}

TEST_CASE("association failures") {
  // Missing role.
  TypingContext missing = parse_context("p : (<>, " + std::string(kTP) + ")");
  CHECK(associated(missing, ring(), 2) == Verdict3::No);

  // A type that is not a subtype of its projection.
  TypingContext wrong = ring_context();
  wrong.entries[R("q")].type = l_end();
  CHECK(associated(wrong, ring(), 2) == Verdict3::No);

  // A queue the projection does not justify.
  TypingContext extra = ring_context();
  extra.entries[R("p")].queue.push_back(QueueEntry{R("q"), L("add"), Sort::Int});
  CHECK(associated(extra, ring(), 2) == Verdict3::No);

  // Precondition violation.
  GlobalPtr unbalanced = parse_global("rec t . p -> q { l0 . t, l1 . p -> r { l . end } }");
  CHECK_THROWS_AS(associated(ring_context(), unbalanced, 2), WellformednessError);
}

TEST_CASE("completeness probe on the ring") {
  ProbeOptions opts;
  opts.steps = 60;
  auto report = completeness_probe(ring_context(), ring(), opts);
  CHECK(report.verdict == ProbeReport::Verdict::Pass);
  CHECK(report.violations.empty());
  CHECK(report.steps_checked >= 30);
}

TEST_CASE("completeness probe on an empty protocol") {
  auto report = completeness_probe(TypingContext{}, g_end(), ProbeOptions{});
  CHECK(report.verdict == ProbeReport::Verdict::Pass);
  CHECK(report.steps_checked == 0);
}

TEST_CASE("completeness probe across a narrowed send choice") {
  // A finite sender that commits to the l2 exit after one l1 round; matching
  // its first step needs a non-maximal branch subset globally.
  TypingContext ctx = parse_context(
      "p : (<>, r (+) { l . q (+) { l1 . q (+) { l2 . end } } }), "
      "q : (<>, rec t . p & { l1 . r (+) { l1 . t }, l2 . r (+) { l2 . end } }), "
      "r : (<>, rec t . q & { l1 . t, l2 . p & { l . end } })");
  ProbeOptions opts;
  opts.steps = 80;
  auto report = completeness_probe(ctx, nondet(), opts);
  CHECK(report.verdict == ProbeReport::Verdict::Pass);
  CHECK(report.violations.empty());
}

TEST_CASE("soundness probe on the ring") {
  ProbeOptions opts;
  opts.steps = 40;
  auto report = soundness_probe(ring_context(), ring(), opts);
  CHECK(report.verdict == ProbeReport::Verdict::Pass);
  CHECK(report.steps_checked >= 40);
}

TEST_CASE("soundness probe passes vacuously without global moves") {
  TypingContext done = parse_context("p : (<>, end)");
  auto report = soundness_probe(done, g_end(), ProbeOptions{});
  CHECK(report.verdict == ProbeReport::Verdict::Pass);
  CHECK(report.steps_checked == 0);
}

TEST_CASE("soundness probe may change the acting participant") {
  // The global head is q receiving from p, but the context's q waits on r
  // first; the matched context step is r's send instead.
  TypingContext ctx = swapped_receives_context();
  GlobalPtr g = swapped_receives_global();
  auto ctx_steps = context_transitions(ctx);
  REQUIRE(ctx_steps.size() == 1);
  CHECK(ctx_steps[0].label.subject == R("r"));

  ProbeOptions opts;
  opts.steps = 10;
  auto report = soundness_probe(ctx, g, opts);
  CHECK(report.verdict == ProbeReport::Verdict::Pass);
}

TEST_CASE("probe labels refine pairwise") {
  // Each matched pair in the completeness walk satisfies the label order by
  // construction; spot-check with a payload-widened context.
  TypingContext ctx = parse_context(
      "p : (<>, q (+) { l(int) . end }), q : (<>, p & { l(real) . end })");
  GlobalPtr g = parse_global("p -> q { l(real) . end }");
  CHECK(associated(ctx, g, 2) == Verdict3::Yes);
  ProbeOptions opts;
  opts.steps = 10;
  CHECK(completeness_probe(ctx, g, opts).verdict == ProbeReport::Verdict::Pass);
}
