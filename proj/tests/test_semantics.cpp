// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <map>

#include "mpst/graph.hpp"
#include "mpst/print.hpp"
#include "mpst/semantics.hpp"
#include "testutil.hpp"

using namespace mpst;
using namespace mpst::testutil;

namespace {

ActionLabel send(const char* s, const char* p, const char* l, Sort sort = Sort::Int) {
  return ActionLabel{ActionLabel::Kind::Send, R(s), R(p), L(l), sort};
}
ActionLabel recv(const char* s, const char* p, const char* l, Sort sort = Sort::Int) {
  return ActionLabel{ActionLabel::Kind::Receive, R(s), R(p), L(l), sort};
}

GlobalPtr step_via(const GlobalPtr& g, const ActionLabel& l) {
  auto matches = global_step_matching(g, l, {8, true});
  REQUIRE_MESSAGE(!matches.empty(), "no transition " << show(l));
  return matches.front();
}

TypingContext ring_context() {
  return parse_context("p : (<>, " + std::string(kTP) + "), q : (<>, " + kToptQ +
                       "), r : (<>, " + kTR + ")");
}

TypingContext ctx_step_via(const TypingContext& ctx, const ActionLabel& l) {
  for (const auto& step : context_transitions(ctx))
    if (step.label == l) return step.next;
  FAIL("no context transition " << show(l) << " from\n" << print_context(ctx));
  return ctx;
}

}  // namespace

TEST_CASE("label subjects and refinement") {
  CHECK(label_subject(send("p", "q", "l")) == R("p"));
  CHECK(label_subject(recv("p", "q", "l")) == R("p"));
  CHECK(label_leq(send("p", "q", "l", Sort::Int), send("p", "q", "l", Sort::Real)));
  CHECK_FALSE(label_leq(send("p", "q", "l", Sort::Real), send("p", "q", "l", Sort::Int)));
  CHECK(label_leq(recv("p", "q", "l", Sort::Real), recv("p", "q", "l", Sort::Int)));
  CHECK_FALSE(label_leq(recv("p", "q", "l", Sort::Int), recv("p", "q", "l", Sort::Real)));
  CHECK(label_leq(send("p", "q", "l"), send("p", "q", "l")));
  CHECK_FALSE(label_leq(send("p", "q", "l"), send("p", "r", "l")));
  CHECK_FALSE(label_leq(send("p", "q", "l"), recv("p", "q", "l")));
}

TEST_CASE("terminated global types have no transitions") {
  CHECK(global_transitions(g_end()).empty());
  CHECK(global_step_matching(g_end(), send("p", "q", "l")).empty());
}

TEST_CASE("the ring's first send") {
  auto steps = global_transitions(ring());
  bool found = false;
  for (const auto& s : steps)
    if (s.label == send("p", "q", "add") && bisimilar(s.next, ring_after_send()))
      found = true;
  CHECK(found);
}

TEST_CASE("sends under an en-route head") {
  // q's relayed send proceeds while p's message is still travelling.
  auto matches = global_step_matching(ring_after_send(), send("q", "r", "sub"), {8, true});
  REQUIRE_FALSE(matches.empty());
  GlobalPtr expected = parse_global(
      "p ~> q { add(int) . q ~> r { sub(int) . r -> p { sub(int) . " +
      std::string(kRingSrc) + " } } }");
  bool found = false;
  for (const auto& m : matches)
    if (bisimilar(m, expected)) found = true;
  CHECK(found);
}

TEST_CASE("the six-step global round trip of the ring") {
  GlobalPtr g = ring();
  g = step_via(g, send("p", "q", "add"));
  g = step_via(g, send("q", "r", "sub"));
  g = step_via(g, recv("q", "p", "add"));
  g = step_via(g, recv("r", "q", "sub"));
  g = step_via(g, send("r", "p", "sub"));
  g = step_via(g, recv("p", "r", "sub"));
  CHECK(bisimilar(g, ring()));
}

TEST_CASE("no receive overtakes the pending head message") {
  // Under p ~> q, no enumerated label lets q receive anything else from p.
  GlobalPtr g = parse_global(
      "p ~> q { a(int) . p -> q { b(int) . end } }");
  for (const auto& s : global_transitions(g, {8, true})) {
    if (s.label.kind == ActionLabel::Kind::Receive && s.label.subject == R("q") &&
        s.label.peer == R("p"))
      CHECK(s.label.label == L("a"));
  }
}

TEST_CASE("third-party actions are anticipated across every branch") {
  // A receive by s is available in both branches of the head choice and may
  // fire first, preserving the choice.
  GlobalPtr g = parse_global(
      "p -> q { a . r ~> s { m . end }, b . r ~> s { m . end } }");
  bool found = false;
  for (const auto& step : global_transitions(g, {4, true})) {
    if (step.label == recv("s", "r", "m", Sort::Unit)) {
      found = true;
      CHECK(bisimilar(step.next, parse_global("p -> q { a . end, b . end }")));
    }
  }
  CHECK(found);

  // If only one branch offers the action, it cannot be anticipated.
  GlobalPtr half = parse_global(
      "p -> q { a . r ~> s { m . end }, b . end }");
  for (const auto& step : global_transitions(half, {4, true}))
    CHECK(step.label != recv("s", "r", "m", Sort::Unit));
}

TEST_CASE("the head sender's own actions are never anticipated") {
  // p -> q guards later p-subject actions (except sends to third parties).
  GlobalPtr g = parse_global("p -> q { a(int) . p -> q { b(int) . end } }");
  for (const auto& s : global_transitions(g, {8, true})) {
    if (label_subject(s.label) == R("p") && s.label.label == L("b"))
      FAIL("anticipated " << show(s.label));
  }
}

TEST_CASE("non-determinism of send anticipation") {
  auto matches = global_step_matching(nondet(), send("p", "r", "l", Sort::Unit), {8, true});
  REQUIRE(matches.size() >= 2);
  // At least two non-bisimilar results.
  bool distinct = false;
  for (size_t i = 0; i < matches.size(); ++i)
    for (size_t j = i + 1; j < matches.size(); ++j)
      if (!bisimilar(matches[i], matches[j])) distinct = true;
  CHECK(distinct);

  // The two canonical successors: committing to the exit branch alone, and
  // keeping both branches with the next round narrowed.
  GlobalPtr committed = parse_global(
      "p -> q { l2 . q -> r { l2 . p ~> r { l . end } } }");
  GlobalPtr deferred = parse_global(
      "p -> q { l1 . q -> r { l1 . p -> q { l2 . q -> r { l2 . p ~> r { l . end } } } }, "
      "l2 . q -> r { l2 . p ~> r { l . end } } }");
  bool found_committed = false, found_deferred = false;
  for (const auto& m : matches) {
    if (bisimilar(m, committed)) found_committed = true;
    if (bisimilar(m, deferred)) found_deferred = true;
  }
  CHECK(found_committed);
  CHECK(found_deferred);
}

TEST_CASE("maximal-only enumeration stays deterministic per label") {
  auto matches = global_step_matching(nondet(), send("p", "r", "l", Sort::Unit), {8, false});
  CHECK(matches.size() == 1);
}

TEST_CASE("local type transitions") {
  auto tq = local_transitions(t_q());
  REQUIRE(tq.size() == 1);
  CHECK(tq[0].action == LocalAction{R("p"), false, L("add"), Sort::Int});

  auto topt = local_transitions(topt_q());
  REQUIRE(topt.size() == 2);
  CHECK(topt[0].action.send);
  CHECK(topt[0].action.peer == R("r"));

  CHECK(local_transitions(l_end()).empty());
}

TEST_CASE("context transitions of the optimised ring") {
  TypingContext g0 = ring_context();
  auto steps = context_transitions(g0);
  // Both sends are enabled initially: p to q, and q (optimised) to r.
  std::set<std::string> labels;
  for (const auto& s : steps) labels.insert(show(s.label));
  CHECK(labels.count("p!q:add(int)"));
  CHECK(labels.count("q!r:add(int)"));
  CHECK(labels.count("q!r:sub(int)"));
  CHECK(labels.size() == 3);
}

TEST_CASE("the six-step context round trip of the optimised ring") {
  TypingContext g0 = ring_context();
  std::string initial = context_key(g0);
  TypingContext cur = g0;
  cur = ctx_step_via(cur, send("p", "q", "add"));
  cur = ctx_step_via(cur, send("q", "r", "sub"));
  cur = ctx_step_via(cur, recv("q", "p", "add"));
  cur = ctx_step_via(cur, recv("r", "q", "sub"));
  cur = ctx_step_via(cur, send("r", "p", "sub"));
  cur = ctx_step_via(cur, recv("p", "r", "sub"));
  CHECK(context_key(cur) == initial);
}

TEST_CASE("finished contexts have no transitions") {
  CHECK(context_transitions(parse_context("p : (<>, end), q : (<>, end)")).empty());
}

TEST_CASE("context transitions consume buried heads after commutation") {
  // The first message to r hides behind one to s; receiving it is allowed.
  TypingContext ctx = parse_context(
      "p : (<s, x(int)> . <r, l(int)>, end), "
      "r : (<>, p & { l(int) . end }), "
      "s : (<>, p & { x(int) . end })");
  bool found = false;
  for (const auto& s : context_transitions(ctx))
    if (s.label == recv("r", "p", "l")) found = true;
  CHECK(found);
}

TEST_CASE("contexts step deterministically per label") {
  TypingContext cur = ring_context();
  for (int i = 0; i < 20; ++i) {
    auto steps = context_transitions(cur);
    if (steps.empty()) break;
    std::map<std::string, std::set<std::string>> per_label;
    for (const auto& s : steps)
      per_label[show(s.label)].insert(context_key(s.next));
    for (const auto& [label, nexts] : per_label) CHECK(nexts.size() == 1);
    cur = steps[i % steps.size()].next;
  }
}

TEST_CASE("received payloads respect the ground order") {
  TypingContext ctx = parse_context(
      "p : (<q, l(int)>, end), q : (<>, p & { l(real) . end })");
  bool found = false;
  for (const auto& s : context_transitions(ctx))
    if (s.label.kind == ActionLabel::Kind::Receive) found = true;
  CHECK(found);

  TypingContext bad = parse_context(
      "p : (<q, l(real)>, end), q : (<>, p & { l(int) . end })");
  for (const auto& s : context_transitions(bad))
    CHECK(s.label.kind != ActionLabel::Kind::Receive);
}
