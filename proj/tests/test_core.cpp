// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>

#include "mpst/core.hpp"
#include "mpst/graph.hpp"
#include "mpst/print.hpp"
#include "testutil.hpp"

using namespace mpst;
using namespace mpst::testutil;

TEST_CASE("ground subtyping is the reflexive order with int <: real") {
  CHECK(ground_subtype(Sort::Int, Sort::Real));
  CHECK(ground_subtype(Sort::Bool, Sort::Bool));
  CHECK_FALSE(ground_subtype(Sort::Real, Sort::Int));
  CHECK_FALSE(ground_subtype(Sort::Int, Sort::Bool));
  // Partial order: antisymmetry and transitivity over the closed sort set.
  const Sort sorts[] = {Sort::Int, Sort::Bool, Sort::Real, Sort::Unit};
  for (Sort a : sorts)
    for (Sort b : sorts) {
      if (ground_subtype(a, b) && ground_subtype(b, a)) CHECK(a == b);
      for (Sort c : sorts)
        if (ground_subtype(a, b) && ground_subtype(b, c)) CHECK(ground_subtype(a, c));
    }
}

TEST_CASE("unfolding global types") {
  GlobalPtr g = ring();
  GlobalPtr u = unfold_global(g);
  CHECK(u->kind == GlobalType::Kind::Comm);
  CHECK(u->from.name == "p");
  CHECK(u->to.name == "q");
  CHECK(bisimilar(g, u));

  CHECK(unfold_global(g_end())->kind == GlobalType::Kind::End);

  GlobalPtr simple = parse_global("rec t . p -> q { l(int) . t }");
  GlobalPtr su = unfold_global(simple);
  REQUIRE(su->kind == GlobalType::Kind::Comm);
  CHECK(su->branches[0].cont->kind == GlobalType::Kind::Rec);
  CHECK(structurally_equal(su->branches[0].cont, simple));
}

TEST_CASE("unfolding local types") {
  LocalPtr t = parse_local("rec t . p & { l(int) . t }");
  LocalPtr u = unfold_local(t);
  REQUIRE(u->kind == LocalType::Kind::Branch);
  CHECK(structurally_equal(u->branches[0].cont, t));
  CHECK(unfold_local(l_end())->kind == LocalType::Kind::End);

  LocalPtr tp = unfold_local(t_p());
  CHECK(tp->kind == LocalType::Kind::Select);
  CHECK(tp->peer.name == "q");
}

TEST_CASE("role sets of the ring protocol") {
  RoleSets rs = role_sets(ring());
  CHECK(rs.roles == std::set<Role>{R("p"), R("q"), R("r")});
  CHECK(rs.aroles == rs.roles);
  CHECK(rs.sroles.empty());
  CHECK(rs.mroles.empty());

  RoleSets after = role_sets(ring_after_send());
  CHECK(after.sroles == std::set<Role>{R("p")});
  CHECK(after.mroles == std::set<std::pair<Role, Role>>{{R("p"), R("q")}});
  CHECK(after.aroles == std::set<Role>{R("p"), R("q"), R("r")});

  CHECK(role_sets(g_end()) == RoleSets{});
}

TEST_CASE("role sets are invariant under unfolding") {
  for (const char* src : {kRingSrc, "rec t . a -> b { x . b -> c { y(bool) . t } }"}) {
    GlobalPtr g = parse_global(src);
    CHECK(role_sets(g) == role_sets(unfold_global(g)));
  }
}

TEST_CASE("queue normalization and equivalence") {
  QueueType h1{{R("q"), L("l"), Sort::Int}, {R("p"), L("l2"), Sort::Int}};
  QueueType h2{{R("p"), L("l2"), Sort::Int}, {R("q"), L("l"), Sort::Int}};
  CHECK(normalize_queue(h1) == h2);  // p sorts before q
  CHECK(queue_equiv(h1, h2));

  QueueType same_dest{{R("q"), L("l"), Sort::Int}, {R("q"), L("l2"), Sort::Int}};
  QueueType swapped{{R("q"), L("l2"), Sort::Int}, {R("q"), L("l"), Sort::Int}};
  CHECK(normalize_queue(same_dest) == same_dest);
  CHECK_FALSE(queue_equiv(same_dest, swapped));

  CHECK(queue_equiv(QueueType{}, QueueType{}));
  CHECK(queue_equiv(h1, h1));
}

namespace {

// Brute-force closure of the commutation rules: all queues reachable by
// swapping adjacent messages with distinct destinations.
std::set<std::string> equivalence_class(const QueueType& q) {
  auto render = [](const QueueType& h) {
    std::string out;
    for (const auto& m : h) out += m.dest.name + ":" + m.label.name + ":" + sort_name(m.sort) + ";";
    return out;
  };
  std::set<std::string> seen{render(q)};
  std::vector<QueueType> work{q};
  while (!work.empty()) {
    QueueType cur = work.back();
    work.pop_back();
    for (size_t i = 0; i + 1 < cur.size(); ++i) {
      if (cur[i].dest == cur[i + 1].dest) continue;
      QueueType next = cur;
      std::swap(next[i], next[i + 1]);
      if (seen.insert(render(next)).second) work.push_back(next);
    }
  }
  return seen;
}

QueueType random_queue(std::mt19937& rng) {
  const char* roles[] = {"a", "b", "c"};
  const char* labels[] = {"x", "y"};
  const Sort sorts[] = {Sort::Int, Sort::Bool, Sort::Unit};
  QueueType q;
  size_t n = rng() % 7;
  for (size_t i = 0; i < n; ++i)
    q.push_back(QueueEntry{Role{roles[rng() % 3]}, Label{labels[rng() % 2]},
                           sorts[rng() % 3]});
  return q;
}

}  // namespace

TEST_CASE("queue equivalence agrees with the brute-force commutation closure") {
  std::mt19937 rng(7);
  for (int round = 0; round < 300; ++round) {
    QueueType a = random_queue(rng);
    QueueType b = random_queue(rng);
    bool brute = equivalence_class(a).count([&] {
      std::string out;
      for (const auto& m : b) out += m.dest.name + ":" + m.label.name + ":" + sort_name(m.sort) + ";";
      return out;
    }()) > 0;
    CHECK(queue_equiv(a, b) == brute);
    // Idempotence and reflexivity of the normal form.
    CHECK(normalize_queue(normalize_queue(a)) == normalize_queue(a));
    CHECK(queue_equiv(a, normalize_queue(a)));
  }
}

TEST_CASE("queue subtyping is covariant in payload sorts") {
  QueueType lo{{R("q"), L("l"), Sort::Int}};
  QueueType hi{{R("q"), L("l"), Sort::Real}};
  CHECK(queue_subtype(lo, hi));
  CHECK_FALSE(queue_subtype(hi, lo));
  CHECK(queue_subtype(QueueType{}, QueueType{}));
  QueueType other{{R("q"), L("m"), Sort::Int}};
  CHECK_FALSE(queue_subtype(lo, other));
}

TEST_CASE("type graphs: construction, loops and bisimilarity") {
  LocalPtr loop = parse_local("rec t . q (+) { l(int) . t }");
  LocalGraph g = graph_of(loop);
  REQUIRE(g.nodes.size() == 1);
  CHECK(g.nodes[0].edges[0].target == 0);

  LocalGraph tp = graph_of(t_p());
  LocalGraph tp_min = minimize(tp);
  CHECK(tp_min.nodes.size() == 2);  // select and the shared branch

  CHECK(bisimilar(graph_of(l_end()), graph_of(l_end())));
  CHECK_FALSE(bisimilar(graph_of(t_p()), graph_of(t_q())));
}

TEST_CASE("unfolding preserves the represented tree") {
  for (const char* src : {kTP, kTQ, kTR, kToptQ}) {
    LocalPtr t = parse_local(src);
    CHECK(bisimilar(t, unfold_local(t)));
  }
  GlobalPtr g = ring();
  CHECK(bisimilar(g, unfold_global(g)));
}

TEST_CASE("graph to AST round trip") {
  for (const char* src : {kTP, kTQ, kToptQ}) {
    LocalPtr t = parse_local(src);
    LocalGraph g = graph_of(t);
    LocalPtr back = local_ast_of(g);
    validate_local(back);
    CHECK(bisimilar(t, back));
  }
  GlobalPtr g = ring_after_send();
  GlobalPtr back = global_ast_of(graph_of(g));
  validate_global(back);
  CHECK(bisimilar(g, back));
}

TEST_CASE("validation rejects malformed types") {
  CHECK_THROWS_AS(validate_global(g_comm(R("p"), R("p"), {GBranch{L("l"), Sort::Unit, g_end()}})),
                  WellformednessError);
  CHECK_THROWS_AS(validate_global(g_rec("t", g_var("t"))), WellformednessError);
  CHECK_THROWS_AS(validate_global(g_var("t")), WellformednessError);
  CHECK_THROWS_AS(
      validate_global(g_comm(R("p"), R("q"),
                             {GBranch{L("l"), Sort::Unit, g_end()},
                              GBranch{L("l"), Sort::Int, g_end()}})),
      WellformednessError);
  CHECK_THROWS_AS(validate_local(l_rec("t", l_var("t"))), WellformednessError);
}

TEST_CASE("canonical keys identify bisimilar graphs") {
  LocalPtr a = t_p();
  LocalPtr b = unfold_local(t_p());
  LocalGraph ga = graph_of(a), gb = graph_of(b);
  CHECK(canonical_key(ga, ga.root) == canonical_key(gb, gb.root));
  LocalGraph gq = graph_of(t_q());
  CHECK(canonical_key(ga, ga.root) != canonical_key(gq, gq.root));
}
