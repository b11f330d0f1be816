// SPDX-License-Identifier: Apache-2.0

#include "mpst/core.hpp"

#include <algorithm>
#include <map>

namespace mpst {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Int: return "int";
    case Sort::Bool: return "bool";
    case Sort::Real: return "real";
    case Sort::Unit: return "unit";
  }
  return "?";
}

std::optional<Sort> sort_from_name(const std::string& name) {
  if (name == "int") return Sort::Int;
  if (name == "bool") return Sort::Bool;
  if (name == "real") return Sort::Real;
  if (name == "unit") return Sort::Unit;
  return std::nullopt;
}

bool ground_subtype(Sort s1, Sort s2) {
  if (s1 == s2) return true;
  return s1 == Sort::Int && s2 == Sort::Real;
}

// ---------------------------------------------------------------------------

GlobalPtr g_end() {
  auto g = std::make_shared<GlobalType>();
  g->kind = GlobalType::Kind::End;
  return g;
}

GlobalPtr g_var(std::string name) {
  auto g = std::make_shared<GlobalType>();
  g->kind = GlobalType::Kind::Var;
  g->var = std::move(name);
  return g;
}

GlobalPtr g_rec(std::string name, GlobalPtr body) {
  auto g = std::make_shared<GlobalType>();
  g->kind = GlobalType::Kind::Rec;
  g->var = std::move(name);
  g->body = std::move(body);
  return g;
}

GlobalPtr g_comm(Role from, Role to, std::vector<GBranch> branches) {
  auto g = std::make_shared<GlobalType>();
  g->kind = GlobalType::Kind::Comm;
  g->from = std::move(from);
  g->to = std::move(to);
  g->branches = std::move(branches);
  return g;
}

GlobalPtr g_enroute(Role from, Role to, Label label, Sort sort, GlobalPtr cont) {
  auto g = std::make_shared<GlobalType>();
  g->kind = GlobalType::Kind::EnRoute;
  g->from = std::move(from);
  g->to = std::move(to);
  g->branches.push_back(GBranch{std::move(label), sort, std::move(cont)});
  return g;
}

LocalPtr l_end() {
  auto t = std::make_shared<LocalType>();
  t->kind = LocalType::Kind::End;
  return t;
}

LocalPtr l_var(std::string name) {
  auto t = std::make_shared<LocalType>();
  t->kind = LocalType::Kind::Var;
  t->var = std::move(name);
  return t;
}

LocalPtr l_rec(std::string name, LocalPtr body) {
  auto t = std::make_shared<LocalType>();
  t->kind = LocalType::Kind::Rec;
  t->var = std::move(name);
  t->body = std::move(body);
  return t;
}

LocalPtr l_branch(Role peer, std::vector<LBranch> branches) {
  auto t = std::make_shared<LocalType>();
  t->kind = LocalType::Kind::Branch;
  t->peer = std::move(peer);
  t->branches = std::move(branches);
  return t;
}

LocalPtr l_select(Role peer, std::vector<LBranch> branches) {
  auto t = std::make_shared<LocalType>();
  t->kind = LocalType::Kind::Select;
  t->peer = std::move(peer);
  t->branches = std::move(branches);
  return t;
}

// ---------------------------------------------------------------------------
// Queues

QueueType normalize_queue(const QueueType& h) {
  QueueType out = h;
  std::stable_sort(out.begin(), out.end(),
                   [](const QueueEntry& a, const QueueEntry& b) {
                     return a.dest.name < b.dest.name;
                   });
  return out;
}

bool queue_equiv(const QueueType& h1, const QueueType& h2) {
  return normalize_queue(h1) == normalize_queue(h2);
}

bool queue_subtype(const QueueType& h1, const QueueType& h2) {
  QueueType a = normalize_queue(h1);
  QueueType b = normalize_queue(h2);
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].dest != b[i].dest || a[i].label != b[i].label) return false;
    if (!ground_subtype(a[i].sort, b[i].sort)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_labels_distinct(const std::vector<GBranch>& bs, const SourceSpan& sp) {
  std::set<Label> seen;
  for (const auto& b : bs)
    if (!seen.insert(b.label).second)
      throw WellformednessError("duplicate label '" + b.label.name + "' in choice", sp);
}

void check_labels_distinct(const std::vector<LBranch>& bs, const SourceSpan& sp) {
  std::set<Label> seen;
  for (const auto& b : bs)
    if (!seen.insert(b.label).second)
      throw WellformednessError("duplicate label '" + b.label.name + "' in choice", sp);
}

// bound: variables in scope; guarded: variables already under a prefix.
void validate_g(const GlobalPtr& g, std::set<std::string> bound,
                std::set<std::string> guarded) {
  switch (g->kind) {
    case GlobalType::Kind::End:
      return;
    case GlobalType::Kind::Var:
      if (!bound.count(g->var))
        throw WellformednessError("unbound recursion variable '" + g->var + "'", g->span);
      if (!guarded.count(g->var))
        throw WellformednessError("unguarded recursion variable '" + g->var + "'", g->span);
      return;
    case GlobalType::Kind::Rec: {
      bound.insert(g->var);
      guarded.erase(g->var);
      validate_g(g->body, bound, guarded);
      return;
    }
    case GlobalType::Kind::Comm: {
      if (g->from == g->to)
        throw WellformednessError("self-communication at role '" + g->from.name + "'", g->span);
      if (g->branches.empty())
        throw WellformednessError("empty choice", g->span);
      check_labels_distinct(g->branches, g->span);
      for (const auto& n : bound) guarded.insert(n);
      for (const auto& b : g->branches) validate_g(b.cont, bound, guarded);
      return;
    }
    case GlobalType::Kind::EnRoute: {
      if (g->from == g->to)
        throw WellformednessError("self-communication at role '" + g->from.name + "'", g->span);
      for (const auto& n : bound) guarded.insert(n);
      validate_g(g->branches[0].cont, bound, guarded);
      return;
    }
  }
}

void validate_l(const LocalPtr& t, std::set<std::string> bound,
                std::set<std::string> guarded) {
  switch (t->kind) {
    case LocalType::Kind::End:
      return;
    case LocalType::Kind::Var:
      if (!bound.count(t->var))
        throw WellformednessError("unbound recursion variable '" + t->var + "'", t->span);
      if (!guarded.count(t->var))
        throw WellformednessError("unguarded recursion variable '" + t->var + "'", t->span);
      return;
    case LocalType::Kind::Rec: {
      bound.insert(t->var);
      guarded.erase(t->var);
      validate_l(t->body, bound, guarded);
      return;
    }
    case LocalType::Kind::Branch:
    case LocalType::Kind::Select: {
      if (t->branches.empty())
        throw WellformednessError("empty choice", t->span);
      check_labels_distinct(t->branches, t->span);
      for (const auto& n : bound) guarded.insert(n);
      for (const auto& b : t->branches) validate_l(b.cont, bound, guarded);
      return;
    }
  }
}

bool closed_g(const GlobalPtr& g, std::set<std::string>& bound) {
  switch (g->kind) {
    case GlobalType::Kind::End: return true;
    case GlobalType::Kind::Var: return bound.count(g->var) > 0;
    case GlobalType::Kind::Rec: {
      bool fresh = bound.insert(g->var).second;
      bool ok = closed_g(g->body, bound);
      if (fresh) bound.erase(g->var);
      return ok;
    }
    case GlobalType::Kind::Comm:
    case GlobalType::Kind::EnRoute: {
      for (const auto& b : g->branches)
        if (!closed_g(b.cont, bound)) return false;
      return true;
    }
  }
  return true;
}

bool closed_l(const LocalPtr& t, std::set<std::string>& bound) {
  switch (t->kind) {
    case LocalType::Kind::End: return true;
    case LocalType::Kind::Var: return bound.count(t->var) > 0;
    case LocalType::Kind::Rec: {
      bool fresh = bound.insert(t->var).second;
      bool ok = closed_l(t->body, bound);
      if (fresh) bound.erase(t->var);
      return ok;
    }
    case LocalType::Kind::Branch:
    case LocalType::Kind::Select: {
      for (const auto& b : t->branches)
        if (!closed_l(b.cont, bound)) return false;
      return true;
    }
  }
  return true;
}

}  // namespace

void validate_global(const GlobalPtr& g) { validate_g(g, {}, {}); }
void validate_local(const LocalPtr& t) { validate_l(t, {}, {}); }

bool is_closed_global(const GlobalPtr& g) {
  std::set<std::string> bound;
  return closed_g(g, bound);
}

bool is_closed_local(const LocalPtr& t) {
  std::set<std::string> bound;
  return closed_l(t, bound);
}

// ---------------------------------------------------------------------------
// Substitution and unfolding

namespace {

GlobalPtr subst_g(const GlobalPtr& g, const std::string& var, const GlobalPtr& repl) {
  switch (g->kind) {
    case GlobalType::Kind::End:
      return g;
    case GlobalType::Kind::Var:
      return g->var == var ? repl : g;
    case GlobalType::Kind::Rec:
      if (g->var == var) return g;  // shadowed
      return g_rec(g->var, subst_g(g->body, var, repl));
    case GlobalType::Kind::Comm: {
      std::vector<GBranch> bs;
      bs.reserve(g->branches.size());
      for (const auto& b : g->branches)
        bs.push_back(GBranch{b.label, b.sort, subst_g(b.cont, var, repl)});
      return g_comm(g->from, g->to, std::move(bs));
    }
    case GlobalType::Kind::EnRoute: {
      const auto& b = g->branches[0];
      return g_enroute(g->from, g->to, b.label, b.sort, subst_g(b.cont, var, repl));
    }
  }
  return g;
}

LocalPtr subst_l(const LocalPtr& t, const std::string& var, const LocalPtr& repl) {
  switch (t->kind) {
    case LocalType::Kind::End:
      return t;
    case LocalType::Kind::Var:
      return t->var == var ? repl : t;
    case LocalType::Kind::Rec:
      if (t->var == var) return t;
      return l_rec(t->var, subst_l(t->body, var, repl));
    case LocalType::Kind::Branch:
    case LocalType::Kind::Select: {
      std::vector<LBranch> bs;
      bs.reserve(t->branches.size());
      for (const auto& b : t->branches)
        bs.push_back(LBranch{b.label, b.sort, subst_l(b.cont, var, repl)});
      return t->kind == LocalType::Kind::Branch ? l_branch(t->peer, std::move(bs))
                                                : l_select(t->peer, std::move(bs));
    }
  }
  return t;
}

}  // namespace

GlobalPtr unfold_global(const GlobalPtr& g) {
  GlobalPtr cur = g;
  while (cur->kind == GlobalType::Kind::Rec)
    cur = subst_g(cur->body, cur->var, cur);
  return cur;
}

LocalPtr unfold_local(const LocalPtr& t) {
  LocalPtr cur = t;
  while (cur->kind == LocalType::Kind::Rec)
    cur = subst_l(cur->body, cur->var, cur);
  return cur;
}

// ---------------------------------------------------------------------------
// Role functions

namespace {

void role_sets_rec(const GlobalPtr& g, RoleSets& out) {
  switch (g->kind) {
    case GlobalType::Kind::End:
    case GlobalType::Kind::Var:
      return;
    case GlobalType::Kind::Rec:
      role_sets_rec(g->body, out);
      return;
    case GlobalType::Kind::Comm:
      out.roles.insert(g->from);
      out.roles.insert(g->to);
      out.aroles.insert(g->from);
      out.aroles.insert(g->to);
      for (const auto& b : g->branches) role_sets_rec(b.cont, out);
      return;
    case GlobalType::Kind::EnRoute:
      out.roles.insert(g->from);
      out.roles.insert(g->to);
      out.sroles.insert(g->from);
      out.aroles.insert(g->to);
      out.mroles.insert({g->from, g->to});
      role_sets_rec(g->branches[0].cont, out);
      return;
  }
}

}  // namespace

RoleSets role_sets(const GlobalPtr& g) {
  RoleSets out;
  role_sets_rec(g, out);
  return out;
}

// ---------------------------------------------------------------------------
// Structural equality

bool structurally_equal(const GlobalPtr& a, const GlobalPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case GlobalType::Kind::End:
      return true;
    case GlobalType::Kind::Var:
      return a->var == b->var;
    case GlobalType::Kind::Rec:
      return a->var == b->var && structurally_equal(a->body, b->body);
    case GlobalType::Kind::Comm:
    case GlobalType::Kind::EnRoute: {
      if (a->from != b->from || a->to != b->to) return false;
      if (a->branches.size() != b->branches.size()) return false;
      // Branch maps compare as unordered maps keyed by label.
      std::map<Label, std::pair<Sort, GlobalPtr>> am, bm;
      for (const auto& x : a->branches) am[x.label] = {x.sort, x.cont};
      for (const auto& x : b->branches) bm[x.label] = {x.sort, x.cont};
      if (am.size() != bm.size()) return false;
      for (const auto& [lbl, v] : am) {
        auto it = bm.find(lbl);
        if (it == bm.end() || it->second.first != v.first) return false;
        if (!structurally_equal(v.second, it->second.second)) return false;
      }
      return true;
    }
  }
  return false;
}

bool structurally_equal(const LocalPtr& a, const LocalPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case LocalType::Kind::End:
      return true;
    case LocalType::Kind::Var:
      return a->var == b->var;
    case LocalType::Kind::Rec:
      return a->var == b->var && structurally_equal(a->body, b->body);
    case LocalType::Kind::Branch:
    case LocalType::Kind::Select: {
      if (a->peer != b->peer) return false;
      if (a->branches.size() != b->branches.size()) return false;
      std::map<Label, std::pair<Sort, LocalPtr>> am, bm;
      for (const auto& x : a->branches) am[x.label] = {x.sort, x.cont};
      for (const auto& x : b->branches) bm[x.label] = {x.sort, x.cont};
      if (am.size() != bm.size()) return false;
      for (const auto& [lbl, v] : am) {
        auto it = bm.find(lbl);
        if (it == bm.end() || it->second.first != v.first) return false;
        if (!structurally_equal(v.second, it->second.second)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace mpst
