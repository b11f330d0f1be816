// SPDX-License-Identifier: Apache-2.0

#include "mpst/process.hpp"

#include <algorithm>

#include "mpst/association.hpp"
#include "mpst/graph.hpp"
#include "mpst/projection.hpp"
#include "mpst/wellformed.hpp"

namespace mpst {

// ---------------------------------------------------------------------------
// Expressions

namespace {

ExprPtr mk(Expr e) { return std::make_shared<Expr>(std::move(e)); }

}  // namespace

ExprPtr e_int(long long v) {
  Expr e;
  e.kind = Expr::Kind::IntLit;
  e.i = v;
  return mk(std::move(e));
}

ExprPtr e_bool(bool v) {
  Expr e;
  e.kind = Expr::Kind::BoolLit;
  e.b = v;
  return mk(std::move(e));
}

ExprPtr e_unit() {
  Expr e;
  e.kind = Expr::Kind::UnitLit;
  return mk(std::move(e));
}

ExprPtr e_var(std::string name) {
  Expr e;
  e.kind = Expr::Kind::Var;
  e.var = std::move(name);
  return mk(std::move(e));
}

namespace {
ExprPtr binop(Expr::Kind k, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = k;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  return mk(std::move(e));
}
}  // namespace

ExprPtr e_add(ExprPtr a, ExprPtr b) { return binop(Expr::Kind::Add, std::move(a), std::move(b)); }
ExprPtr e_sub(ExprPtr a, ExprPtr b) { return binop(Expr::Kind::Sub, std::move(a), std::move(b)); }
ExprPtr e_less(ExprPtr a, ExprPtr b) { return binop(Expr::Kind::Less, std::move(a), std::move(b)); }
ExprPtr e_eq(ExprPtr a, ExprPtr b) { return binop(Expr::Kind::Eq, std::move(a), std::move(b)); }

ExprPtr e_nondet() {
  Expr e;
  e.kind = Expr::Kind::NondetBool;
  return mk(std::move(e));
}

bool SeedStream::next_bool() {
  // xorshift64*
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return ((state_ * 2685821657736338717ull) >> 63) != 0;
}

std::optional<Value> eval_expr(const ExprPtr& e, const ValueEnv& env, SeedStream& seeds) {
  switch (e->kind) {
    case Expr::Kind::IntLit:
      return Value::of_int(e->i);
    case Expr::Kind::BoolLit:
      return Value::of_bool(e->b);
    case Expr::Kind::UnitLit:
      return Value::unit();
    case Expr::Kind::NondetBool:
      return Value::of_bool(seeds.next_bool());
    case Expr::Kind::Var: {
      auto it = env.find(e->var);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      auto a = eval_expr(e->lhs, env, seeds);
      auto b = eval_expr(e->rhs, env, seeds);
      if (!a || !b || a->sort != Sort::Int || b->sort != Sort::Int) return std::nullopt;
      return Value::of_int(e->kind == Expr::Kind::Add ? a->i + b->i : a->i - b->i);
    }
    case Expr::Kind::Less: {
      auto a = eval_expr(e->lhs, env, seeds);
      auto b = eval_expr(e->rhs, env, seeds);
      if (!a || !b || a->sort != Sort::Int || b->sort != Sort::Int) return std::nullopt;
      return Value::of_bool(a->i < b->i);
    }
    case Expr::Kind::Eq: {
      auto a = eval_expr(e->lhs, env, seeds);
      auto b = eval_expr(e->rhs, env, seeds);
      if (!a || !b || a->sort != b->sort) return std::nullopt;
      return Value::of_bool(*a == *b);
    }
  }
  return std::nullopt;
}

namespace {

// Sorting of expressions; absent when ill-sorted.
std::optional<Sort> sort_expr(const Expr& e, const std::map<std::string, Sort>& env) {
  switch (e.kind) {
    case Expr::Kind::IntLit: return Sort::Int;
    case Expr::Kind::BoolLit: return Sort::Bool;
    case Expr::Kind::UnitLit: return Sort::Unit;
    case Expr::Kind::NondetBool: return Sort::Bool;
    case Expr::Kind::Var: {
      auto it = env.find(e.var);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      auto a = sort_expr(*e.lhs, env), b = sort_expr(*e.rhs, env);
      if (a != Sort::Int || b != Sort::Int) return std::nullopt;
      return Sort::Int;
    }
    case Expr::Kind::Less:
    case Expr::Kind::Eq: {
      auto a = sort_expr(*e.lhs, env), b = sort_expr(*e.rhs, env);
      if (!a || !b || *a != *b) return std::nullopt;
      return Sort::Bool;
    }
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Process constructors and validation

namespace {
ProcessPtr mkp(Process p) { return std::make_shared<Process>(std::move(p)); }
}  // namespace

ProcessPtr p_inact() {
  Process p;
  p.kind = Process::Kind::Inact;
  return mkp(std::move(p));
}

ProcessPtr p_send(Role peer, Label label, ExprPtr expr, ProcessPtr cont) {
  Process p;
  p.kind = Process::Kind::Send;
  p.peer = std::move(peer);
  p.label = std::move(label);
  p.expr = std::move(expr);
  p.cont = std::move(cont);
  return mkp(std::move(p));
}

ProcessPtr p_recv(Role peer, std::vector<RecvClause> clauses) {
  Process p;
  p.kind = Process::Kind::Recv;
  p.peer = std::move(peer);
  p.clauses = std::move(clauses);
  return mkp(std::move(p));
}

ProcessPtr p_if(ExprPtr cond, ProcessPtr then_b, ProcessPtr else_b) {
  Process p;
  p.kind = Process::Kind::If;
  p.expr = std::move(cond);
  p.then_branch = std::move(then_b);
  p.else_branch = std::move(else_b);
  return mkp(std::move(p));
}

ProcessPtr p_rec(std::string var, ProcessPtr body) {
  Process p;
  p.kind = Process::Kind::Rec;
  p.var = std::move(var);
  p.body = std::move(body);
  return mkp(std::move(p));
}

ProcessPtr p_pvar(std::string var) {
  Process p;
  p.kind = Process::Kind::PVar;
  p.var = std::move(var);
  return mkp(std::move(p));
}

namespace {

void validate_p(const ProcessPtr& p, std::set<std::string> bound,
                std::set<std::string> guarded) {
  switch (p->kind) {
    case Process::Kind::Inact:
      return;
    case Process::Kind::PVar:
      if (!bound.count(p->var))
        throw WellformednessError("unbound process variable '" + p->var + "'", p->span);
      if (!guarded.count(p->var))
        throw WellformednessError("unguarded process variable '" + p->var + "'", p->span);
      return;
    case Process::Kind::Rec:
      bound.insert(p->var);
      guarded.erase(p->var);
      validate_p(p->body, bound, guarded);
      return;
    case Process::Kind::Send: {
      for (const auto& n : bound) guarded.insert(n);
      validate_p(p->cont, bound, guarded);
      return;
    }
    case Process::Kind::Recv: {
      std::set<Label> seen;
      for (const auto& c : p->clauses)
        if (!seen.insert(c.label).second)
          throw WellformednessError("duplicate label '" + c.label.name + "' in sum", p->span);
      for (const auto& n : bound) guarded.insert(n);
      for (const auto& c : p->clauses) validate_p(c.cont, bound, guarded);
      return;
    }
    case Process::Kind::If:
      // Conditionals do not guard recursion.
      validate_p(p->then_branch, bound, guarded);
      validate_p(p->else_branch, bound, guarded);
      return;
  }
}

}  // namespace

void validate_process(const ProcessPtr& p) { validate_p(p, {}, {}); }

QueueType type_queue(const RuntimeQueue& h) {
  QueueType out;
  for (const auto& m : h) out.push_back(QueueEntry{m.dest, m.label, m.value.sort});
  return out;
}

// ---------------------------------------------------------------------------
// Typing

namespace {

// Least upper bound under the standard subtyping: selections may widen,
// branchings may narrow, payloads move along the ground order.
std::optional<Sort> sort_lub(Sort a, Sort b) {
  if (a == b) return a;
  if (ground_subtype(a, b)) return b;
  if (ground_subtype(b, a)) return a;
  return std::nullopt;
}

std::optional<Sort> sort_glb(Sort a, Sort b) {
  if (a == b) return a;
  if (ground_subtype(a, b)) return a;
  if (ground_subtype(b, a)) return b;
  return std::nullopt;
}

// Works on possibly open types (inference joins conditional branches inside
// recursion bodies), so this stays on the syntax: selections union their
// labels, branchings intersect, recursion variables must align.
std::optional<LocalPtr> join_types(const LocalPtr& a, const LocalPtr& b,
                                   std::map<std::string, std::string>& var_eq) {
  using K = LocalType::Kind;
  if (a->kind == K::Var || b->kind == K::Var) {
    if (a->kind != K::Var || b->kind != K::Var) return std::nullopt;
    auto it = var_eq.find(b->var);
    std::string rhs = it == var_eq.end() ? b->var : it->second;
    if (a->var != rhs) return std::nullopt;
    return a;
  }
  if (a->kind == K::Rec && b->kind == K::Rec) {
    auto saved = var_eq;
    var_eq[b->var] = a->var;
    auto body = join_types(a->body, b->body, var_eq);
    var_eq = saved;
    if (!body) return std::nullopt;
    return l_rec(a->var, *body);
  }
  if (a->kind == K::Rec || b->kind == K::Rec) return std::nullopt;
  if (a->kind == K::End && b->kind == K::End) return l_end();
  if (a->kind != b->kind || a->peer != b->peer) return std::nullopt;

  if (a->kind == K::Select) {
    std::vector<LBranch> out;
    for (const auto& la : a->branches) {
      const LBranch* rb = nullptr;
      for (const auto& x : b->branches)
        if (x.label == la.label) rb = &x;
      if (!rb) {
        out.push_back(la);
        continue;
      }
      auto s = sort_lub(la.sort, rb->sort);
      auto cont = join_types(la.cont, rb->cont, var_eq);
      if (!s || !cont) return std::nullopt;
      out.push_back(LBranch{la.label, *s, *cont});
    }
    for (const auto& rb : b->branches) {
      bool shared = false;
      for (const auto& x : a->branches)
        if (x.label == rb.label) shared = true;
      if (!shared) out.push_back(rb);
    }
    return l_select(a->peer, std::move(out));
  }

  // Branchings: the common supertype offers only the shared labels.
  std::vector<LBranch> out;
  for (const auto& la : a->branches) {
    for (const auto& rb : b->branches) {
      if (la.label != rb.label) continue;
      auto s = sort_glb(la.sort, rb.sort);
      auto cont = join_types(la.cont, rb.cont, var_eq);
      if (!s || !cont) return std::nullopt;
      out.push_back(LBranch{la.label, *s, *cont});
    }
  }
  if (out.empty()) return std::nullopt;
  return l_branch(a->peer, std::move(out));
}

std::optional<LocalPtr> join_types(const LocalPtr& t1, const LocalPtr& t2) {
  std::map<std::string, std::string> var_eq;
  return join_types(t1, t2, var_eq);
}

struct Inferencer {
  std::map<std::string, Sort> expr_env;

  std::optional<LocalPtr> infer(const ProcessPtr& p,
                                std::map<std::string, std::string>& rec_names,
                                int* fresh) {
    switch (p->kind) {
      case Process::Kind::Inact:
        return l_end();
      case Process::Kind::PVar: {
        auto it = rec_names.find(p->var);
        if (it == rec_names.end()) return std::nullopt;
        return l_var(it->second);
      }
      case Process::Kind::Rec: {
        std::string tv = "t" + std::to_string((*fresh)++);
        rec_names[p->var] = tv;
        auto body = infer(p->body, rec_names, fresh);
        rec_names.erase(p->var);
        if (!body) return std::nullopt;
        return l_rec(tv, *body);
      }
      case Process::Kind::Send: {
        auto s = sort_expr(*p->expr, expr_env);
        if (!s) return std::nullopt;
        auto cont = infer(p->cont, rec_names, fresh);
        if (!cont) return std::nullopt;
        return l_select(p->peer, {LBranch{p->label, *s, *cont}});
      }
      case Process::Kind::Recv: {
        std::vector<LBranch> bs;
        for (const auto& c : p->clauses) {
          auto saved = expr_env;
          expr_env[c.bind_var] = c.bind_sort;
          auto cont = infer(c.cont, rec_names, fresh);
          expr_env = saved;
          if (!cont) return std::nullopt;
          bs.push_back(LBranch{c.label, c.bind_sort, *cont});
        }
        return l_branch(p->peer, std::move(bs));
      }
      case Process::Kind::If: {
        if (sort_expr(*p->expr, expr_env) != Sort::Bool) return std::nullopt;
        auto a = infer(p->then_branch, rec_names, fresh);
        auto b = infer(p->else_branch, rec_names, fresh);
        if (!a || !b) return std::nullopt;
        return join_types(*a, *b);
      }
    }
    return std::nullopt;
  }
};

// Structural check of a process against a type graph, with one bounded
// subtyping query wherever the shapes disagree. Coinductive: revisiting a
// (subterm, node) pair succeeds.
struct Checker {
  const LocalGraph& g;
  int k;
  std::map<std::string, Sort> expr_env;
  std::map<std::string, ProcessPtr> rec_bodies;
  std::set<std::pair<const Process*, int>> assumed;
  bool unknown = false;

  bool check(const ProcessPtr& p, int node) {
    auto key = std::make_pair(p.get(), node);
    if (assumed.count(key)) return true;
    assumed.insert(key);
    bool ok = dispatch(p, node);
    if (!ok) assumed.erase(key);
    return ok;
  }

  bool dispatch(const ProcessPtr& p, int node) {
    using K = LocalGraph::Node::Kind;
    const auto& nd = g.nodes[node];
    switch (p->kind) {
      case Process::Kind::Inact:
        return nd.kind == K::End || fallback(p, node);
      case Process::Kind::Rec:
        rec_bodies[p->var] = p->body;
        return check(p->body, node);
      case Process::Kind::PVar: {
        auto it = rec_bodies.find(p->var);
        if (it == rec_bodies.end()) return false;
        return check(it->second, node);
      }
      case Process::Kind::If:
        if (sort_expr(*p->expr, expr_env) != Sort::Bool) return false;
        return check(p->then_branch, node) && check(p->else_branch, node);
      case Process::Kind::Send: {
        if (nd.kind != K::Select || nd.peer != p->peer) return fallback(p, node);
        auto s = sort_expr(*p->expr, expr_env);
        if (!s) return false;
        for (const auto& e : nd.edges) {
          if (e.label != p->label) continue;
          if (!ground_subtype(*s, e.sort)) return false;
          return check(p->cont, e.target);
        }
        return fallback(p, node);
      }
      case Process::Kind::Recv: {
        if (nd.kind != K::Branch || nd.peer != p->peer) return fallback(p, node);
        // The process must cover every label the type offers.
        for (const auto& e : nd.edges) {
          const RecvClause* clause = nullptr;
          for (const auto& c : p->clauses)
            if (c.label == e.label) clause = &c;
          if (!clause) return fallback(p, node);
          if (!ground_subtype(e.sort, clause->bind_sort)) return fallback(p, node);
          auto saved = expr_env;
          expr_env[clause->bind_var] = clause->bind_sort;
          bool ok = check(clause->cont, e.target);
          expr_env = saved;
          if (!ok) return false;
        }
        // Extra clauses only need to be well-typed on their own.
        for (const auto& c : p->clauses) {
          bool in_type = false;
          for (const auto& e : nd.edges)
            if (e.label == c.label) in_type = true;
          if (in_type) continue;
          auto saved = expr_env;
          expr_env[c.bind_var] = c.bind_sort;
          Inferencer inf{expr_env};
          std::map<std::string, std::string> names;
          int fresh = 0;
          bool ok = inf.infer(c.cont, names, &fresh).has_value();
          expr_env = saved;
          if (!ok) return false;
        }
        return true;
      }
    }
    return false;
  }

  // Infer a minimal closed type for the subterm and discharge it against the
  // expected node with one asynchronous subtyping query.
  bool fallback(const ProcessPtr& p, int node) {
    Inferencer inf{expr_env};
    std::map<std::string, std::string> names;
    int fresh = 0;
    auto minimal = inf.infer(p, names, &fresh);
    if (!minimal) return false;
    LocalGraph lhs = graph_of(*minimal);
    LocalGraph rhs_rooted = g;
    rhs_rooted.root = node;
    switch (async_subtype_bounded(lhs, rhs_rooted, k, nullptr)) {
      case Verdict3::Yes:
        return true;
      case Verdict3::No:
        return false;
      case Verdict3::Unknown:
        unknown = true;
        return false;
    }
    return false;
  }
};

}  // namespace

std::optional<LocalPtr> infer_process(const TypingEnv& env, const ProcessPtr& p) {
  Inferencer inf;
  inf.expr_env = env.expr_vars;
  std::map<std::string, std::string> names;
  int fresh = 0;
  return inf.infer(p, names, &fresh);
}

Verdict3 type_process(const TypingEnv& env, const ProcessPtr& p, const LocalPtr& t, int k) {
  LocalGraph g = graph_of(t);
  Checker checker{g, k, {}, {}, {}};
  checker.expr_env = env.expr_vars;
  if (checker.check(p, g.root)) return Verdict3::Yes;
  // The structural path failed; type the whole process by inference and one
  // subsumption step.
  Inferencer inf{env.expr_vars};
  std::map<std::string, std::string> names;
  int fresh = 0;
  if (auto minimal = inf.infer(p, names, &fresh)) {
    switch (async_subtype_bounded(*minimal, t, k)) {
      case Verdict3::Yes:
        return Verdict3::Yes;
      case Verdict3::Unknown:
        return Verdict3::Unknown;
      case Verdict3::No:
        break;
    }
  }
  return checker.unknown ? Verdict3::Unknown : Verdict3::No;
}

Verdict3 type_session(const Session& m, const GlobalPtr& g, int k) {
  auto roles = role_sets(g).roles;
  // Roles outside the protocol may only be finished.
  for (const auto& [role, part] : m.parts) {
    if (roles.count(role)) continue;
    if (part.process->kind != Process::Kind::Inact || !part.queue.empty())
      return Verdict3::No;
  }
  bool unknown = false;
  TypingContext ctx;
  for (const Role& r : roles) {
    auto it = m.parts.find(r);
    if (it == m.parts.end()) return Verdict3::No;
    auto proj = project(g, r);
    if (!proj) return Verdict3::No;

    // Prefer the inferred minimal type; fall back to checking directly
    // against the projection.
    LocalPtr assigned;
    if (auto minimal = infer_process(TypingEnv{}, it->second.process)) {
      if (async_subtype_bounded(*minimal, proj->local, k) == Verdict3::Yes)
        assigned = *minimal;
    }
    if (!assigned) {
      switch (type_process(TypingEnv{}, it->second.process, proj->local, k)) {
        case Verdict3::Yes:
          assigned = proj->local;
          break;
        case Verdict3::Unknown:
          unknown = true;
          break;
        case Verdict3::No:
          break;
      }
      if (!assigned && !unknown) return Verdict3::No;
      if (!assigned) continue;
    }
    ctx.entries[r] = TypingContext::Entry{type_queue(it->second.queue), assigned};
  }
  if (unknown) return Verdict3::Unknown;
  switch (associated(ctx, g, k)) {
    case Verdict3::Yes:
      return Verdict3::Yes;
    case Verdict3::Unknown:
      return Verdict3::Unknown;
    case Verdict3::No:
      return Verdict3::No;
  }
  return Verdict3::Unknown;
}

// ---------------------------------------------------------------------------
// Reduction

namespace {

ProcessPtr subst_pvar(const ProcessPtr& p, const std::string& var, const ProcessPtr& repl) {
  switch (p->kind) {
    case Process::Kind::Inact:
      return p;
    case Process::Kind::PVar:
      return p->var == var ? repl : p;
    case Process::Kind::Rec:
      if (p->var == var) return p;
      return p_rec(p->var, subst_pvar(p->body, var, repl));
    case Process::Kind::Send:
      return p_send(p->peer, p->label, p->expr, subst_pvar(p->cont, var, repl));
    case Process::Kind::Recv: {
      std::vector<RecvClause> cs;
      for (const auto& c : p->clauses)
        cs.push_back(RecvClause{c.label, c.bind_var, c.bind_sort,
                                subst_pvar(c.cont, var, repl)});
      return p_recv(p->peer, std::move(cs));
    }
    case Process::Kind::If:
      return p_if(p->expr, subst_pvar(p->then_branch, var, repl),
                  subst_pvar(p->else_branch, var, repl));
  }
  return p;
}

ExprPtr subst_expr_var(const ExprPtr& e, const std::string& var, const Value& v) {
  switch (e->kind) {
    case Expr::Kind::Var:
      if (e->var != var) return e;
      switch (v.sort) {
        case Sort::Int: return e_int(v.i);
        case Sort::Bool: return e_bool(v.b);
        case Sort::Unit: return e_unit();
        case Sort::Real: return e_int(static_cast<long long>(v.r));
      }
      return e;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Less:
    case Expr::Kind::Eq: {
      ExprPtr l = subst_expr_var(e->lhs, var, v);
      ExprPtr r = subst_expr_var(e->rhs, var, v);
      Expr out = *e;
      out.lhs = l;
      out.rhs = r;
      return std::make_shared<Expr>(std::move(out));
    }
    default:
      return e;
  }
}

ProcessPtr subst_value(const ProcessPtr& p, const std::string& var, const Value& v) {
  switch (p->kind) {
    case Process::Kind::Inact:
    case Process::Kind::PVar:
      return p;
    case Process::Kind::Rec:
      return p_rec(p->var, subst_value(p->body, var, v));
    case Process::Kind::Send:
      return p_send(p->peer, p->label, subst_expr_var(p->expr, var, v),
                    subst_value(p->cont, var, v));
    case Process::Kind::Recv: {
      std::vector<RecvClause> cs;
      for (const auto& c : p->clauses) {
        if (c.bind_var == var)  // shadowed
          cs.push_back(c);
        else
          cs.push_back(RecvClause{c.label, c.bind_var, c.bind_sort,
                                  subst_value(c.cont, var, v)});
      }
      return p_recv(p->peer, std::move(cs));
    }
    case Process::Kind::If:
      return p_if(subst_expr_var(p->expr, var, v), subst_value(p->then_branch, var, v),
                  subst_value(p->else_branch, var, v));
  }
  return p;
}

ProcessPtr unfold_process(ProcessPtr p) {
  while (p->kind == Process::Kind::Rec) p = subst_pvar(p->body, p->var, p);
  return p;
}

}  // namespace

Session precongruence_normalize(const Session& m) {
  Session out;
  for (const auto& [role, part] : m.parts) {
    ProcessPtr p = unfold_process(part.process);
    if (p->kind == Process::Kind::Inact && part.queue.empty()) continue;  // SC-Idle
    out.parts[role] = Session::Part{p, part.queue};
  }
  return out;
}

std::vector<SessionStep> session_step(const Session& m0, uint64_t seed) {
  Session m = precongruence_normalize(m0);
  std::vector<SessionStep> out;
  SeedStream seeds(seed);
  for (const auto& [role, part] : m.parts) {
    const ProcessPtr& p = part.process;
    switch (p->kind) {
      case Process::Kind::Send: {
        ValueEnv env;
        SeedStream local(seed ^ std::hash<std::string>{}(role.name));
        auto v = eval_expr(p->expr, env, local);
        if (!v) break;  // no rule fires on a stuck payload
        SessionStep step;
        step.rule = "R-Send";
        step.subject = role;
        step.peer = p->peer;
        step.label = p->label;
        step.next = m;
        auto& mine = step.next.parts[role];
        mine.process = p->cont;
        mine.queue.push_back(RuntimeMessage{p->peer, p->label, *v});
        out.push_back(std::move(step));
        break;
      }
      case Process::Kind::Recv: {
        auto peer_it = m.parts.find(p->peer);
        if (peer_it == m.parts.end()) break;
        const RuntimeQueue& pq = peer_it->second.queue;
        auto msg = std::find_if(pq.begin(), pq.end(), [&](const RuntimeMessage& x) {
          return x.dest == role;
        });
        if (msg == pq.end()) break;
        const RecvClause* clause = nullptr;
        for (const auto& c : p->clauses)
          if (c.label == msg->label) clause = &c;
        if (!clause) {
          SessionStep step;
          step.rule = "Err-Mism";
          step.subject = role;
          step.peer = p->peer;
          step.label = msg->label;
          step.is_error = true;
          out.push_back(std::move(step));
          break;
        }
        SessionStep step;
        step.rule = "R-Rcv";
        step.subject = role;
        step.peer = p->peer;
        step.label = msg->label;
        step.next = m;
        step.next.parts[p->peer].queue.erase(
            step.next.parts[p->peer].queue.begin() + (msg - pq.begin()));
        step.next.parts[role].process = subst_value(clause->cont, clause->bind_var, msg->value);
        out.push_back(std::move(step));
        break;
      }
      case Process::Kind::If: {
        ValueEnv env;
        SeedStream local(seed ^ (std::hash<std::string>{}(role.name) * 7919));
        auto v = eval_expr(p->expr, env, local);
        if (!v || v->sort != Sort::Bool) {
          SessionStep step;
          step.rule = "Err-Eval";
          step.subject = role;
          step.is_error = true;
          out.push_back(std::move(step));
          break;
        }
        SessionStep step;
        step.rule = v->b ? "R-Cond-T" : "R-Cond-F";
        step.subject = role;
        step.next = m;
        step.next.parts[role].process = v->b ? p->then_branch : p->else_branch;
        out.push_back(std::move(step));
        break;
      }
      case Process::Kind::Inact:
      case Process::Kind::Rec:
      case Process::Kind::PVar:
        break;
    }
  }
  for (auto& step : out)
    if (!step.is_error) step.next = precongruence_normalize(step.next);
  return out;
}

RunResult run_fair(const Session& m0, size_t steps, uint64_t seed) {
  RunResult result;
  Session cur = precongruence_normalize(m0);
  uint64_t round_seed = seed;
  while (result.steps_taken < steps) {
    if (cur.parts.empty()) {
      result.outcome = RunResult::Outcome::Terminated;
      return result;
    }
    // Round-robin: every role with an enabled reduction acts once per round.
    bool any = false;
    std::vector<Role> order;
    for (const auto& [role, _] : cur.parts) order.push_back(role);
    for (const Role& role : order) {
      if (result.steps_taken >= steps) break;
      auto successors = session_step(cur, round_seed);
      ++round_seed;
      const SessionStep* mine = nullptr;
      for (const auto& s : successors)
        if (s.subject == role) {
          mine = &s;
          break;
        }
      if (!mine) continue;
      any = true;
      result.trace.push_back(*mine);
      ++result.steps_taken;
      if (mine->is_error) {
        result.outcome = RunResult::Outcome::Err;
        return result;
      }
      cur = mine->next;
      if (cur.parts.empty()) {
        result.outcome = RunResult::Outcome::Terminated;
        return result;
      }
    }
    if (!any) break;  // stuck (not necessarily terminated)
  }
  result.outcome = RunResult::Outcome::Ok;
  return result;
}

}  // namespace mpst
