// SPDX-License-Identifier: Apache-2.0

#include "mpst/print.hpp"

#include <sstream>

namespace mpst {

namespace {

void payload(std::ostringstream& out, Sort s) {
  if (s != Sort::Unit) out << '(' << sort_name(s) << ')';
}

void pg(std::ostringstream& out, const GlobalPtr& g) {
  switch (g->kind) {
    case GlobalType::Kind::End:
      out << "end";
      return;
    case GlobalType::Kind::Var:
      out << g->var;
      return;
    case GlobalType::Kind::Rec:
      out << "rec " << g->var << " . ";
      pg(out, g->body);
      return;
    case GlobalType::Kind::Comm:
    case GlobalType::Kind::EnRoute: {
      out << g->from.name << (g->kind == GlobalType::Kind::Comm ? " -> " : " ~> ")
          << g->to.name << " { ";
      bool first = true;
      for (const auto& b : g->branches) {
        if (!first) out << ", ";
        first = false;
        out << b.label.name;
        payload(out, b.sort);
        out << " . ";
        pg(out, b.cont);
      }
      out << " }";
      return;
    }
  }
}

void pl(std::ostringstream& out, const LocalPtr& t) {
  switch (t->kind) {
    case LocalType::Kind::End:
      out << "end";
      return;
    case LocalType::Kind::Var:
      out << t->var;
      return;
    case LocalType::Kind::Rec:
      out << "rec " << t->var << " . ";
      pl(out, t->body);
      return;
    case LocalType::Kind::Branch:
    case LocalType::Kind::Select: {
      out << t->peer.name << (t->kind == LocalType::Kind::Select ? " (+) " : " & ")
          << "{ ";
      bool first = true;
      for (const auto& b : t->branches) {
        if (!first) out << ", ";
        first = false;
        out << b.label.name;
        payload(out, b.sort);
        out << " . ";
        pl(out, b.cont);
      }
      out << " }";
      return;
    }
  }
}

void pe(std::ostringstream& out, const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::IntLit: out << e->i; return;
    case Expr::Kind::BoolLit: out << (e->b ? "true" : "false"); return;
    case Expr::Kind::UnitLit: out << "unit"; return;
    case Expr::Kind::Var: out << e->var; return;
    case Expr::Kind::NondetBool: out << "nondet"; return;
    case Expr::Kind::Add:
      pe(out, e->lhs);
      out << " + ";
      pe(out, e->rhs);
      return;
    case Expr::Kind::Sub:
      pe(out, e->lhs);
      out << " - ";
      pe(out, e->rhs);
      return;
    case Expr::Kind::Less:
      pe(out, e->lhs);
      out << " < ";
      pe(out, e->rhs);
      return;
    case Expr::Kind::Eq:
      pe(out, e->lhs);
      out << " == ";
      pe(out, e->rhs);
      return;
  }
}

void pp(std::ostringstream& out, const ProcessPtr& p) {
  switch (p->kind) {
    case Process::Kind::Inact:
      out << "0";
      return;
    case Process::Kind::PVar:
      out << p->var;
      return;
    case Process::Kind::Rec:
      out << "rec " << p->var << " . ";
      pp(out, p->body);
      return;
    case Process::Kind::Send:
      out << p->peer.name << "!" << p->label.name << "<";
      pe(out, p->expr);
      out << "> . ";
      pp(out, p->cont);
      return;
    case Process::Kind::Recv: {
      bool sum = p->clauses.size() > 1;
      if (sum) out << "sum { ";
      bool first = true;
      for (const auto& c : p->clauses) {
        if (!first) out << ", ";
        first = false;
        out << p->peer.name << "?" << c.label.name << "(" << c.bind_var;
        if (c.bind_sort != Sort::Unit) out << ": " << sort_name(c.bind_sort);
        out << ") . ";
        pp(out, c.cont);
      }
      if (sum) out << " }";
      return;
    }
    case Process::Kind::If:
      out << "if ";
      pe(out, p->expr);
      out << " then ";
      pp(out, p->then_branch);
      out << " else ";
      pp(out, p->else_branch);
      return;
  }
}

}  // namespace

std::string print_global(const GlobalPtr& g) {
  std::ostringstream out;
  pg(out, g);
  return out.str();
}

std::string print_local(const LocalPtr& t) {
  std::ostringstream out;
  pl(out, t);
  return out.str();
}

std::string print_queue(const QueueType& h) {
  if (h.empty()) return "<>";
  std::ostringstream out;
  bool first = true;
  for (const auto& e : h) {
    if (!first) out << " . ";
    first = false;
    out << '<' << e.dest.name << ", " << e.label.name;
    if (e.sort != Sort::Unit) out << '(' << sort_name(e.sort) << ')';
    out << '>';
  }
  return out.str();
}

std::string print_context(const TypingContext& ctx) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [role, entry] : ctx.entries) {
    if (!first) out << ",\n";
    first = false;
    out << role.name << " : (" << print_queue(entry.queue) << ", "
        << print_local(entry.type) << ")";
  }
  return out.str();
}

std::string print_process(const ProcessPtr& p) {
  std::ostringstream out;
  pp(out, p);
  return out.str();
}

std::string print_expr(const ExprPtr& e) {
  std::ostringstream out;
  pe(out, e);
  return out.str();
}

std::string print_value(const Value& v) {
  switch (v.sort) {
    case Sort::Int: return std::to_string(v.i);
    case Sort::Bool: return v.b ? "true" : "false";
    case Sort::Real: return std::to_string(v.r);
    case Sort::Unit: return "unit";
  }
  return "?";
}

std::string print_session(const Session& m) {
  std::ostringstream out;
  for (const auto& [role, part] : m.parts) {
    out << "role " << role.name << " = " << print_process(part.process) << "\n";
    out << "queue " << role.name << " = ";
    if (part.queue.empty()) {
      out << "<>";
    } else {
      bool first = true;
      for (const auto& msg : part.queue) {
        if (!first) out << " . ";
        first = false;
        out << '<' << msg.dest.name << ", " << msg.label.name << '('
            << print_value(msg.value) << ")>";
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace mpst
